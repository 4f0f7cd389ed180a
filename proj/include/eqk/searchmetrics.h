/*
 * Copyright 2026 The eqk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqk/search.h"
#include "eqk/url.h"

namespace eqk::search {

// The N executions of one sample's query and whether each found the target.
struct SampleSearchOutcome {
  std::string claim_id;
  // Method wire name, or an ensemble label such as
  // "ensemble(named_entities+fine_tuned)".
  std::string method;
  std::string target_url;
  std::vector<ResultList> lists;
  std::vector<bool> target_found_per_list;
  // 1-based rank of the target in each list, nullopt when absent.
  std::vector<std::optional<int>> best_rank_per_list;

  std::size_t found_count() const;
  bool operator==(const SampleSearchOutcome&) const = default;
};

SampleSearchOutcome MakeOutcome(std::string claim_id, std::string method,
                                std::string target_url,
                                std::vector<ResultList> lists,
                                UrlMatch match = UrlMatch::kNormalized);

// Percentages in [0, 100]; mrr in [0, 1].
struct SearchMetrics {
  double fa_pct = 0.0;
  double fm_pct = 0.0;
  double fo_pct = 0.0;
  double mrr = 0.0;
};

// Minimum number of found executions that counts as a majority of n:
// ceil((n + 1) / 2), i.e. 2 of 3.
int MajorityThreshold(int n);

// FA/FM/FO over samples; mrr is left at 0. Throws MetricError on an empty
// span or when samples disagree on N.
SearchMetrics FoundMetrics(std::span<const SampleSearchOutcome> outcomes);

// Mean over every executed list of 1/rank when the target sits within the
// top k, else 0.
double MrrAtK(std::span<const SampleSearchOutcome> outcomes, int k);

SearchMetrics EvaluateSearch(std::span<const SampleSearchOutcome> outcomes,
                             int k);

enum class FoundRule { kAll, kMajority, kOnce };
bool IsFound(const SampleSearchOutcome& outcome, FoundRule rule);

}  // namespace eqk::search
