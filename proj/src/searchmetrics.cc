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

#include "eqk/searchmetrics.h"

#include <algorithm>

#include "eqk/error.h"

namespace eqk::search {

std::size_t SampleSearchOutcome::found_count() const {
  return static_cast<std::size_t>(std::count(
      target_found_per_list.begin(), target_found_per_list.end(), true));
}

SampleSearchOutcome MakeOutcome(std::string claim_id, std::string method,
                                std::string target_url,
                                std::vector<ResultList> lists, UrlMatch match) {
  SampleSearchOutcome outcome;
  outcome.claim_id = std::move(claim_id);
  outcome.method = std::move(method);
  outcome.target_url = std::move(target_url);
  for (const auto& list : lists) {
    std::optional<int> rank;
    for (std::size_t i = 0; i < list.urls.size(); ++i) {
      if (SameUrl(list.urls[i], outcome.target_url, match)) {
        rank = static_cast<int>(i + 1);
        break;
      }
    }
    outcome.target_found_per_list.push_back(rank.has_value());
    outcome.best_rank_per_list.push_back(rank);
  }
  outcome.lists = std::move(lists);
  return outcome;
}

int MajorityThreshold(int n) { return (n + 2) / 2; }

namespace {

std::size_t CommonN(std::span<const SampleSearchOutcome> outcomes) {
  if (outcomes.empty()) throw MetricError("search metrics: no outcomes");
  const std::size_t n = outcomes.front().target_found_per_list.size();
  for (const auto& o : outcomes) {
    if (o.target_found_per_list.size() != n ||
        o.best_rank_per_list.size() != n) {
      throw MetricError("search metrics: sample " + o.claim_id + " has " +
                        std::to_string(o.target_found_per_list.size()) +
                        " executions, expected " + std::to_string(n));
    }
  }
  return n;
}

}  // namespace

bool IsFound(const SampleSearchOutcome& outcome, FoundRule rule) {
  const auto n = static_cast<int>(outcome.target_found_per_list.size());
  const auto found = static_cast<int>(outcome.found_count());
  switch (rule) {
    case FoundRule::kAll:
      return n > 0 && found == n;
    case FoundRule::kMajority:
      return n > 0 && found >= MajorityThreshold(n);
    case FoundRule::kOnce:
      return found >= 1;
  }
  return false;
}

SearchMetrics FoundMetrics(std::span<const SampleSearchOutcome> outcomes) {
  CommonN(outcomes);
  std::size_t all = 0, majority = 0, once = 0;
  for (const auto& o : outcomes) {
    all += IsFound(o, FoundRule::kAll);
    majority += IsFound(o, FoundRule::kMajority);
    once += IsFound(o, FoundRule::kOnce);
  }
  const double total = static_cast<double>(outcomes.size());
  SearchMetrics m;
  m.fa_pct = 100.0 * all / total;
  m.fm_pct = 100.0 * majority / total;
  m.fo_pct = 100.0 * once / total;
  return m;
}

double MrrAtK(std::span<const SampleSearchOutcome> outcomes, int k) {
  if (k < 1) throw std::invalid_argument("mrr: k must be >= 1");
  const std::size_t n = CommonN(outcomes);
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (const auto& o : outcomes) {
    for (const auto& rank : o.best_rank_per_list) {
      if (rank && *rank <= k) sum += 1.0 / *rank;
    }
  }
  return sum / static_cast<double>(outcomes.size() * n);
}

SearchMetrics EvaluateSearch(std::span<const SampleSearchOutcome> outcomes,
                             int k) {
  SearchMetrics m = FoundMetrics(outcomes);
  m.mrr = MrrAtK(outcomes, k);
  return m;
}

}  // namespace eqk::search
