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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "eqk/method.h"
#include "eqk/search.h"
#include "eqk/searchmetrics.h"

// Rank fusion of per-method result lists by Borda count.
namespace eqk::ensemble {

struct MethodRanking {
  Method method = Method::kVerbatim;
  // 1 is the most effective method on its own. Unique per combination.
  int priority = 1;
  std::vector<search::ResultList> lists;
};

struct CombinedRanking {
  std::vector<std::string> urls;  // normalized
  std::vector<double> scores;     // non-increasing, parallel to urls
};

// A URL at rank r <= k of a list earns k - r + 1 points; URLs are compared
// normalized and only their first occurrence in a list counts. Points are
// summed over every list of every method. Ties go to the URL ranked by the
// highest-priority method, then to its best rank in that method's lists,
// then to the lexicographically smaller URL. Returns the top k.
CombinedRanking BordaCombine(std::span<const MethodRanking> rankings, int k);

// For each sample and execution index i, fuses the methods' i-th lists and
// re-scores the fused lists against the sample's target URL. Every method
// must cover the same samples with the same number of executions.
std::vector<search::SampleSearchOutcome> CombinedOutcomes(
    const std::map<Method, std::vector<search::SampleSearchOutcome>>& per_method,
    const std::map<Method, int>& priorities, int k);

// "ensemble(m1+m2+...)" with members in priority order.
std::string EnsembleLabel(const std::map<Method, int>& priorities);

// Priority 1 to the method with the highest FM%, then by MRR, then by
// method order.
std::map<Method, int> PrioritiesByEffectiveness(
    const std::map<Method, search::SearchMetrics>& standalone);

}  // namespace eqk::ensemble
