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

#include "eqk/ensemble.h"

#include <algorithm>
#include <limits>
#include <set>

#include "eqk/error.h"
#include "eqk/url.h"

namespace eqk::ensemble {

namespace {

struct Tally {
  double points = 0.0;
  int priority = std::numeric_limits<int>::max();
  int rank_in_priority_method = std::numeric_limits<int>::max();
};

}  // namespace

CombinedRanking BordaCombine(std::span<const MethodRanking> rankings, int k) {
  if (k < 1) throw std::invalid_argument("borda: k must be >= 1");
  if (rankings.empty()) throw std::invalid_argument("borda: no rankings");
  std::set<int> priorities;
  for (const auto& r : rankings) {
    if (!priorities.insert(r.priority).second) {
      throw std::invalid_argument("borda: duplicate priority " +
                                  std::to_string(r.priority));
    }
  }

  std::map<std::string, Tally> tallies;
  for (const auto& ranking : rankings) {
    std::map<std::string, int> best_rank;
    for (const auto& list : ranking.lists) {
      std::set<std::string> seen;
      int rank = 0;
      for (const auto& raw : list.urls) {
        std::string url = NormalizeUrl(raw);
        if (!seen.insert(url).second) continue;
        ++rank;
        if (rank > k) break;
        tallies[url].points += k - rank + 1;
        auto [it, inserted] = best_rank.emplace(url, rank);
        if (!inserted) it->second = std::min(it->second, rank);
      }
    }
    for (const auto& [url, rank] : best_rank) {
      Tally& t = tallies[url];
      if (ranking.priority < t.priority) {
        t.priority = ranking.priority;
        t.rank_in_priority_method = rank;
      }
    }
  }

  std::vector<std::pair<std::string, Tally>> order(tallies.begin(),
                                                   tallies.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second.points != b.second.points) {
      return a.second.points > b.second.points;
    }
    if (a.second.priority != b.second.priority) {
      return a.second.priority < b.second.priority;
    }
    if (a.second.rank_in_priority_method != b.second.rank_in_priority_method) {
      return a.second.rank_in_priority_method < b.second.rank_in_priority_method;
    }
    return a.first < b.first;
  });
  if (order.size() > static_cast<std::size_t>(k)) order.resize(k);

  CombinedRanking combined;
  for (auto& [url, tally] : order) {
    combined.urls.push_back(url);
    combined.scores.push_back(tally.points);
  }
  return combined;
}

std::string EnsembleLabel(const std::map<Method, int>& priorities) {
  std::vector<std::pair<int, Method>> members;
  for (const auto& [m, p] : priorities) members.emplace_back(p, m);
  std::sort(members.begin(), members.end());
  std::string label = "ensemble(";
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i > 0) label += '+';
    label += MethodName(members[i].second);
  }
  return label + ")";
}

std::vector<search::SampleSearchOutcome> CombinedOutcomes(
    const std::map<Method, std::vector<search::SampleSearchOutcome>>& per_method,
    const std::map<Method, int>& priorities, int k) {
  if (per_method.empty()) throw std::invalid_argument("ensemble: no methods");
  for (const auto& [method, outcomes] : per_method) {
    if (!priorities.contains(method)) {
      throw std::invalid_argument("ensemble: no priority for " +
                                  std::string(MethodName(method)));
    }
  }
  const auto& reference = per_method.begin()->second;
  for (const auto& [method, outcomes] : per_method) {
    if (outcomes.size() != reference.size()) {
      throw Error("ensemble: " + std::string(MethodName(method)) + " has " +
                  std::to_string(outcomes.size()) + " samples, expected " +
                  std::to_string(reference.size()));
    }
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
      if (outcomes[s].claim_id != reference[s].claim_id ||
          outcomes[s].lists.size() != reference[s].lists.size()) {
        throw Error("ensemble: sample mismatch at position " +
                    std::to_string(s) + " for " +
                    std::string(MethodName(method)));
      }
    }
  }

  std::map<Method, int> used;
  for (const auto& [method, outcomes] : per_method) {
    used[method] = priorities.at(method);
  }
  const std::string label = EnsembleLabel(used);

  std::vector<search::SampleSearchOutcome> combined;
  for (std::size_t s = 0; s < reference.size(); ++s) {
    std::vector<search::ResultList> lists;
    for (std::size_t i = 0; i < reference[s].lists.size(); ++i) {
      std::vector<MethodRanking> rankings;
      for (const auto& [method, outcomes] : per_method) {
        rankings.push_back({method, used.at(method), {outcomes[s].lists[i]}});
      }
      search::ResultList list;
      list.engine_id = "ensemble";
      list.execution_index = static_cast<int>(i);
      list.urls = BordaCombine(rankings, k).urls;
      lists.push_back(std::move(list));
    }
    combined.push_back(search::MakeOutcome(reference[s].claim_id, label,
                                           reference[s].target_url,
                                           std::move(lists)));
  }
  return combined;
}

std::map<Method, int> PrioritiesByEffectiveness(
    const std::map<Method, search::SearchMetrics>& standalone) {
  std::vector<std::pair<Method, search::SearchMetrics>> order(
      standalone.begin(), standalone.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second.fm_pct != b.second.fm_pct) {
                       return a.second.fm_pct > b.second.fm_pct;
                     }
                     return a.second.mrr > b.second.mrr;
                   });
  std::map<Method, int> priorities;
  for (std::size_t i = 0; i < order.size(); ++i) {
    priorities[order[i].first] = static_cast<int>(i + 1);
  }
  return priorities;
}

}  // namespace eqk::ensemble
