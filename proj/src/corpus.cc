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

#include "eqk/corpus.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "eqk/error.h"
#include "eqk/json_io.h"
#include "eqk/rng.h"
#include "eqk/searchmetrics.h"
#include "eqk/url.h"

namespace eqk::corpus {

using nlohmann::json;

namespace {

constexpr const char* kMetadataKey = "metadata";

std::string RequireString(const json& obj, const char* field,
                          std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    throw DatasetError(std::string("missing field '") + field + "'", line);
  }
  if (!it->is_string()) {
    throw DatasetError(std::string("field '") + field + "' must be a string",
                       line);
  }
  return it->get<std::string>();
}

ClaimRecord ParseRecord(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw DatasetError("expected a JSON object", line);
  ClaimRecord r;
  r.claim_id = RequireString(obj, "claim_id", line);
  r.article_id = RequireString(obj, "article_id", line);
  r.claim_text = RequireString(obj, "claim_text", line);
  r.target_query = RequireString(obj, "target_query", line);
  r.target_url = RequireString(obj, "target_url", line);
  if (auto it = obj.find("context_sentences");
      it != obj.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw DatasetError("field 'context_sentences' must be an array", line);
    }
    std::vector<std::string> context;
    for (const auto& s : *it) {
      if (!s.is_string()) {
        throw DatasetError("field 'context_sentences' must hold strings",
                           line);
      }
      context.push_back(s.get<std::string>());
    }
    r.context_sentences = std::move(context);
  }
  return r;
}

bool IsBlank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c);
  });
}

// Articles in first-appearance order, each with its record indices.
std::vector<std::pair<std::string, std::vector<std::size_t>>> GroupByArticle(
    std::span<const ClaimRecord> records) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = index.emplace(records[i].article_id, groups.size());
    if (inserted) groups.push_back({records[i].article_id, {}});
    groups[it->second].second.push_back(i);
  }
  return groups;
}

int RequiredHits(double threshold, int executions) {
  // Tolerance guards products such as 0.7 * 10 = 7.000000000000001.
  return static_cast<int>(std::ceil(threshold * executions - 1e-9));
}

}  // namespace

int FoldAssignment::FoldOf(const std::string& claim_id) const {
  auto it = assignments.find(claim_id);
  if (it == assignments.end()) {
    throw std::out_of_range("no fold for claim " + claim_id);
  }
  return it->second;
}

std::vector<std::size_t> FoldAssignment::Sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (const auto& [id, fold] : assignments) ++sizes.at(fold);
  return sizes;
}

void ValidateRecord(const ClaimRecord& record, std::size_t line) {
  if (record.claim_id.empty()) throw DatasetError("empty claim_id", line);
  if (record.claim_text.empty()) {
    throw DatasetError("field 'claim_text' is empty", line);
  }
  if (record.target_query.empty()) {
    throw DatasetError("field 'target_query' is empty", line);
  }
  if (!IsAbsoluteUrl(record.target_url)) {
    throw DatasetError("field 'target_url' is not an absolute URL: '" +
                           record.target_url + "'",
                       line);
  }
}

void ValidateDataset(const Dataset& dataset) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    ValidateRecord(r, i + 1);
    if (!ids.insert(r.claim_id).second) {
      throw DatasetError("duplicate claim_id '" + r.claim_id + "'", i + 1);
    }
  }
}

Dataset LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  Dataset dataset;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  bool seen_record = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DatasetError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!seen_record && obj.is_object() && obj.size() == 1 &&
        obj.contains(kMetadataKey)) {
      try {
        dataset.metadata =
            obj[kMetadataKey].get<std::map<std::string, std::string>>();
      } catch (const json::exception&) {
        throw DatasetError("metadata must map strings to strings", line_no);
      }
      seen_record = true;
      continue;
    }
    seen_record = true;
    ClaimRecord record = ParseRecord(obj, line_no);
    ValidateRecord(record, line_no);
    if (!ids.insert(record.claim_id).second) {
      throw DatasetError("duplicate claim_id '" + record.claim_id + "'",
                         line_no);
    }
    dataset.records.push_back(std::move(record));
  }
  if (in.bad()) throw DatasetError("read error on " + path.string());
  return dataset;
}

void WriteDataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write dataset " + path.string());
  if (!dataset.metadata.empty()) {
    out << json{{kMetadataKey, dataset.metadata}}.dump() << '\n';
  }
  for (const auto& record : dataset.records) {
    out << json(record).dump() << '\n';
  }
  if (!out) throw DatasetError("write failed on " + path.string());
}

FoldAssignment SplitFolds(const Dataset& dataset, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("split_folds: k must be >= 2");
  auto groups = GroupByArticle(dataset.records);
  if (groups.size() < static_cast<std::size_t>(k)) {
    throw DatasetError("split_folds: " + std::to_string(groups.size()) +
                       " articles cannot fill " + std::to_string(k) +
                       " folds");
  }
  Rng rng(seed);
  rng.Shuffle(groups);
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) {
                     return a.second.size() > b.second.size();
                   });
  FoldAssignment folds;
  folds.k = k;
  std::vector<std::size_t> load(k, 0);
  for (const auto& [article, members] : groups) {
    const auto target = static_cast<int>(
        std::min_element(load.begin(), load.end()) - load.begin());
    load[target] += members.size();
    for (std::size_t idx : members) {
      folds.assignments[dataset.records[idx].claim_id] = target;
    }
  }
  return folds;
}

Partition FoldPartition(const Dataset& dataset, const FoldAssignment& folds,
                        int fold) {
  if (fold < 0 || fold >= folds.k) {
    throw std::out_of_range("fold index out of range");
  }
  Partition p;
  for (const auto& r : dataset.records) {
    (folds.FoldOf(r.claim_id) == fold ? p.test : p.train).push_back(r);
  }
  return p;
}

std::pair<std::vector<ClaimRecord>, std::vector<ClaimRecord>> SelectValidation(
    std::span<const ClaimRecord> train, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("select_validation: fraction must be in (0, 1)");
  }
  if (train.empty()) {
    throw std::invalid_argument("select_validation: empty training set");
  }
  auto groups = GroupByArticle(train);
  Rng rng(seed);
  rng.Shuffle(groups);

  const std::size_t total = train.size();
  const auto target = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(total)));

  // reachable[i][s]: some subset of the first i shuffled articles sums to s.
  const std::size_t m = groups.size();
  std::vector<std::vector<char>> reachable(m + 1,
                                           std::vector<char>(total + 1, 0));
  reachable[0][0] = 1;
  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t size = groups[i - 1].second.size();
    for (std::size_t s = 0; s <= total; ++s) {
      reachable[i][s] =
          reachable[i - 1][s] || (s >= size && reachable[i - 1][s - size]);
    }
  }
  std::size_t best = 0;
  for (std::size_t s = 0; s <= total; ++s) {
    if (!reachable[m][s]) continue;
    const auto dist = [&](std::size_t v) {
      return v > target ? v - target : target - v;
    };
    if (dist(s) < dist(best)) best = s;
  }
  // Walk back, skipping an article whenever the remainder is reachable
  // without it; this favours articles early in the shuffled order.
  std::vector<char> held(total, 0);
  std::size_t remaining = best;
  for (std::size_t i = m; i > 0; --i) {
    if (reachable[i - 1][remaining]) continue;
    for (std::size_t idx : groups[i - 1].second) held[idx] = 1;
    remaining -= groups[i - 1].second.size();
  }
  std::pair<std::vector<ClaimRecord>, std::vector<ClaimRecord>> out;
  for (std::size_t i = 0; i < total; ++i) {
    (held[i] ? out.second : out.first).push_back(train[i]);
  }
  return out;
}

StabilityResult StabilityFilter(const Dataset& dataset,
                                search::SearchEngine& engine,
                                const StabilityOptions& options) {
  if (options.executions < 1) {
    throw std::invalid_argument("stability_filter: executions must be >= 1");
  }
  if (!(options.threshold > 0.0 && options.threshold <= 1.0)) {
    throw std::invalid_argument("stability_filter: threshold must be in (0, 1]");
  }
  const int required = RequiredHits(options.threshold, options.executions);
  const auto& records = dataset.records;
  std::vector<StabilityHits> hits(records.size());

  auto check = [&](std::size_t i) {
    const auto& r = records[i];
    search::ExecutionOptions exec;
    exec.n = options.executions;
    exec.k = options.k;
    exec.store = options.store;
    auto outcome = search::MakeOutcome(
        r.claim_id, "target_query", r.target_url,
        search::ExecuteRepeated(engine, r.target_query, exec));
    StabilityHits& h = hits[i];
    h.claim_id = r.claim_id;
    h.executions = options.executions;
    h.hits = static_cast<int>(outcome.found_count());
    h.failed_executions = static_cast<int>(
        std::count_if(outcome.lists.begin(), outcome.lists.end(),
                      [](const auto& l) { return l.failed; }));
    h.kept = h.hits >= required;
  };

  const int workers = std::max(1, options.parallelism);
  if (workers == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) check(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          try {
            for (std::size_t i = next++; i < records.size(); i = next++) {
              check(i);
            }
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next = records.size();
          }
        });
      }
    }
    if (error) std::rethrow_exception(error);
  }

  StabilityResult result;
  result.kept.metadata = dataset.metadata;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (hits[i].kept) result.kept.records.push_back(records[i]);
    if (hits[i].failed_executions > 0) {
      spdlog::warn("stability_filter: {} had {} failed executions",
                   hits[i].claim_id, hits[i].failed_executions);
    }
  }
  result.hits = std::move(hits);
  return result;
}

}  // namespace eqk::corpus
