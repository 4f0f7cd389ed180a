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

#include "eqk/fewshot.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "eqk/error.h"
#include "eqk/json_io.h"
#include "eqk/rng.h"
#include "eqk/textmetrics.h"

namespace eqk::promptgen {

using nlohmann::json;

namespace {

// Identifies the candidate pool so a checkpoint from another fold is ignored.
std::string TrainFingerprint(std::span<const corpus::ClaimRecord> train,
                             const PromptTemplate& tpl,
                             const GenerationParams& params) {
  std::string key = tpl.template_id + '\n' + json(params).dump() + '\n';
  for (const auto& r : train) {
    key += r.claim_id;
    key.push_back('\0');
  }
  return std::to_string(StableHash(key));
}

class Checkpoint {
 public:
  Checkpoint(std::optional<std::filesystem::path> path, std::string fingerprint)
      : path_(std::move(path)), fingerprint_(std::move(fingerprint)) {
    if (!path_ || !std::filesystem::exists(*path_)) return;
    std::ifstream in(*path_);
    std::string line;
    while (std::getline(in, line)) {
      try {
        const json row = json::parse(line);
        if (row.at("fingerprint").get<std::string>() != fingerprint_) continue;
        CandidateScore score{row.at("claim_id").get<std::string>(),
                             row.at("mean_score").get<double>(),
                             row.at("failed").get<bool>()};
        done_[score.claim_id] = score;
      } catch (const json::exception&) {
        spdlog::warn("few-shot checkpoint {}: skipping unreadable line",
                     path_->string());
      }
    }
  }

  std::optional<CandidateScore> Find(const std::string& claim_id) const {
    auto it = done_.find(claim_id);
    if (it == done_.end()) return std::nullopt;
    return it->second;
  }

  void Record(const CandidateScore& score) {
    if (!path_) return;
    const json row = {{"fingerprint", fingerprint_},
                      {"claim_id", score.claim_id},
                      {"mean_score", score.mean_score},
                      {"failed", score.failed}};
    std::lock_guard lock(mu_);
    std::ofstream out(*path_, std::ios::app);
    out << row.dump() << '\n';
  }

 private:
  std::optional<std::filesystem::path> path_;
  std::string fingerprint_;
  std::map<std::string, CandidateScore> done_;
  std::mutex mu_;
};

}  // namespace

InContextExample ToExample(const corpus::ClaimRecord& record) {
  return {record.claim_text, record.target_query, record.claim_id};
}

FewShotSelection SelectFewShotExamples(std::span<const corpus::ClaimRecord> train,
                                       GenerationBackend& backend,
                                       const PromptTemplate& tpl,
                                       const FewShotOptions& options) {
  if (train.size() < options.count + 1) {
    throw std::invalid_argument(
        "few-shot selection needs at least " +
        std::to_string(options.count + 1) + " training records, got " +
        std::to_string(train.size()));
  }
  options.params.Validate();
  Checkpoint checkpoint(options.checkpoint,
                        TrainFingerprint(train, tpl, options.params));

  FewShotSelection selection;
  selection.scores.resize(train.size());

  auto score_candidate = [&](std::size_t c) {
    const auto& candidate = train[c];
    if (auto cached = checkpoint.Find(candidate.claim_id)) {
      selection.scores[c] = *cached;
      return;
    }
    const InContextExample example = ToExample(candidate);
    CandidateScore score{candidate.claim_id, 0.0, false};
    double total = 0.0;
    try {
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (i == c) continue;
        const std::string prompt =
            RenderFewShot(tpl, std::span(&example, 1), train[i].claim_text);
        const std::string output = Postprocess(
            Generate(backend, prompt, options.params, options.retry), tpl);
        total += textmetrics::LevenshteinRatio(output, train[i].target_query);
      }
      score.mean_score = total / static_cast<double>(train.size() - 1);
    } catch (const BackendError& e) {
      spdlog::warn("few-shot: candidate {} excluded: {}", candidate.claim_id,
                   e.what());
      score.failed = true;
    }
    checkpoint.Record(score);
    selection.scores[c] = score;
  };

  const int workers = std::max(1, options.max_in_flight);
  if (workers == 1) {
    for (std::size_t c = 0; c < train.size(); ++c) score_candidate(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          try {
            for (std::size_t c = next++; c < train.size(); c = next++) {
              score_candidate(c);
            }
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next = train.size();
          }
        });
      }
    }
    if (error) std::rethrow_exception(error);
  }

  std::vector<std::size_t> ranked;
  for (std::size_t c = 0; c < train.size(); ++c) {
    if (!selection.scores[c].failed) ranked.push_back(c);
  }
  if (ranked.size() < options.count) {
    throw Error("few-shot selection: only " + std::to_string(ranked.size()) +
                " candidates scored successfully, need " +
                std::to_string(options.count));
  }
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = selection.scores[a];
    const auto& sb = selection.scores[b];
    if (sa.mean_score != sb.mean_score) return sa.mean_score > sb.mean_score;
    return sa.claim_id < sb.claim_id;
  });
  for (std::size_t i = 0; i < options.count; ++i) {
    selection.examples.push_back(ToExample(train[ranked[i]]));
  }
  return selection;
}

}  // namespace eqk::promptgen
