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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqk/backend.h"
#include "eqk/corpus.h"
#include "eqk/retry.h"
#include "eqk/templates.h"

namespace eqk::promptgen {

struct FewShotOptions {
  GenerationParams params;
  RetryPolicy retry;
  std::size_t count = 3;
  // Candidates scored concurrently.
  int max_in_flight = 1;
  // JSONL progress file; finished candidates found here are not re-scored.
  std::optional<std::filesystem::path> checkpoint;
};

struct CandidateScore {
  std::string claim_id;
  double mean_score = 0.0;
  bool failed = false;

  bool operator==(const CandidateScore&) const = default;
};

struct FewShotSelection {
  std::vector<InContextExample> examples;
  // One entry per training record, in training order.
  std::vector<CandidateScore> scores;
};

// Scores each training record as a one-shot example: the rendered prompt is
// sent for every other training record, the post-processed output compared
// to that record's target query by Levenshtein ratio, and the ratios
// averaged. Returns the `count` best candidates (ties: smaller claim_id).
// Candidates whose backend calls fail are skipped with a warning.
FewShotSelection SelectFewShotExamples(std::span<const corpus::ClaimRecord> train,
                                       GenerationBackend& backend,
                                       const PromptTemplate& tpl,
                                       const FewShotOptions& options = {});

InContextExample ToExample(const corpus::ClaimRecord& record);

}  // namespace eqk::promptgen
