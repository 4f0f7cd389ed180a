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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqk/search.h"

namespace eqk::corpus {

struct ClaimRecord {
  std::string claim_id;
  std::string article_id;
  std::string claim_text;
  std::string target_query;
  std::string target_url;
  // Preceding sentences and the article title. Carried, not yet consumed.
  std::optional<std::vector<std::string>> context_sentences;

  bool operator==(const ClaimRecord&) const = default;
};

struct Dataset {
  std::vector<ClaimRecord> records;
  std::map<std::string, std::string> metadata;

  bool operator==(const Dataset&) const = default;
};

struct FoldAssignment {
  int k = 0;
  std::map<std::string, int> assignments;

  int FoldOf(const std::string& claim_id) const;
  // Claim count per fold, indexed by fold.
  std::vector<std::size_t> Sizes() const;
};

// Reads a JSON-Lines dataset: one ClaimRecord object per line with
// snake_case keys. An optional first line {"metadata": {...}} carries the
// dataset metadata. Blank lines are ignored. Throws DatasetError naming the
// line and field on any violation.
Dataset LoadDataset(const std::filesystem::path& path);
void WriteDataset(const std::filesystem::path& path, const Dataset& dataset);

// Checks record-level and dataset-level invariants. Line numbers in errors
// are record indices + 1 (+1 more when `metadata_line` is set).
void ValidateRecord(const ClaimRecord& record, std::size_t line);
void ValidateDataset(const Dataset& dataset);

// Groups claims by article, shuffles the articles with `seed`, then assigns
// them largest-first to the currently smallest fold (lowest index on ties).
FoldAssignment SplitFolds(const Dataset& dataset, int k, std::uint64_t seed);

struct Partition {
  std::vector<ClaimRecord> train;
  std::vector<ClaimRecord> test;
};
// Test = claims in `fold`; train = the rest. Input order preserved.
Partition FoldPartition(const Dataset& dataset, const FoldAssignment& folds,
                        int fold);

// Holds out whole articles so the held-out size is as close as possible to
// round(fraction * |train|) (smaller total on ties). Among equally close
// article subsets the one earliest in the seeded article order is chosen.
// Returns (train_rest, validation), both in input order.
std::pair<std::vector<ClaimRecord>, std::vector<ClaimRecord>> SelectValidation(
    std::span<const ClaimRecord> train, double fraction, std::uint64_t seed);

struct StabilityHits {
  std::string claim_id;
  int hits = 0;
  int executions = 0;
  int failed_executions = 0;
  bool kept = false;
};

struct StabilityResult {
  Dataset kept;
  std::vector<StabilityHits> hits;
};

struct StabilityOptions {
  int executions = 12;
  double threshold = 0.5;
  int k = 10;
  search::SnapshotStore* store = nullptr;
  // Records checked concurrently; each record's executions stay sequential.
  int parallelism = 1;
};

// Keeps a record iff its target URL appears (normalized) in the top k of at
// least ceil(threshold * executions) executions of its target query. Failed
// engine calls count as misses. Output preserves input order.
StabilityResult StabilityFilter(const Dataset& dataset,
                                search::SearchEngine& engine,
                                const StabilityOptions& options = {});

}  // namespace eqk::corpus
