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

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqk/config.h"
#include "eqk/method.h"
#include "eqk/searchmetrics.h"
#include "eqk/textmetrics.h"

// Cross-validated experiment orchestration and report assembly.
namespace eqk::harness {

enum class ErrorCategory {
  kMissingKeyTerm,
  kNeedsExternalContext,
  kWrongEntity,
  kHallucination,
  kRecreatedClaim,
  kQueryLooksGood,
};

std::string_view ErrorCategoryName(ErrorCategory category);
std::optional<ErrorCategory> ParseErrorCategory(std::string_view name);
inline constexpr std::array<ErrorCategory, 6> kErrorCategories = {
    ErrorCategory::kMissingKeyTerm, ErrorCategory::kNeedsExternalContext,
    ErrorCategory::kWrongEntity,    ErrorCategory::kHallucination,
    ErrorCategory::kRecreatedClaim, ErrorCategory::kQueryLooksGood,
};

struct ErrorLabel {
  std::string claim_id;
  ErrorCategory category = ErrorCategory::kMissingKeyTerm;
  std::string note;
};

// JSONL of {"claim_id", "category", "note"}; throws DatasetError on an
// unknown category.
std::vector<ErrorLabel> LoadErrorLabels(const std::filesystem::path& path);

// Per-sample evaluation of one generated query.
struct DetailRow {
  int fold = 0;
  std::string claim_id;
  Method method = Method::kVerbatim;
  std::optional<std::string> template_id;
  std::string query;
  bool empty = false;
  textmetrics::SimilarityReport similarity;
  // Present when search evaluation ran.
  std::optional<search::SampleSearchOutcome> outcome;
};

struct Aggregates {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  double levenshtein_ratio = 0.0;
  std::optional<search::SearchMetrics> search;
};

// Means over a fold's detail rows. Search metrics only when every row has
// an outcome.
Aggregates AggregateRows(std::span<const DetailRow> rows, int k);
// Component-wise mean; search present only if present in every input.
Aggregates MeanAggregates(std::span<const Aggregates> parts);

struct Cell {
  Method method = Method::kVerbatim;
  std::optional<std::string> template_id;
  std::vector<Aggregates> per_fold;
  Aggregates mean;
  std::vector<DetailRow> rows;
  std::optional<std::string> error;

  std::string Label() const;
  bool ok() const { return !error.has_value(); }
};

struct MeanAndError {
  double mean = 0.0;
  // Sample standard deviation over sqrt(n); absent for n < 2.
  std::optional<double> standard_error;
};

MeanAndError Summarize(std::span<const double> values);

struct SensitivitySummary {
  Method method = Method::kVerbatim;
  // Restricted summaries drop no-prompt and short-prefix templates.
  bool restricted = false;
  std::size_t template_count = 0;
  std::map<std::string, MeanAndError> metrics;
};

struct CorrelationEntry {
  std::string similarity_metric;  // rouge1, rouge2, rougeL
  std::string search_metric;      // fa_pct, fm_pct, fo_pct, mrr
  std::optional<double> value;    // absent when undefined
  std::string note;
};

struct OverlapTable {
  std::string label_a;
  std::string label_b;
  std::size_t both = 0;
  std::size_t a_only = 0;
  std::size_t b_only = 0;
  std::size_t neither = 0;

  std::size_t a_found() const { return both + a_only; }
  std::size_t b_found() const { return both + b_only; }
  std::size_t total() const { return both + a_only + b_only + neither; }
};

// 2x2 contingency of "found" (per `rule`) between two methods evaluated on
// the same samples. Throws Error when the sample sets differ.
OverlapTable Overlap(std::span<const search::SampleSearchOutcome> a,
                     std::span<const search::SampleSearchOutcome> b,
                     search::FoundRule rule = search::FoundRule::kMajority,
                     std::string label_a = "a", std::string label_b = "b");

struct EnsembleResult {
  std::string label;
  std::map<Method, int> priorities;
  std::vector<search::SearchMetrics> per_fold;
  std::optional<search::SearchMetrics> mean;
  std::vector<search::SampleSearchOutcome> outcomes;
  std::optional<std::string> error;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::size_t> fold_sizes;
  std::vector<Cell> cells;
  std::vector<SensitivitySummary> sensitivity;
  std::vector<CorrelationEntry> correlations;
  std::vector<OverlapTable> overlaps;
  std::vector<EnsembleResult> ensembles;
  std::map<ErrorCategory, std::size_t> error_tallies;
  std::size_t error_label_total = 0;
  bool search_enabled = false;

  // Best cell per method by FM% (then MRR, then R-2), nullptr if none ok.
  const Cell* BestCell(Method method) const;
};

// Correlates each Rouge variant with each search metric across the cells
// that have both.
std::vector<CorrelationEntry> CorrelationReport(std::span<const Cell> cells);

ExperimentReport RunExperiment(const ExperimentConfig& config);

// Machine-readable report; stable key order, no timestamps.
nlohmann::ordered_json ReportJson(const ExperimentReport& report);
// Aligned plain-text tables.
std::string ReportText(const ExperimentReport& report);
std::string ReportTextFromJson(const nlohmann::ordered_json& report);

// Writes report.json and report.txt into `dir`.
void WriteReport(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace eqk::harness
