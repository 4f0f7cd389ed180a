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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

// Query similarity metrics: character-level Rouge, Levenshtein distance and
// ratio, and Pearson correlation between metric series.
namespace eqk::textmetrics {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore FromCounts(std::size_t matches, std::size_t target_total,
                               std::size_t generated_total);
  bool operator==(const RougeScore&) const = default;
};

struct SimilarityReport {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
  std::size_t levenshtein_distance = 0;
  double levenshtein_ratio = 1.0;
};

// Lowercases and drops whitespace; one token per remaining scalar value.
std::u32string CharTokenize(std::string_view text);

// Clipped n-gram overlap on character tokens, n in {1, 2}.
RougeScore RougeN(std::string_view target, std::string_view generated, int n);
// Longest-common-subsequence Rouge on character tokens.
RougeScore RougeL(std::string_view target, std::string_view generated);

// Unit-cost edit distance over Unicode scalar values, no normalization.
std::size_t Levenshtein(std::string_view a, std::string_view b);
std::size_t Levenshtein(std::u32string_view a, std::u32string_view b);
// 1 - d / max(|a|, |b|); two empty strings score 1.
double LevenshteinRatio(std::string_view a, std::string_view b);

SimilarityReport Similarity(std::string_view target, std::string_view generated);

// Sample Pearson correlation. Throws MetricError on length mismatch, fewer
// than two points, or a constant series.
double Pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace eqk::textmetrics
