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

#include "eqk/textmetrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "eqk/error.h"
#include "eqk/unicode.h"

namespace eqk::textmetrics {
namespace {

using NgramCounts = std::map<std::u32string_view, std::size_t>;

NgramCounts CountNgrams(std::u32string_view tokens, int n) {
  NgramCounts counts;
  const auto width = static_cast<std::size_t>(n);
  if (tokens.size() < width) return counts;
  for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
    ++counts[tokens.substr(i, width)];
  }
  return counts;
}

std::size_t LcsLength(std::u32string_view a, std::u32string_view b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

RougeScore RougeScore::FromCounts(std::size_t matches, std::size_t target_total,
                                  std::size_t generated_total) {
  RougeScore score;
  if (target_total == 0 || generated_total == 0) return score;
  score.precision = static_cast<double>(matches) / generated_total;
  score.recall = static_cast<double>(matches) / target_total;
  const double sum = score.precision + score.recall;
  score.f1 = sum > 0.0 ? 2.0 * score.precision * score.recall / sum : 0.0;
  return score;
}

std::u32string CharTokenize(std::string_view text) {
  std::u32string tokens;
  for (char32_t c : unicode::Decode(text)) {
    if (!unicode::IsSpace(c)) tokens.push_back(unicode::ToLower(c));
  }
  return tokens;
}

RougeScore RougeN(std::string_view target, std::string_view generated, int n) {
  if (n != 1 && n != 2) {
    throw std::invalid_argument("rouge n must be 1 or 2");
  }
  const std::u32string t = CharTokenize(target);
  const std::u32string g = CharTokenize(generated);
  const NgramCounts tc = CountNgrams(t, n);
  const NgramCounts gc = CountNgrams(g, n);
  std::size_t matches = 0, t_total = 0, g_total = 0;
  for (const auto& [gram, count] : tc) {
    t_total += count;
    if (auto it = gc.find(gram); it != gc.end()) {
      matches += std::min(count, it->second);
    }
  }
  for (const auto& [gram, count] : gc) g_total += count;
  return RougeScore::FromCounts(matches, t_total, g_total);
}

RougeScore RougeL(std::string_view target, std::string_view generated) {
  const std::u32string t = CharTokenize(target);
  const std::u32string g = CharTokenize(generated);
  return RougeScore::FromCounts(LcsLength(t, g), t.size(), g.size());
}

std::size_t Levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = above;
    }
  }
  return row[b.size()];
}

std::size_t Levenshtein(std::string_view a, std::string_view b) {
  return Levenshtein(unicode::Decode(a), unicode::Decode(b));
}

double LevenshteinRatio(std::string_view a, std::string_view b) {
  const std::u32string da = unicode::Decode(a);
  const std::u32string db = unicode::Decode(b);
  const std::size_t longest = std::max(da.size(), db.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(Levenshtein(da, db)) / longest;
}

SimilarityReport Similarity(std::string_view target,
                            std::string_view generated) {
  SimilarityReport report;
  report.rouge1 = RougeN(target, generated, 1);
  report.rouge2 = RougeN(target, generated, 2);
  report.rougeL = RougeL(target, generated);
  report.levenshtein_distance = Levenshtein(target, generated);
  report.levenshtein_ratio = LevenshteinRatio(target, generated);
  return report;
}

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw MetricError("pearson: series lengths differ (" +
                      std::to_string(xs.size()) + " vs " +
                      std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 2) throw MetricError("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw MetricError("pearson: constant series, correlation undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace eqk::textmetrics
