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

// Reference implementations used to cross-check the library. They are
// written for obviousness, not speed, and share no code with src/.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "eqk/method.h"
#include "eqk/search.h"

namespace eqk::oracle {

// ASCII-only tokenizer: lowercase letters, drop spaces/tabs/newlines.
inline std::vector<char> Tokens(const std::string& s) {
  std::vector<char> out;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
  return out;
}

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Prf FromOverlap(double overlap, double target_total, double gen_total) {
  Prf r;
  if (target_total == 0 || gen_total == 0) return r;
  r.precision = overlap / gen_total;
  r.recall = overlap / target_total;
  r.f1 = (r.precision + r.recall) == 0
             ? 0.0
             : 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

// Multiset intersection by sorting both n-gram lists and merging.
inline Prf RougeN(const std::string& target, const std::string& generated,
                  std::size_t n) {
  const auto t = Tokens(target);
  const auto g = Tokens(generated);
  auto grams = [n](const std::vector<char>& toks) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      out.emplace_back(toks.begin() + i, toks.begin() + i + n);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto tg = grams(t);
  const auto gg = grams(g);
  std::vector<std::string> common;
  std::set_intersection(tg.begin(), tg.end(), gg.begin(), gg.end(),
                        std::back_inserter(common));
  return FromOverlap(static_cast<double>(common.size()),
                     static_cast<double>(tg.size()),
                     static_cast<double>(gg.size()));
}

// Full (m+1)x(n+1) LCS table.
inline std::size_t Lcs(const std::vector<char>& a, const std::vector<char>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1
                                     : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

inline Prf RougeL(const std::string& target, const std::string& generated) {
  const auto t = Tokens(target);
  const auto g = Tokens(generated);
  return FromOverlap(static_cast<double>(Lcs(t, g)), static_cast<double>(t.size()),
                     static_cast<double>(g.size()));
}

// Full DP matrix over bytes (callers pass ASCII).
inline std::size_t Levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[a.size()][b.size()];
}

inline double LevenshteinRatio(const std::string& a, const std::string& b) {
  const std::size_t m = std::max(a.size(), b.size());
  if (m == 0) return 1.0;
  return 1.0 - static_cast<double>(Levenshtein(a, b)) / static_cast<double>(m);
}

// cov(x, y) / (sd(x) sd(y)) from the textbook sums.
inline double Pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return cov / std::sqrt(vx * vy);
}

// Borda by explicit point summation. Lists are de-duplicated (first
// occurrence kept) before ranks are assigned; URLs are compared as given.
struct BordaInput {
  int priority = 1;
  std::vector<std::vector<std::string>> lists;
};

inline std::vector<std::pair<std::string, double>> Borda(
    const std::vector<BordaInput>& methods, int k) {
  std::set<std::string> universe;
  for (const auto& m : methods) {
    for (const auto& l : m.lists) universe.insert(l.begin(), l.end());
  }
  auto dedup = [](const std::vector<std::string>& l) {
    std::vector<std::string> out;
    for (const auto& u : l) {
      if (std::find(out.begin(), out.end(), u) == out.end()) out.push_back(u);
    }
    return out;
  };
  struct Row {
    std::string url;
    double points = 0;
    int priority = 1 << 30;
    int rank = 1 << 30;
  };
  std::vector<Row> rows;
  for (const auto& url : universe) {
    Row row{url};
    for (const auto& m : methods) {
      int best = 1 << 30;
      for (const auto& l : m.lists) {
        const auto d = dedup(l);
        for (int r = 1; r <= static_cast<int>(d.size()); ++r) {
          if (d[r - 1] == url && r <= k) {
            row.points += k - r + 1;
            best = std::min(best, r);
          }
        }
      }
      if (best != (1 << 30) && m.priority < row.priority) {
        row.priority = m.priority;
        row.rank = best;
      }
    }
    if (row.points > 0) rows.push_back(row);
  }
  // Selection by repeated maximum instead of a comparator sort.
  auto better = [](const Row& a, const Row& b) {
    if (a.points != b.points) return a.points > b.points;
    if (a.priority != b.priority) return a.priority < b.priority;
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.url < b.url;
  };
  std::vector<std::pair<std::string, double>> out;
  while (!rows.empty() && static_cast<int>(out.size()) < k) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (better(rows[i], rows[best])) best = i;
    }
    out.emplace_back(rows[best].url, rows[best].points);
    rows.erase(rows.begin() + static_cast<long>(best));
  }
  return out;
}

// Random ASCII string over a small alphabet (so overlaps are common).
inline std::string RandomText(std::mt19937_64& rng, std::size_t max_len,
                              const std::string& alphabet = "abcdeAB ") {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s(len(rng), ' ');
  for (char& c : s) c = alphabet[pick(rng)];
  return s;
}

}  // namespace eqk::oracle
