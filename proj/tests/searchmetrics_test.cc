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

#include "eqk/searchmetrics.h"

#include <random>

#include <gtest/gtest.h>

#include "eqk/error.h"
#include "eqk/json_io.h"
#include "metrics_fixtures.h"

namespace eqk::search {
namespace {

using testing::OutcomeWithRanks;
constexpr std::nullopt_t kAbsent = std::nullopt;

TEST(MakeOutcome, FlagsAndRanks) {
  const auto o = OutcomeWithRanks("c", {2, kAbsent, 1});
  EXPECT_EQ(o.target_found_per_list, (std::vector<bool>{true, false, true}));
  EXPECT_EQ(o.best_rank_per_list, (std::vector<std::optional<int>>{2, kAbsent, 1}));
  EXPECT_EQ(o.found_count(), 2u);
}

TEST(MakeOutcome, NormalizedVersusStrict) {
  ResultList l;
  l.urls = {"http://www.oecd.org/x/"};
  EXPECT_TRUE(MakeOutcome("c", "m", "https://oecd.org/x", {l}).target_found_per_list[0]);
  EXPECT_FALSE(MakeOutcome("c", "m", "https://oecd.org/x", {l}, UrlMatch::kStrict)
                   .target_found_per_list[0]);
}

TEST(FoundMetrics, SingleSampleDefinitions) {
  const std::vector<SampleSearchOutcome> all = {OutcomeWithRanks("a", {1, 3, 2})};
  const auto m = FoundMetrics(all);
  EXPECT_EQ(m.fa_pct, 100.0);
  EXPECT_EQ(m.fm_pct, 100.0);
  EXPECT_EQ(m.fo_pct, 100.0);

  const std::vector<SampleSearchOutcome> two = {OutcomeWithRanks("a", {1, kAbsent, 2})};
  const auto m2 = FoundMetrics(two);
  EXPECT_EQ(m2.fa_pct, 0.0);
  EXPECT_EQ(m2.fm_pct, 100.0);
  EXPECT_EQ(m2.fo_pct, 100.0);

  const std::vector<SampleSearchOutcome> one = {OutcomeWithRanks("a", {kAbsent, kAbsent, 4})};
  const auto m1 = FoundMetrics(one);
  EXPECT_EQ(m1.fm_pct, 0.0);
  EXPECT_EQ(m1.fo_pct, 100.0);
}

TEST(FoundMetrics, MixedSamples) {
  const std::vector<SampleSearchOutcome> outcomes = {
      OutcomeWithRanks("a", {1, 1, 1}), OutcomeWithRanks("b", {1, kAbsent, 1}),
      OutcomeWithRanks("c", {kAbsent, kAbsent, 5}),
      OutcomeWithRanks("d", {kAbsent, kAbsent, kAbsent})};
  const auto m = FoundMetrics(outcomes);
  EXPECT_EQ(m.fa_pct, 25.0);
  EXPECT_EQ(m.fm_pct, 50.0);
  EXPECT_EQ(m.fo_pct, 75.0);
}

TEST(Majority, Threshold) {
  EXPECT_EQ(MajorityThreshold(1), 1);
  EXPECT_EQ(MajorityThreshold(2), 2);
  EXPECT_EQ(MajorityThreshold(3), 2);
  EXPECT_EQ(MajorityThreshold(4), 3);
  EXPECT_EQ(MajorityThreshold(12), 7);
}

TEST(Mrr, HandComputedCases) {
  const std::vector<SampleSearchOutcome> top = {OutcomeWithRanks("a", {1, 1, 1})};
  EXPECT_EQ(MrrAtK(top, 10), 1.0);
  const std::vector<SampleSearchOutcome> sixth = {
      OutcomeWithRanks("a", {2, kAbsent, kAbsent})};
  EXPECT_DOUBLE_EQ(MrrAtK(sixth, 10), 1.0 / 6.0);
  const std::vector<SampleSearchOutcome> half = {
      OutcomeWithRanks("a", {1, 1, 1}),
      OutcomeWithRanks("b", {kAbsent, kAbsent, kAbsent})};
  EXPECT_EQ(MrrAtK(half, 10), 0.5);
}

TEST(Mrr, RanksBeyondKContributeNothing) {
  const std::vector<SampleSearchOutcome> o = {OutcomeWithRanks("a", {4, 2, 1})};
  EXPECT_DOUBLE_EQ(MrrAtK(o, 3), (0.0 + 0.5 + 1.0) / 3);
  EXPECT_DOUBLE_EQ(MrrAtK(o, 10), (0.25 + 0.5 + 1.0) / 3);
  EXPECT_THROW(MrrAtK(o, 0), std::invalid_argument);
}

TEST(SearchMetrics, RejectsEmptyAndMismatchedN) {
  EXPECT_THROW(FoundMetrics({}), MetricError);
  const std::vector<SampleSearchOutcome> mixed = {OutcomeWithRanks("a", {1, 1, 1}),
                                                  OutcomeWithRanks("b", {1, 1})};
  EXPECT_THROW(FoundMetrics(mixed), MetricError);
  EXPECT_THROW(MrrAtK(mixed, 10), MetricError);
}

TEST(SearchMetrics, RandomizedOrderingAndBounds) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> rank(0, 12);
  std::uniform_int_distribution<int> size(1, 30);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SampleSearchOutcome> outcomes;
    const int n = 1 + trial % 5;
    for (int s = size(rng); s > 0; --s) {
      std::vector<std::optional<int>> ranks;
      for (int e = 0; e < n; ++e) {
        const int r = rank(rng);
        ranks.push_back(r == 0 || r > 10 ? std::optional<int>() : r);
      }
      outcomes.push_back(OutcomeWithRanks("s" + std::to_string(s), ranks));
    }
    const auto m = EvaluateSearch(outcomes, 10);
    EXPECT_LE(m.fa_pct, m.fm_pct);
    EXPECT_LE(m.fm_pct, m.fo_pct);
    EXPECT_GE(m.fa_pct, 0.0);
    EXPECT_LE(m.fo_pct, 100.0);
    EXPECT_GE(m.mrr, 0.0);
    EXPECT_LE(m.mrr, 1.0);
  }
}

TEST(SearchMetrics, OutcomeJsonRoundTrip) {
  const auto o = OutcomeWithRanks("a", {2, kAbsent, 1});
  EXPECT_EQ(nlohmann::json(o).get<SampleSearchOutcome>(), o);
}

}  // namespace
}  // namespace eqk::search
