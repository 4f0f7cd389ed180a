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

#include <gtest/gtest.h>

#include "eqk/error.h"
#include "fewshot_fixtures.h"
#include "test_util.h"

namespace eqk::promptgen {
namespace {

using testing::EchoBackend;
using testing::FiveRecords;
using testing::OracleRanking;
using testing::OracleTop3;
using testing::Record;

std::vector<std::string> Ids(const FewShotSelection& s) {
  std::vector<std::string> ids;
  for (const auto& e : s.examples) ids.push_back(e.source_claim_id);
  return ids;
}

TEST(FewShot, MatchesBruteForceOnFiveRecords) {
  const auto train = FiveRecords();
  for (const char* id : {"no-prompt", "template-05", "template-01", "template-11"}) {
    const auto& tpl = FindTemplate(id);
    EchoBackend backend(train, tpl);
    const auto selection = SelectFewShotExamples(train, backend, tpl);
    EXPECT_EQ(Ids(selection), OracleTop3(train)) << id;
    EXPECT_EQ(backend.calls.load(), 5 * 4);
    ASSERT_EQ(selection.scores.size(), 5u);
    EXPECT_EQ(selection.examples[0].target_query,
              train[std::stoi(Ids(selection)[0].substr(1)) - 1].target_query);
  }
  // The three oecd queries resemble each other most.
  EXPECT_EQ(OracleTop3(FiveRecords()),
            (std::vector<std::string>{"r1", "r3", "r5"}));
}

TEST(FewShot, TooFewRecords) {
  auto train = FiveRecords();
  train.resize(3);
  const auto& tpl = FindTemplate("template-05");
  EchoBackend backend(train, tpl);
  EXPECT_THROW(SelectFewShotExamples(train, backend, tpl), std::invalid_argument);
}

TEST(FewShot, TiesGoToSmallerClaimId) {
  // Identical target queries give identical scores for all candidates.
  std::vector<corpus::ClaimRecord> train = {
      Record("d", "Four.", "same query"), Record("b", "Two.", "same query"),
      Record("c", "Three.", "same query"), Record("a", "One.", "same query")};
  const auto& tpl = FindTemplate("no-prompt");
  EchoBackend backend(train, tpl);
  EXPECT_EQ(Ids(SelectFewShotExamples(train, backend, tpl)),
            (std::vector<std::string>{"a", "b", "c"}));
}

// Fails every call whose prompt uses `bad` as the example.
class FailingFor : public EchoBackend {
 public:
  FailingFor(std::vector<corpus::ClaimRecord> train, PromptTemplate tpl,
             std::string bad_text)
      : EchoBackend(std::move(train), std::move(tpl)), bad_(std::move(bad_text)) {}
  GenerationResult Complete(const std::string& input,
                            const GenerationParams& p) override {
    if (input.rfind(bad_, 0) == 0) throw BackendError("down", false);
    return EchoBackend::Complete(input, p);
  }

 private:
  std::string bad_;
};

TEST(FewShot, FailingCandidateIsExcluded) {
  const auto train = FiveRecords();
  const auto& tpl = FindTemplate("no-prompt");
  FailingFor backend(train, tpl, train[0].claim_text);
  FewShotOptions options;
  options.retry.max_attempts = 1;
  const auto selection = SelectFewShotExamples(train, backend, tpl, options);
  EXPECT_TRUE(selection.scores[0].failed);
  auto expected = OracleRanking(train);
  std::erase(expected, "r1");
  expected.resize(3);
  EXPECT_EQ(Ids(selection), expected);
}

TEST(FewShot, ParallelMatchesSequential) {
  const auto train = FiveRecords();
  const auto& tpl = FindTemplate("template-07");
  EchoBackend a(train, tpl), b(train, tpl);
  FewShotOptions options;
  options.max_in_flight = 3;
  const auto seq = SelectFewShotExamples(train, a, tpl);
  const auto par = SelectFewShotExamples(train, b, tpl, options);
  EXPECT_EQ(seq.examples, par.examples);
  EXPECT_EQ(seq.scores, par.scores);
}

TEST(FewShot, CheckpointResumesWithoutBackendCalls) {
  testing::TempDir dir;
  const auto train = FiveRecords();
  const auto& tpl = FindTemplate("template-05");
  FewShotOptions options;
  options.checkpoint = dir / "progress.jsonl";
  EchoBackend first(train, tpl);
  const auto a = SelectFewShotExamples(train, first, tpl, options);
  EXPECT_EQ(first.calls.load(), 20);

  EchoBackend second(train, tpl);
  const auto b = SelectFewShotExamples(train, second, tpl, options);
  EXPECT_EQ(second.calls.load(), 0);
  EXPECT_EQ(a.examples, b.examples);

  // A different template does not reuse the progress file.
  const auto& other = FindTemplate("template-06");
  EchoBackend third(train, other);
  SelectFewShotExamples(train, third, other, options);
  EXPECT_EQ(third.calls.load(), 20);
}

}  // namespace
}  // namespace eqk::promptgen
