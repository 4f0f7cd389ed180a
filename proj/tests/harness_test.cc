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

#include "eqk/harness.h"

#include <chrono>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "eqk/corpus.h"
#include "eqk/error.h"
#include "metrics_fixtures.h"
#include "oracles.h"
#include "test_util.h"

namespace eqk::harness {
namespace {

using nlohmann::json;
using testing::OutcomeWithRanks;
using testing::TempDir;

const std::filesystem::path kFixture = EQK_FIXTURE_DIR;

// Mock script answering each claim's verbatim query with `make(target)`.
std::filesystem::path VerbatimScript(
    const TempDir& dir,
    const std::function<std::vector<std::string>(const std::string&)>& make) {
  const auto dataset = corpus::LoadDataset(kFixture / "claims.jsonl");
  json queries = json::object();
  for (const auto& r : dataset.records) {
    queries[r.claim_text] = json::array({make(r.target_url)});
  }
  const auto path = dir / "script.json";
  std::ofstream(path) << json{{"engine_id", "mock"}, {"queries", queries}}.dump();
  return path;
}

ExperimentConfig VerbatimConfig(const std::filesystem::path& script) {
  ExperimentConfig c;
  c.dataset_path = kFixture / "claims.jsonl";
  c.methods = {Method::kVerbatim};
  c.engine = EngineKind::kMock;
  c.mock_script = script;
  c.folds = 4;
  return c;
}

TEST(RunExperiment, TargetAtRankOneEverywhere) {
  TempDir dir;
  const auto config = VerbatimConfig(
      VerbatimScript(dir, [](const std::string& t) {
        return std::vector<std::string>{t, "https://other.org"};
      }));
  const auto report = RunExperiment(config);
  ASSERT_EQ(report.cells.size(), 1u);
  const auto& s = *report.cells[0].mean.search;
  EXPECT_EQ(s.fa_pct, 100.0);
  EXPECT_EQ(s.fm_pct, 100.0);
  EXPECT_EQ(s.fo_pct, 100.0);
  EXPECT_EQ(s.mrr, 1.0);
  EXPECT_EQ(report.cells[0].rows.size(), 20u);
  // Verbatim query versus target query: never identical on this fixture.
  EXPECT_LT(report.cells[0].mean.rouge1, 1.0);
}

TEST(RunExperiment, TargetAtRankTwoGivesHalfMrr) {
  TempDir dir;
  const auto config = VerbatimConfig(
      VerbatimScript(dir, [](const std::string& t) {
        return std::vector<std::string>{"https://other.org", t};
      }));
  const auto report = RunExperiment(config);
  EXPECT_EQ(report.cells[0].mean.search->mrr, 0.5);
  EXPECT_EQ(report.cells[0].mean.search->fa_pct, 100.0);
}

TEST(RunExperiment, FixtureRunIsByteIdenticalAndFast) {
  const auto start = std::chrono::steady_clock::now();
  const auto config = LoadConfig(kFixture / "experiment.ini");
  const std::string a = ReportJson(RunExperiment(config)).dump(2);
  const std::string b = ReportJson(RunExperiment(config)).dump(2);
  EXPECT_EQ(a, b);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(60));
}

TEST(RunExperiment, ReportStructure) {
  const auto report = RunExperiment(LoadConfig(kFixture / "experiment.ini"));
  EXPECT_TRUE(report.search_enabled);
  EXPECT_EQ(report.fold_sizes.size(), 4u);
  // 3 rule-based + 13 zero-shot + 13 one-shot + 13 three-shot + 1 fine-tuned.
  EXPECT_EQ(report.cells.size(), 43u);
  for (const auto& c : report.cells) {
    EXPECT_TRUE(c.ok()) << c.Label() << ": " << c.error.value_or("");
    EXPECT_EQ(c.per_fold.size(), 4u);
    EXPECT_EQ(c.rows.size(), 20u);
  }
  EXPECT_EQ(report.correlations.size(), 12u);
  EXPECT_EQ(report.ensembles.size(), 2u);
  EXPECT_EQ(report.error_label_total, 6u);
  EXPECT_EQ(report.ensembles[0].label, "ensemble(verbatim+named_entities)");
  EXPECT_TRUE(report.ensembles[0].mean.has_value());
  ASSERT_NE(report.BestCell(Method::kZeroShot), nullptr);

  const auto j = ReportJson(report);
  EXPECT_EQ(j.at("samples").size(), 43u * 20u);
  EXPECT_EQ(j.at("trainer_config").at("optimizer"), "adafactor");
  const std::string text = ReportText(report);
  EXPECT_EQ(text, ReportTextFromJson(j));
  EXPECT_NE(text.find("zero_shot/template-05"), std::string::npos);
  EXPECT_NE(text.find("Borda"), std::string::npos);

  TempDir dir;
  WriteReport(report, dir.path() / "out");
  EXPECT_EQ(testing::ReadFile(dir.path() / "out" / "report.txt"), text);
  EXPECT_EQ(json::parse(testing::ReadFile(dir.path() / "out" / "report.json")),
            json::parse(j.dump()));
}

TEST(RunExperiment, SensitivityRestrictedDropsPrefixAndNoPrompt) {
  const auto report = RunExperiment(LoadConfig(kFixture / "experiment.ini"));
  bool saw = false;
  for (const auto& s : report.sensitivity) {
    if (s.method != Method::kZeroShot) continue;
    EXPECT_EQ(s.template_count, s.restricted ? 8u : 13u);
    EXPECT_TRUE(s.metrics.contains("rouge2"));
    EXPECT_TRUE(s.metrics.at("rouge2").standard_error.has_value());
    saw = true;
  }
  EXPECT_TRUE(saw);
}

TEST(RunExperiment, BackendFailureIsConfinedToItsCell) {
  ExperimentConfig c;
  c.dataset_path = kFixture / "claims.jsonl";
  c.methods = {Method::kVerbatim, Method::kZeroShot};
  c.backend = BackendKind::kHttp;
  c.http.base_url = "http://127.0.0.1:9";
  c.http.timeout_seconds = 1;
  c.retry.max_attempts = 1;
  const auto report = RunExperiment(c);
  ASSERT_EQ(report.cells.size(), 2u);
  EXPECT_TRUE(report.cells[0].ok());
  EXPECT_FALSE(report.cells[1].ok());
  EXPECT_FALSE(report.search_enabled);
  EXPECT_FALSE(report.cells[0].mean.search.has_value());
  const auto j = ReportJson(report);
  EXPECT_TRUE(j.at("cells")[1].at("mean").is_null());
  EXPECT_FALSE(j.at("cells")[1].at("error").is_null());
}

TEST(RunExperiment, RuleMethodsNeedAnnotations) {
  ExperimentConfig c;
  c.dataset_path = kFixture / "claims.jsonl";
  c.methods = {Method::kNamedEntities};
  EXPECT_THROW(RunExperiment(c), ConfigError);
}

TEST(Config, LoadsFixture) {
  const auto c = LoadConfig(kFixture / "experiment.ini");
  EXPECT_EQ(c.dataset_path, kFixture / "claims.jsonl");
  EXPECT_EQ(c.methods.size(), 7u);
  EXPECT_EQ(c.folds, 4);
  EXPECT_EQ(c.seed, 13u);
  EXPECT_EQ(c.engine, EngineKind::kMock);
  EXPECT_EQ(c.executions, 3);
  EXPECT_EQ(c.results_k, 10);
  EXPECT_EQ(c.TemplatesFor(Method::kZeroShot).size(), 13u);
  EXPECT_EQ(c.TemplatesFor(Method::kFineTuned),
            std::vector<std::string>{"template-05"});
  EXPECT_EQ(c.params, promptgen::GenerationParams{});
  ASSERT_EQ(c.ensembles.size(), 2u);
  EXPECT_EQ(c.ensembles[1].priorities.at(Method::kFineTuned), 5);
  EXPECT_EQ(c.trainer.epochs, 10);
  EXPECT_DOUBLE_EQ(c.trainer.learning_rate, 1e-3);
}

TEST(Config, RejectsBadValues) {
  TempDir dir;
  auto load = [&](const std::string& text) {
    testing::WriteFile(dir / "c.ini", text);
    return LoadConfig(dir / "c.ini");
  };
  const std::string base = "[experiment]\ndataset = d.jsonl\n";
  EXPECT_NO_THROW(load(base + "methods = verbatim\n"));
  EXPECT_THROW(load(base + "methods = verbatim, telepathy\n"), ConfigError);
  EXPECT_THROW(load(base + "methods = verbatim\nfolds = many\n"), ConfigError);
  EXPECT_THROW(load(base + "methods = verbatim\nfolds = 1\n"), ConfigError);
  EXPECT_THROW(load(base + "methods = verbatim\n[search]\nengine = altavista\n"),
               ConfigError);
  EXPECT_THROW(load(base + "methods = verbatim\n[search]\nengine = mock\n"),
               ConfigError);
  EXPECT_THROW(load(base + "methods = verbatim, ne\n[ensemble]\n"
                    "combinations = verbatim+ne\npriorities = verbatim:1\n"),
               ConfigError);
  EXPECT_THROW(load(base + "methods = verbatim, ne\n[ensemble]\n"
                    "combinations = verbatim+ne\npriorities = verbatim:x, ne:2\n"),
               ConfigError);
  EXPECT_THROW(load(base + "methods = zero_shot\ntemplates = template-99\n"),
               ConfigError);
  EXPECT_THROW(load("not an ini [[[\n"), ConfigError);
}

TEST(TrainerConfig, Stanza) {
  const auto j = TrainerConfigJson(TrainerConfig{}, promptgen::GenerationParams{});
  EXPECT_EQ(j.at("optimizer"), "adafactor");
  EXPECT_EQ(j.at("learning_rate"), 1e-3);
  EXPECT_EQ(j.at("epochs"), 10);
  EXPECT_EQ(j.at("max_input_length"), 512);
  EXPECT_EQ(j.at("validation_fraction"), 0.15);
  EXPECT_EQ(j.at("generation").at("num_beams"), 10);
  EXPECT_EQ(j.at("generation").at("no_repeat_ngram_size"), 2);
  EXPECT_EQ(j.at("generation").at("early_stopping"), true);
  EXPECT_EQ(j.at("generation").at("max_new_tokens"), 16);
}

TEST(Overlap, DisjointFoundSets) {
  std::vector<search::SampleSearchOutcome> ne, ft;
  for (int i = 0; i < 10; ++i) {
    const std::string id = "s" + std::to_string(i);
    const bool in_ne = i < 2;
    const bool in_ft = i >= 2 && i < 5;
    ne.push_back(OutcomeWithRanks(id, {in_ne ? std::optional<int>(1) : std::nullopt}));
    ft.push_back(OutcomeWithRanks(id, {in_ft ? std::optional<int>(1) : std::nullopt}));
  }
  const auto t = Overlap(ne, ft, search::FoundRule::kMajority, "ne", "ft");
  EXPECT_EQ(t.both, 0u);
  EXPECT_EQ(t.b_only, 3u);
  EXPECT_EQ(t.a_only, 2u);
  EXPECT_EQ(t.neither, 5u);
  EXPECT_EQ(t.total(), 10u);

  const auto self = Overlap(ne, ne);
  EXPECT_EQ(self.a_only, 0u);
  EXPECT_EQ(self.b_only, 0u);
  EXPECT_EQ(self.both, 2u);

  ft.pop_back();
  EXPECT_THROW(Overlap(ne, ft), Error);
}

TEST(Summarize, MeanAndStandardError) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto s = Summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  // Sample SD sqrt(5/3), over sqrt(4).
  EXPECT_DOUBLE_EQ(*s.standard_error, std::sqrt(5.0 / 3.0) / 2.0);
  const std::vector<double> one = {7};
  EXPECT_FALSE(Summarize(one).standard_error.has_value());
}

Cell CellWith(double r1, double r2, double rl, search::SearchMetrics m) {
  Cell c;
  c.mean.rouge1 = r1;
  c.mean.rouge2 = r2;
  c.mean.rougeL = rl;
  c.mean.search = m;
  return c;
}

TEST(Correlation, AffineGivesOne) {
  std::vector<Cell> cells;
  for (int i = 0; i < 5; ++i) {
    const double fm = 10.0 * i + 3;
    cells.push_back(CellWith(0.1 * i, 0.02 * fm + 0.1, 0.3, {fm / 2, fm, fm + 1, fm / 100}));
  }
  const auto entries = CorrelationReport(cells);
  for (const auto& e : entries) {
    if (e.similarity_metric == "rouge2" && e.search_metric == "fm_pct") {
      EXPECT_NEAR(*e.value, 1.0, 1e-12);
    }
    if (e.similarity_metric == "rougeL") {
      EXPECT_FALSE(e.value.has_value());  // constant series
      EXPECT_FALSE(e.note.empty());
    }
  }
}

TEST(Correlation, FiveCellsMatchOracle) {
  const std::vector<double> r2 = {0.12, 0.30, 0.25, 0.41, 0.19};
  const std::vector<double> fm = {20.0, 38.5, 30.1, 47.9, 31.0};
  std::vector<Cell> cells;
  for (int i = 0; i < 5; ++i) cells.push_back(CellWith(r2[i], r2[i], r2[i], {0, fm[i], 0, 0}));
  // A failed cell is ignored.
  Cell broken = CellWith(0.9, 0.9, 0.9, {0, 0, 0, 0});
  broken.error = "backend down";
  cells.push_back(broken);
  for (const auto& e : CorrelationReport(cells)) {
    if (e.search_metric == "fm_pct") {
      EXPECT_NEAR(*e.value, oracle::Pearson(r2, fm), 1e-12);
    }
  }
}

TEST(Aggregates, RowsAndMeans) {
  std::vector<DetailRow> rows(2);
  rows[0].similarity.rouge1.f1 = 0.2;
  rows[1].similarity.rouge1.f1 = 0.6;
  rows[0].similarity.levenshtein_ratio = 0.5;
  rows[1].similarity.levenshtein_ratio = 1.0;
  auto agg = AggregateRows(rows, 10);
  EXPECT_DOUBLE_EQ(agg.rouge1, 0.4);
  EXPECT_DOUBLE_EQ(agg.levenshtein_ratio, 0.75);
  EXPECT_FALSE(agg.search.has_value());

  rows[0].outcome = OutcomeWithRanks("a", {1, 1, 1});
  rows[1].outcome = OutcomeWithRanks("b", {std::nullopt, 2, std::nullopt});
  agg = AggregateRows(rows, 10);
  ASSERT_TRUE(agg.search.has_value());
  EXPECT_EQ(agg.search->fa_pct, 50.0);
  EXPECT_EQ(agg.search->fo_pct, 100.0);

  Aggregates other;
  other.rouge1 = 0.0;
  const std::vector<Aggregates> parts = {agg, other};
  const auto mean = MeanAggregates(parts);
  EXPECT_DOUBLE_EQ(mean.rouge1, 0.2);
  EXPECT_FALSE(mean.search.has_value());
}

TEST(ErrorLabels, LoadAndReject) {
  TempDir dir;
  const auto labels = LoadErrorLabels(kFixture / "error_labels.jsonl");
  EXPECT_EQ(labels.size(), 6u);
  EXPECT_EQ(labels[0].category, ErrorCategory::kMissingKeyTerm);
  testing::WriteFile(dir / "bad.jsonl", R"({"claim_id":"c1","category":"typo"})" "\n");
  EXPECT_THROW(LoadErrorLabels(dir / "bad.jsonl"), DatasetError);
  for (auto c : kErrorCategories) EXPECT_EQ(ParseErrorCategory(ErrorCategoryName(c)), c);
}

}  // namespace
}  // namespace eqk::harness
