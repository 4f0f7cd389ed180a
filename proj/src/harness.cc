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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>

#include <spdlog/spdlog.h>

#include "eqk/backend.h"
#include "eqk/corpus.h"
#include "eqk/ensemble.h"
#include "eqk/error.h"
#include "eqk/fewshot.h"
#include "eqk/rulegen.h"
#include "eqk/snapshot.h"
#include "eqk/templates.h"

namespace eqk::harness {

using nlohmann::json;

std::string_view ErrorCategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kMissingKeyTerm:
      return "missing_key_term";
    case ErrorCategory::kNeedsExternalContext:
      return "needs_external_context";
    case ErrorCategory::kWrongEntity:
      return "wrong_entity";
    case ErrorCategory::kHallucination:
      return "hallucination";
    case ErrorCategory::kRecreatedClaim:
      return "recreated_claim";
    case ErrorCategory::kQueryLooksGood:
      return "query_looks_good";
  }
  return "unknown";
}

std::optional<ErrorCategory> ParseErrorCategory(std::string_view name) {
  for (ErrorCategory c : kErrorCategories) {
    if (ErrorCategoryName(c) == name) return c;
  }
  return std::nullopt;
}

std::vector<ErrorLabel> LoadErrorLabels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open error labels " + path.string());
  std::vector<ErrorLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json row = json::parse(line);
      const auto name = row.at("category").get<std::string>();
      const auto category = ParseErrorCategory(name);
      if (!category) {
        throw DatasetError("unknown error category '" + name + "'", line_no);
      }
      labels.push_back({row.at("claim_id").get<std::string>(), *category,
                        row.value("note", std::string())});
    } catch (const json::exception& e) {
      throw DatasetError(std::string("malformed error label: ") + e.what(),
                         line_no);
    }
  }
  return labels;
}

Aggregates AggregateRows(std::span<const DetailRow> rows, int k) {
  Aggregates agg;
  if (rows.empty()) return agg;
  std::vector<search::SampleSearchOutcome> outcomes;
  for (const auto& row : rows) {
    agg.rouge1 += row.similarity.rouge1.f1;
    agg.rouge2 += row.similarity.rouge2.f1;
    agg.rougeL += row.similarity.rougeL.f1;
    agg.levenshtein_ratio += row.similarity.levenshtein_ratio;
    if (row.outcome) outcomes.push_back(*row.outcome);
  }
  const double n = static_cast<double>(rows.size());
  agg.rouge1 /= n;
  agg.rouge2 /= n;
  agg.rougeL /= n;
  agg.levenshtein_ratio /= n;
  if (outcomes.size() == rows.size()) {
    agg.search = search::EvaluateSearch(outcomes, k);
  }
  return agg;
}

Aggregates MeanAggregates(std::span<const Aggregates> parts) {
  Aggregates mean;
  if (parts.empty()) return mean;
  bool all_search = true;
  search::SearchMetrics sm;
  for (const auto& p : parts) {
    mean.rouge1 += p.rouge1;
    mean.rouge2 += p.rouge2;
    mean.rougeL += p.rougeL;
    mean.levenshtein_ratio += p.levenshtein_ratio;
    if (p.search) {
      sm.fa_pct += p.search->fa_pct;
      sm.fm_pct += p.search->fm_pct;
      sm.fo_pct += p.search->fo_pct;
      sm.mrr += p.search->mrr;
    } else {
      all_search = false;
    }
  }
  const double n = static_cast<double>(parts.size());
  mean.rouge1 /= n;
  mean.rouge2 /= n;
  mean.rougeL /= n;
  mean.levenshtein_ratio /= n;
  if (all_search) {
    sm.fa_pct /= n;
    sm.fm_pct /= n;
    sm.fo_pct /= n;
    sm.mrr /= n;
    mean.search = sm;
  }
  return mean;
}

std::string Cell::Label() const {
  std::string label(MethodName(method));
  if (template_id) label += "/" + *template_id;
  return label;
}

MeanAndError Summarize(std::span<const double> values) {
  MeanAndError out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

OverlapTable Overlap(std::span<const search::SampleSearchOutcome> a,
                     std::span<const search::SampleSearchOutcome> b,
                     search::FoundRule rule, std::string label_a,
                     std::string label_b) {
  std::map<std::string, bool> found_b;
  for (const auto& o : b) found_b[o.claim_id] = search::IsFound(o, rule);
  if (found_b.size() != b.size() || a.size() != b.size()) {
    throw Error("overlap: sample sets differ in size");
  }
  OverlapTable table;
  table.label_a = std::move(label_a);
  table.label_b = std::move(label_b);
  for (const auto& o : a) {
    auto it = found_b.find(o.claim_id);
    if (it == found_b.end()) {
      throw Error("overlap: sample " + o.claim_id + " missing from " +
                  table.label_b);
    }
    const bool fa = search::IsFound(o, rule);
    const bool fb = it->second;
    if (fa && fb) {
      ++table.both;
    } else if (fa) {
      ++table.a_only;
    } else if (fb) {
      ++table.b_only;
    } else {
      ++table.neither;
    }
  }
  return table;
}

const Cell* ExperimentReport::BestCell(Method method) const {
  const Cell* best = nullptr;
  auto key = [](const Cell& c) {
    const auto& s = c.mean.search;
    return std::array<double, 3>{s ? s->fm_pct : 0.0, s ? s->mrr : 0.0,
                                 c.mean.rouge2};
  };
  for (const auto& cell : cells) {
    if (cell.method != method || !cell.ok()) continue;
    if (best == nullptr || key(cell) > key(*best)) best = &cell;
  }
  return best;
}

std::vector<CorrelationEntry> CorrelationReport(std::span<const Cell> cells) {
  std::vector<const Cell*> points;
  for (const auto& c : cells) {
    if (c.ok() && c.mean.search) points.push_back(&c);
  }
  const std::array<std::pair<const char*, double Aggregates::*>, 3> sims = {{
      {"rouge1", &Aggregates::rouge1},
      {"rouge2", &Aggregates::rouge2},
      {"rougeL", &Aggregates::rougeL},
  }};
  const std::array<std::pair<const char*, double search::SearchMetrics::*>, 4>
      searches = {{
          {"fa_pct", &search::SearchMetrics::fa_pct},
          {"fm_pct", &search::SearchMetrics::fm_pct},
          {"fo_pct", &search::SearchMetrics::fo_pct},
          {"mrr", &search::SearchMetrics::mrr},
      }};
  std::vector<CorrelationEntry> out;
  for (const auto& [sim_name, sim] : sims) {
    for (const auto& [search_name, metric] : searches) {
      CorrelationEntry entry{sim_name, search_name, std::nullopt, ""};
      std::vector<double> xs, ys;
      for (const Cell* c : points) {
        xs.push_back(c->mean.*sim);
        ys.push_back((*c->mean.search).*metric);
      }
      try {
        entry.value = textmetrics::Pearson(xs, ys);
      } catch (const MetricError& e) {
        entry.note = e.what();
      }
      out.push_back(std::move(entry));
    }
  }
  return out;
}

namespace {

std::unique_ptr<promptgen::GenerationBackend> MakeBackend(
    const ExperimentConfig& config, std::optional<int> fine_tuned_fold) {
  if (config.backend == BackendKind::kStub) {
    if (config.stub_map) {
      return std::make_unique<promptgen::StubBackend>(
          promptgen::StubBackend::FromFile(*config.stub_map));
    }
    return std::make_unique<promptgen::StubBackend>();
  }
  promptgen::HttpBackendOptions options = config.http;
  if (fine_tuned_fold && config.fine_tuned_url) {
    std::string url = *config.fine_tuned_url;
    const std::string placeholder = "{fold}";
    for (auto pos = url.find(placeholder); pos != std::string::npos;
         pos = url.find(placeholder)) {
      url.replace(pos, placeholder.size(), std::to_string(*fine_tuned_fold));
    }
    options.base_url = url;
  }
  return std::make_unique<promptgen::HttpBackend>(options);
}

std::unique_ptr<search::SearchEngine> MakeEngine(const ExperimentConfig& config) {
  switch (config.engine) {
    case EngineKind::kNone:
      return nullptr;
    case EngineKind::kMock:
      return std::make_unique<search::MockEngine>(
          search::LoadMockScript(*config.mock_script));
    case EngineKind::kBing:
      return std::make_unique<search::BingEngine>(config.bing);
  }
  return nullptr;
}

struct CellSpec {
  Method method;
  std::optional<std::string> template_id;
};

class Runner {
 public:
  explicit Runner(const ExperimentConfig& config) : config_(config) {}

  ExperimentReport Run() {
    ExperimentReport report;
    report.config = config_;
    dataset_ = corpus::LoadDataset(config_.dataset_path);
    if (config_.annotations_path) {
      annotations_ = rulegen::IndexAnnotations(
          rulegen::LoadAnnotations(*config_.annotations_path), dataset_);
    }
    folds_ = corpus::SplitFolds(dataset_, config_.folds, config_.seed);
    report.fold_sizes = folds_.Sizes();
    for (int f = 0; f < config_.folds; ++f) {
      partitions_.push_back(corpus::FoldPartition(dataset_, folds_, f));
    }
    engine_ = MakeEngine(config_);
    report.search_enabled = engine_ != nullptr;
    if (config_.snapshot_dir) {
      store_ = std::make_unique<search::SnapshotStore>(*config_.snapshot_dir);
    }
    backend_ = MakeBackend(config_, std::nullopt);

    for (const CellSpec& spec : CellSpecs()) {
      report.cells.push_back(RunCell(spec));
    }
    report.sensitivity = Sensitivity(report.cells);
    if (report.search_enabled) {
      report.correlations = CorrelationReport(report.cells);
      report.overlaps = Overlaps(report);
    }
    for (const auto& spec : config_.ensembles) {
      report.ensembles.push_back(RunEnsemble(report, spec));
    }
    if (config_.error_labels_path) {
      for (ErrorCategory c : kErrorCategories) report.error_tallies[c] = 0;
      for (const auto& label : LoadErrorLabels(*config_.error_labels_path)) {
        ++report.error_tallies[label.category];
        ++report.error_label_total;
      }
    }
    return report;
  }

 private:
  std::vector<CellSpec> CellSpecs() const {
    std::vector<CellSpec> specs;
    for (Method m : config_.methods) {
      if (!UsesTemplate(m)) {
        specs.push_back({m, std::nullopt});
        continue;
      }
      for (const auto& id : config_.TemplatesFor(m)) specs.push_back({m, id});
    }
    return specs;
  }

  Cell RunCell(const CellSpec& spec) {
    Cell cell;
    cell.method = spec.method;
    cell.template_id = spec.template_id;
    try {
      for (int f = 0; f < config_.folds; ++f) {
        std::vector<DetailRow> rows = EvaluateFold(spec, f);
        cell.per_fold.push_back(AggregateRows(rows, config_.results_k));
        for (auto& row : rows) cell.rows.push_back(std::move(row));
      }
      cell.mean = MeanAggregates(cell.per_fold);
    } catch (const std::exception& e) {
      spdlog::error("cell {} failed: {}", cell.Label(), e.what());
      cell.error = e.what();
      cell.per_fold.clear();
      cell.rows.clear();
      cell.mean = Aggregates{};
    }
    return cell;
  }

  const std::vector<promptgen::InContextExample>& FewShotExamples(
      int fold, const promptgen::PromptTemplate& tpl) {
    const auto key = std::make_pair(fold, tpl.template_id);
    if (auto it = fewshot_cache_.find(key); it != fewshot_cache_.end()) {
      return it->second;
    }
    promptgen::FewShotOptions options;
    options.params = config_.params;
    options.retry = config_.retry;
    options.max_in_flight = config_.max_in_flight;
    if (config_.fewshot_checkpoint_dir) {
      std::filesystem::create_directories(*config_.fewshot_checkpoint_dir);
      options.checkpoint = *config_.fewshot_checkpoint_dir /
                           ("fold" + std::to_string(fold) + "_" +
                            tpl.template_id + ".jsonl");
    }
    auto selection = promptgen::SelectFewShotExamples(
        partitions_[fold].train, *backend_, tpl, options);
    return fewshot_cache_.emplace(key, std::move(selection.examples))
        .first->second;
  }

  promptgen::GenerationBackend& FineTunedBackend(int fold) {
    if (config_.backend != BackendKind::kHttp || !config_.fine_tuned_url) {
      return *backend_;
    }
    auto it = fine_tuned_.find(fold);
    if (it == fine_tuned_.end()) {
      it = fine_tuned_.emplace(fold, MakeBackend(config_, fold)).first;
    }
    return *it->second;
  }

  rulegen::GeneratedQuery GenerateQuery(const CellSpec& spec, int fold,
                                        const corpus::ClaimRecord& claim) {
    if (IsRuleBased(spec.method)) {
      const rulegen::LinguisticAnnotation* ann = nullptr;
      if (auto it = annotations_.find(claim.claim_id); it != annotations_.end()) {
        ann = &it->second;
      }
      if (ann == nullptr && spec.method != Method::kVerbatim) {
        // A claim the annotator skipped yields an empty query.
        return rulegen::MakeQuery(claim.claim_id, spec.method, std::nullopt, "");
      }
      return rulegen::Generate(spec.method, claim, ann);
    }
    const auto& tpl = promptgen::FindTemplate(*spec.template_id);
    std::string prompt;
    promptgen::GenerationBackend* backend = backend_.get();
    if (const int shots = ShotCount(spec.method); shots > 0) {
      const auto& examples = FewShotExamples(fold, tpl);
      prompt = promptgen::RenderFewShot(
          tpl, std::span(examples).first(static_cast<std::size_t>(shots)),
          claim.claim_text);
    } else {
      prompt = promptgen::RenderZeroShot(tpl, claim.claim_text);
      if (spec.method == Method::kFineTuned) backend = &FineTunedBackend(fold);
    }
    const std::string output = promptgen::Postprocess(
        promptgen::Generate(*backend, prompt, config_.params, config_.retry),
        tpl);
    return rulegen::MakeQuery(claim.claim_id, spec.method, spec.template_id,
                              output);
  }

  std::vector<DetailRow> EvaluateFold(const CellSpec& spec, int fold) {
    std::vector<DetailRow> rows;
    for (const auto& claim : partitions_[fold].test) {
      const rulegen::GeneratedQuery query = GenerateQuery(spec, fold, claim);
      DetailRow row;
      row.fold = fold;
      row.claim_id = claim.claim_id;
      row.method = spec.method;
      row.template_id = spec.template_id;
      row.query = query.text;
      row.empty = query.empty;
      row.similarity = textmetrics::Similarity(claim.target_query, query.text);
      if (engine_) {
        search::ExecutionOptions exec;
        exec.n = config_.executions;
        exec.k = config_.results_k;
        exec.store = store_.get();
        row.outcome = search::MakeOutcome(
            claim.claim_id, std::string(MethodName(spec.method)),
            claim.target_url, search::ExecuteRepeated(*engine_, query.text, exec),
            config_.strict_url_match ? UrlMatch::kStrict : UrlMatch::kNormalized);
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }

  std::vector<SensitivitySummary> Sensitivity(const std::vector<Cell>& cells) {
    std::vector<SensitivitySummary> out;
    for (Method m : config_.methods) {
      if (!UsesTemplate(m)) continue;
      for (bool restricted : {false, true}) {
        std::vector<const Cell*> members;
        for (const auto& c : cells) {
          if (c.method != m || !c.ok()) continue;
          if (restricted) {
            const auto format =
                promptgen::FindTemplate(*c.template_id).format_class;
            if (format == promptgen::FormatClass::kNoPrompt ||
                format == promptgen::FormatClass::kShortPrefix) {
              continue;
            }
          }
          members.push_back(&c);
        }
        if (members.empty()) continue;
        SensitivitySummary summary;
        summary.method = m;
        summary.restricted = restricted;
        summary.template_count = members.size();
        auto add = [&](const std::string& name, auto getter) {
          std::vector<double> values;
          for (const Cell* c : members) values.push_back(getter(*c));
          summary.metrics[name] = Summarize(values);
        };
        add("rouge1", [](const Cell& c) { return c.mean.rouge1; });
        add("rouge2", [](const Cell& c) { return c.mean.rouge2; });
        add("rougeL", [](const Cell& c) { return c.mean.rougeL; });
        const bool searched = std::all_of(
            members.begin(), members.end(),
            [](const Cell* c) { return c->mean.search.has_value(); });
        if (searched) {
          add("fa_pct", [](const Cell& c) { return c.mean.search->fa_pct; });
          add("fm_pct", [](const Cell& c) { return c.mean.search->fm_pct; });
          add("fo_pct", [](const Cell& c) { return c.mean.search->fo_pct; });
          add("mrr", [](const Cell& c) { return c.mean.search->mrr; });
        }
        out.push_back(std::move(summary));
      }
    }
    return out;
  }

  static std::vector<search::SampleSearchOutcome> PooledOutcomes(
      const Cell& cell) {
    std::vector<search::SampleSearchOutcome> out;
    for (const auto& row : cell.rows) {
      if (row.outcome) out.push_back(*row.outcome);
    }
    return out;
  }

  std::vector<OverlapTable> Overlaps(const ExperimentReport& report) {
    std::vector<OverlapTable> out;
    std::vector<const Cell*> best;
    for (Method m : config_.methods) {
      if (const Cell* c = report.BestCell(m)) best.push_back(c);
    }
    for (std::size_t i = 0; i < best.size(); ++i) {
      for (std::size_t j = i + 1; j < best.size(); ++j) {
        out.push_back(Overlap(PooledOutcomes(*best[i]), PooledOutcomes(*best[j]),
                              search::FoundRule::kMajority, best[i]->Label(),
                              best[j]->Label()));
      }
    }
    return out;
  }

  EnsembleResult RunEnsemble(const ExperimentReport& report,
                             const EnsembleSpec& spec) {
    EnsembleResult result;
    try {
      if (!report.search_enabled) {
        throw Error("search evaluation is disabled");
      }
      std::map<Method, const Cell*> members;
      std::map<Method, search::SearchMetrics> standalone;
      for (Method m : spec.methods) {
        const Cell* c = report.BestCell(m);
        if (c == nullptr) {
          throw Error("no successful cell for " + std::string(MethodName(m)));
        }
        members[m] = c;
        standalone[m] = *c->mean.search;
      }
      result.priorities = spec.priorities.empty()
                              ? ensemble::PrioritiesByEffectiveness(standalone)
                              : spec.priorities;
      result.label = ensemble::EnsembleLabel(result.priorities);
      for (int f = 0; f < config_.folds; ++f) {
        std::map<Method, std::vector<search::SampleSearchOutcome>> per_method;
        for (const auto& [m, cell] : members) {
          auto& outcomes = per_method[m];
          for (const auto& row : cell->rows) {
            if (row.fold == f) outcomes.push_back(*row.outcome);
          }
        }
        auto combined = ensemble::CombinedOutcomes(per_method, result.priorities,
                                                   config_.results_k);
        result.per_fold.push_back(
            search::EvaluateSearch(combined, config_.results_k));
        for (auto& o : combined) result.outcomes.push_back(std::move(o));
      }
      std::vector<Aggregates> parts;
      for (const auto& m : result.per_fold) parts.push_back({0, 0, 0, 0, m});
      result.mean = MeanAggregates(parts).search;
    } catch (const std::exception& e) {
      std::map<Method, int> members;
      for (std::size_t i = 0; i < spec.methods.size(); ++i) {
        members[spec.methods[i]] = static_cast<int>(i + 1);
      }
      if (result.label.empty()) result.label = ensemble::EnsembleLabel(members);
      spdlog::error("ensemble {} failed: {}", result.label, e.what());
      result.error = e.what();
    }
    return result;
  }

  const ExperimentConfig& config_;
  corpus::Dataset dataset_;
  std::map<std::string, rulegen::LinguisticAnnotation> annotations_;
  corpus::FoldAssignment folds_;
  std::vector<corpus::Partition> partitions_;
  std::unique_ptr<search::SearchEngine> engine_;
  std::unique_ptr<search::SnapshotStore> store_;
  std::unique_ptr<promptgen::GenerationBackend> backend_;
  std::map<int, std::unique_ptr<promptgen::GenerationBackend>> fine_tuned_;
  std::map<std::pair<int, std::string>, std::vector<promptgen::InContextExample>>
      fewshot_cache_;
};

}  // namespace

ExperimentReport RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  return Runner(config).Run();
}

}  // namespace eqk::harness
