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

// eqk: command-line front end for the query-generation toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "eqk/backend.h"
#include "eqk/config.h"
#include "eqk/corpus.h"
#include "eqk/ensemble.h"
#include "eqk/error.h"
#include "eqk/fewshot.h"
#include "eqk/harness.h"
#include "eqk/json_io.h"
#include "eqk/method.h"
#include "eqk/rulegen.h"
#include "eqk/search.h"
#include "eqk/searchmetrics.h"
#include "eqk/snapshot.h"
#include "eqk/templates.h"
#include "eqk/textmetrics.h"
#include "eqk/unicode.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

// Exit codes.
constexpr int kUsageError = 2;
constexpr int kDataError = 3;
constexpr int kRuntimeError = 4;

// Writes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      if (fs::path(path).has_parent_path()) {
        fs::create_directories(fs::path(path).parent_path());
      }
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw eqk::Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

template <typename T>
std::vector<T> ReadJsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw eqk::DatasetError("cannot open " + path.string());
  std::vector<T> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (eqk::unicode::TrimView(line).empty()) continue;
    try {
      rows.push_back(json::parse(line).get<T>());
    } catch (const json::exception& e) {
      throw eqk::DatasetError(e.what(), line_no);
    }
  }
  return rows;
}

struct EngineFlags {
  std::string engine = "mock";
  std::string mock_script;
  std::string endpoint;
  std::string market;
  std::string snapshot_dir;
  double requests_per_second = 3.0;

  void Register(CLI::App* cmd) {
    cmd->add_option("--engine", engine, "mock or bing")
        ->check(CLI::IsMember({"mock", "bing"}))
        ->capture_default_str();
    cmd->add_option("--mock-script", mock_script, "Mock engine script (JSON)");
    cmd->add_option("--endpoint", endpoint, "Bing endpoint override");
    cmd->add_option("--market", market, "Bing market, e.g. en-GB");
    cmd->add_option("--rps", requests_per_second, "Bing requests per second")
        ->capture_default_str();
    cmd->add_option("--snapshot-dir", snapshot_dir,
                    "Persist every result list here");
  }

  std::unique_ptr<eqk::search::SearchEngine> Make() const {
    if (engine == "mock") {
      if (mock_script.empty()) {
        throw eqk::ConfigError("--mock-script is required with --engine mock");
      }
      return std::make_unique<eqk::search::MockEngine>(
          eqk::search::LoadMockScript(mock_script));
    }
    eqk::search::BingOptions options;
    if (!endpoint.empty()) options.endpoint = endpoint;
    options.market = market;
    options.requests_per_second = requests_per_second;
    return std::make_unique<eqk::search::BingEngine>(options);
  }

  std::unique_ptr<eqk::search::SnapshotStore> Store() const {
    if (snapshot_dir.empty()) return nullptr;
    return std::make_unique<eqk::search::SnapshotStore>(snapshot_dir);
  }
};

struct BackendFlags {
  std::string kind = "stub";
  std::string stub_map;
  eqk::promptgen::HttpBackendOptions http;
  eqk::promptgen::GenerationParams params;
  int retry_attempts = 3;

  void Register(CLI::App* cmd) {
    cmd->add_option("--backend", kind, "stub or http")
        ->check(CLI::IsMember({"stub", "http"}))
        ->capture_default_str();
    cmd->add_option("--stub-map", stub_map, "Stub backend mapping (JSON)");
    cmd->add_option("--backend-url", http.base_url)->capture_default_str();
    cmd->add_option("--backend-path", http.path)->capture_default_str();
    cmd->add_option("--token-env", http.token_env)->capture_default_str();
    cmd->add_option("--num-beams", params.num_beams)->capture_default_str();
    cmd->add_option("--max-new-tokens", params.max_new_tokens)
        ->capture_default_str();
    cmd->add_option("--retry-attempts", retry_attempts)->capture_default_str();
  }

  std::unique_ptr<eqk::promptgen::GenerationBackend> Make() const {
    params.Validate();
    if (kind == "stub") {
      if (stub_map.empty()) return std::make_unique<eqk::promptgen::StubBackend>();
      return std::make_unique<eqk::promptgen::StubBackend>(
          eqk::promptgen::StubBackend::FromFile(stub_map));
    }
    return std::make_unique<eqk::promptgen::HttpBackend>(http);
  }

  eqk::RetryPolicy Retry() const {
    eqk::RetryPolicy retry;
    retry.max_attempts = retry_attempts;
    return retry;
  }
};

eqk::Method RequireMethod(const std::string& name) {
  auto m = eqk::ParseMethod(name);
  if (!m) throw eqk::ConfigError("unknown method '" + name + "'");
  return *m;
}

// ---- corpus ----------------------------------------------------------------

int CorpusValidate(const std::string& claims, const std::string& annotations) {
  const auto dataset = eqk::corpus::LoadDataset(claims);
  std::size_t annotated = 0;
  if (!annotations.empty()) {
    annotated = eqk::rulegen::IndexAnnotations(
                    eqk::rulegen::LoadAnnotations(annotations), dataset)
                    .size();
  }
  std::cout << dataset.records.size() << " records valid";
  if (!annotations.empty()) std::cout << ", " << annotated << " annotations valid";
  std::cout << '\n';
  return 0;
}

int CorpusSplit(const std::string& claims, int k, std::uint64_t seed,
                const std::string& out) {
  const auto dataset = eqk::corpus::LoadDataset(claims);
  const auto folds = eqk::corpus::SplitFolds(dataset, k, seed);
  ordered_json j;
  j["k"] = folds.k;
  j["seed"] = seed;
  j["sizes"] = folds.Sizes();
  ordered_json assignments = ordered_json::object();
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    assignments[dataset.records[i].claim_id] = folds.FoldOf(dataset.records[i].claim_id);
  }
  j["assignments"] = assignments;
  Output(out).stream() << j.dump(2) << '\n';
  return 0;
}

int CorpusStability(const std::string& claims, const EngineFlags& flags,
                    eqk::corpus::StabilityOptions options, const std::string& out,
                    const std::string& report) {
  const auto dataset = eqk::corpus::LoadDataset(claims);
  auto engine = flags.Make();
  auto store = flags.Store();
  options.store = store.get();
  const auto result = eqk::corpus::StabilityFilter(dataset, *engine, options);
  if (!out.empty()) eqk::corpus::WriteDataset(out, result.kept);
  ordered_json rows = ordered_json::array();
  for (const auto& h : result.hits) {
    rows.push_back({{"claim_id", h.claim_id},
                    {"hits", h.hits},
                    {"executions", h.executions},
                    {"failed_executions", h.failed_executions},
                    {"kept", h.kept}});
  }
  if (!report.empty()) Output(report).stream() << rows.dump(2) << '\n';
  std::cerr << result.kept.records.size() << " of " << dataset.records.size()
            << " records kept\n";
  return 0;
}

// ---- generate --------------------------------------------------------------

struct GenerateFlags {
  std::string method;
  std::string claims;
  std::string annotations;
  std::string train;
  std::string template_id = "no-prompt";
  int shots = 3;
  std::string out;
  int max_in_flight = 1;
  std::string checkpoint;
};

int Generate(const GenerateFlags& g, const BackendFlags& b) {
  const auto dataset = eqk::corpus::LoadDataset(g.claims);
  eqk::Method method;
  if (g.method == "few-shot") {
    if (g.shots < 1 || g.shots > 3) throw eqk::ConfigError("--shots must be 1..3");
    method = g.shots == 1 ? eqk::Method::kFewShot1
             : g.shots == 2 ? eqk::Method::kFewShot2
                            : eqk::Method::kFewShot3;
  } else {
    method = RequireMethod(g.method);
  }
  std::vector<eqk::rulegen::GeneratedQuery> queries;

  if (eqk::IsRuleBased(method)) {
    std::map<std::string, eqk::rulegen::LinguisticAnnotation> index;
    if (method != eqk::Method::kVerbatim) {
      if (g.annotations.empty()) {
        throw eqk::ConfigError("--annotations is required for " + g.method);
      }
      index = eqk::rulegen::IndexAnnotations(
          eqk::rulegen::LoadAnnotations(g.annotations), dataset);
    }
    for (const auto& claim : dataset.records) {
      auto it = index.find(claim.claim_id);
      queries.push_back(eqk::rulegen::Generate(
          method, claim, it == index.end() ? nullptr : &it->second));
    }
  } else {
    const auto& tpl = eqk::promptgen::FindTemplate(g.template_id);
    auto backend = b.Make();
    std::vector<eqk::promptgen::InContextExample> examples;
    if (eqk::ShotCount(method) > 0) {
      const auto train =
          g.train.empty() ? dataset : eqk::corpus::LoadDataset(g.train);
      eqk::promptgen::FewShotOptions options;
      options.params = b.params;
      options.retry = b.Retry();
      options.max_in_flight = g.max_in_flight;
      if (!g.checkpoint.empty()) options.checkpoint = g.checkpoint;
      auto selection = eqk::promptgen::SelectFewShotExamples(
          train.records, *backend, tpl, options);
      examples.assign(selection.examples.begin(),
                      selection.examples.begin() + eqk::ShotCount(method));
    }
    for (const auto& claim : dataset.records) {
      const std::string input =
          examples.empty()
              ? eqk::promptgen::RenderZeroShot(tpl, claim.claim_text)
              : eqk::promptgen::RenderFewShot(tpl, examples, claim.claim_text);
      const std::string raw =
          eqk::promptgen::Generate(*backend, input, b.params, b.Retry());
      queries.push_back(eqk::rulegen::MakeQuery(
          claim.claim_id, method, tpl.template_id,
          eqk::promptgen::Postprocess(raw, tpl)));
    }
  }
  Output out(g.out);
  auto& os = out.stream();
  for (const auto& q : queries) os << json(q).dump() << '\n';
  return 0;
}

// ---- score -----------------------------------------------------------------

int Score(const std::string& claims, const std::string& pred,
          const std::string& target_col, const std::string& out) {
  const auto dataset = eqk::corpus::LoadDataset(claims);
  std::map<std::string, const eqk::corpus::ClaimRecord*> by_id;
  for (const auto& r : dataset.records) by_id[r.claim_id] = &r;
  const auto queries = ReadJsonl<eqk::rulegen::GeneratedQuery>(pred);
  if (target_col != "target_query" && target_col != "claim_text") {
    throw eqk::ConfigError("--target-col must be target_query or claim_text");
  }
  ordered_json rows = ordered_json::array();
  double sums[4] = {0, 0, 0, 0};
  for (const auto& q : queries) {
    auto it = by_id.find(q.claim_id);
    if (it == by_id.end()) {
      throw eqk::DatasetError("prediction for unknown claim '" + q.claim_id + "'");
    }
    const auto& target = target_col == "target_query" ? it->second->target_query
                                                      : it->second->claim_text;
    const auto s = eqk::textmetrics::Similarity(target, q.text);
    sums[0] += s.rouge1.f1;
    sums[1] += s.rouge2.f1;
    sums[2] += s.rougeL.f1;
    sums[3] += s.levenshtein_ratio;
    rows.push_back({{"claim_id", q.claim_id},
                    {"rouge1", s.rouge1.f1},
                    {"rouge2", s.rouge2.f1},
                    {"rougeL", s.rougeL.f1},
                    {"levenshtein_ratio", s.levenshtein_ratio}});
  }
  const double n = queries.empty() ? 1.0 : static_cast<double>(queries.size());
  ordered_json j;
  j["count"] = queries.size();
  j["mean"] = {{"rouge1", sums[0] / n},
               {"rouge2", sums[1] / n},
               {"rougeL", sums[2] / n},
               {"levenshtein_ratio", sums[3] / n}};
  j["rows"] = rows;
  Output(out).stream() << j.dump(2) << '\n';
  return 0;
}

// ---- search ----------------------------------------------------------------

int SearchRun(const std::string& claims, const std::string& queries_path,
              const EngineFlags& flags, eqk::search::ExecutionOptions options,
              bool strict, const std::string& out) {
  const auto dataset = eqk::corpus::LoadDataset(claims);
  std::map<std::string, const eqk::corpus::ClaimRecord*> by_id;
  for (const auto& r : dataset.records) by_id[r.claim_id] = &r;
  auto engine = flags.Make();
  auto store = flags.Store();
  options.store = store.get();
  Output sink(out);
  auto& os = sink.stream();
  for (const auto& q : ReadJsonl<eqk::rulegen::GeneratedQuery>(queries_path)) {
    auto it = by_id.find(q.claim_id);
    if (it == by_id.end()) {
      throw eqk::DatasetError("query for unknown claim '" + q.claim_id + "'");
    }
    std::string label(eqk::MethodName(q.method));
    if (q.template_id) label += "/" + *q.template_id;
    auto outcome = eqk::search::MakeOutcome(
        q.claim_id, label, it->second->target_url,
        eqk::search::ExecuteRepeated(*engine, q.text, options),
        strict ? eqk::UrlMatch::kStrict : eqk::UrlMatch::kNormalized);
    os << json(outcome).dump() << '\n';
  }
  return 0;
}

int SearchMetricsCmd(const std::string& outcomes_path, int k) {
  const auto outcomes = ReadJsonl<eqk::search::SampleSearchOutcome>(outcomes_path);
  std::cout << json(eqk::search::EvaluateSearch(outcomes, k)).dump(2) << '\n';
  return 0;
}

// ---- ensemble --------------------------------------------------------------

int Ensemble(const std::vector<std::string>& inputs,
             const std::vector<std::string>& priorities, int k,
             const std::string& out) {
  std::map<eqk::Method, std::vector<eqk::search::SampleSearchOutcome>> per_method;
  for (const auto& spec : inputs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw eqk::ConfigError("--outcomes entries must be method=path");
    }
    const eqk::Method m = RequireMethod(spec.substr(0, eq));
    per_method[m] =
        ReadJsonl<eqk::search::SampleSearchOutcome>(spec.substr(eq + 1));
  }
  std::map<eqk::Method, int> prio;
  if (priorities.empty()) {
    std::map<eqk::Method, eqk::search::SearchMetrics> standalone;
    for (const auto& [m, outs] : per_method) {
      standalone[m] = eqk::search::EvaluateSearch(outs, k);
    }
    prio = eqk::ensemble::PrioritiesByEffectiveness(standalone);
  } else {
    for (const auto& p : priorities) {
      const auto colon = p.find(':');
      if (colon == std::string::npos) {
        throw eqk::ConfigError("--priorities entries must be method:rank");
      }
      prio[RequireMethod(p.substr(0, colon))] = std::stoi(p.substr(colon + 1));
    }
    for (const auto& [m, outs] : per_method) {
      if (!prio.contains(m)) {
        throw eqk::ConfigError("no priority for " + std::string(eqk::MethodName(m)));
      }
    }
  }
  const auto combined = eqk::ensemble::CombinedOutcomes(per_method, prio, k);
  ordered_json j;
  j["label"] = eqk::ensemble::EnsembleLabel(prio);
  j["metrics"] = json(eqk::search::EvaluateSearch(combined, k));
  if (!out.empty()) {
    Output o(out);
    for (const auto& c : combined) o.stream() << json(c).dump() << '\n';
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

// ---- run / report ----------------------------------------------------------

int Run(const std::string& config_path, const std::string& out) {
  const auto config = eqk::harness::LoadConfig(config_path);
  const auto report = eqk::harness::RunExperiment(config);
  eqk::harness::WriteReport(report, out);
  std::cout << eqk::harness::ReportText(report);
  return 0;
}

int Report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw eqk::Error("cannot open " + path);
  std::cout << eqk::harness::ReportTextFromJson(ordered_json::parse(in));
  return 0;
}

int TrainerConfig(const std::string& config_path) {
  eqk::harness::ExperimentConfig config;
  if (!config_path.empty()) config = eqk::harness::LoadConfig(config_path);
  std::cout << eqk::harness::TrainerConfigJson(config.trainer, config.params).dump(2)
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eqk: evidence query generation toolkit"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->capture_default_str();

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Dataset tools");
  corpus->require_subcommand(1);
  std::string claims, annotations, out, report;
  int folds = 4;
  std::uint64_t seed = 0;

  auto* validate = corpus->add_subcommand("validate", "Check a dataset");
  validate->add_option("--claims", claims)->required();
  validate->add_option("--annotations", annotations);

  auto* split = corpus->add_subcommand("split", "Article-grouped k-fold split");
  split->add_option("--claims", claims)->required();
  split->add_option("--k", folds)->capture_default_str();
  split->add_option("--seed", seed)->capture_default_str();
  split->add_option("--out", out);

  auto* stability = corpus->add_subcommand(
      "stability-filter", "Keep claims whose target query reliably finds its URL");
  EngineFlags engine_flags;
  eqk::corpus::StabilityOptions stability_options;
  stability->add_option("--claims", claims)->required();
  stability->add_option("--executions", stability_options.executions)
      ->capture_default_str();
  stability->add_option("--threshold", stability_options.threshold)
      ->capture_default_str();
  stability->add_option("--k", stability_options.k)->capture_default_str();
  stability->add_option("--parallelism", stability_options.parallelism)
      ->capture_default_str();
  stability->add_option("--out", out, "Kept records (JSONL)");
  stability->add_option("--report", report, "Per-record hit counts (JSON)");
  engine_flags.Register(stability);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate queries for claims");
  GenerateFlags gen;
  BackendFlags backend_flags;
  generate->add_option("--method", gen.method,
                       "verbatim|ne|np|zero-shot|few-shot|fine-tuned")
      ->required();
  generate->add_option("--claims", gen.claims)->required();
  generate->add_option("--annotations", gen.annotations);
  generate->add_option("--train", gen.train,
                       "Few-shot candidate pool (defaults to --claims)");
  generate->add_option("--template", gen.template_id)->capture_default_str();
  generate->add_option("--shots", gen.shots)->capture_default_str();
  generate->add_option("--max-in-flight", gen.max_in_flight)->capture_default_str();
  generate->add_option("--checkpoint", gen.checkpoint,
                       "Few-shot selection progress file");
  generate->add_option("--out", gen.out);
  backend_flags.Register(generate);

  // score
  auto* score = app.add_subcommand("score", "Rouge and Levenshtein against targets");
  std::string pred, target_col = "target_query";
  score->add_option("--claims", claims)->required();
  score->add_option("--pred", pred, "Generated queries (JSONL)")->required();
  score->add_option("--target-col", target_col)->capture_default_str();
  score->add_option("--out", out);

  // search
  auto* search = app.add_subcommand("search", "Search execution and metrics");
  search->require_subcommand(1);
  auto* search_run = search->add_subcommand("run", "Run queries N times");
  EngineFlags search_engine;
  eqk::search::ExecutionOptions exec;
  bool strict = false;
  std::string queries;
  search_run->add_option("--claims", claims)->required();
  search_run->add_option("--queries", queries)->required();
  search_run->add_option("--executions", exec.n)->capture_default_str();
  search_run->add_option("--k", exec.k)->capture_default_str();
  search_run->add_flag("--strict-url-match", strict);
  search_run->add_option("--out", out);
  search_engine.Register(search_run);

  auto* search_metrics = search->add_subcommand("metrics", "FA/FM/FO and MRR@k");
  std::string outcomes;
  int k = 10;
  search_metrics->add_option("--outcomes", outcomes)->required();
  search_metrics->add_option("--k", k)->capture_default_str();

  // ensemble
  auto* ensemble = app.add_subcommand("ensemble", "Borda-count fusion of methods");
  std::vector<std::string> ensemble_inputs, priorities;
  ensemble->add_option("--outcomes", ensemble_inputs, "method=outcomes.jsonl")
      ->required();
  ensemble->add_option("--priorities", priorities, "method:rank")->delimiter(',');
  ensemble->add_option("--k", k)->capture_default_str();
  ensemble->add_option("--out", out, "Fused outcomes (JSONL)");

  // run / report / trainer-config
  auto* run = app.add_subcommand("run", "Run a configured experiment");
  std::string config_path, out_dir = "results";
  run->add_option("--config", config_path)->required();
  run->add_option("--out", out_dir)->capture_default_str();

  auto* report_cmd = app.add_subcommand("report", "Render report.json as text");
  std::string report_path;
  report_cmd->add_option("report", report_path)->required();

  auto* trainer = app.add_subcommand("trainer-config",
                                     "Emit settings for an external trainer");
  trainer->add_option("--config", config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("eqk"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*validate) return CorpusValidate(claims, annotations);
    if (*split) return CorpusSplit(claims, folds, seed, out);
    if (*stability) {
      return CorpusStability(claims, engine_flags, stability_options, out, report);
    }
    if (*generate) return Generate(gen, backend_flags);
    if (*score) return Score(claims, pred, target_col, out);
    if (*search_run) {
      return SearchRun(claims, queries, search_engine, exec, strict, out);
    }
    if (*search_metrics) return SearchMetricsCmd(outcomes, k);
    if (*ensemble) return Ensemble(ensemble_inputs, priorities, k, out);
    if (*run) return Run(config_path, out_dir);
    if (*report_cmd) return Report(report_path);
    if (*trainer) return TrainerConfig(config_path);
  } catch (const eqk::ConfigError& e) {
    std::cerr << "eqk: " << e.what() << '\n';
    return kUsageError;
  } catch (const eqk::DatasetError& e) {
    std::cerr << "eqk: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "eqk: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
