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

#include "eqk/config.h"

#include <algorithm>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "eqk/error.h"
#include "eqk/templates.h"
#include "eqk/unicode.h"

namespace eqk::harness {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> SplitList(const std::string& value, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(value);
  for (std::string item; std::getline(in, item, sep);) {
    auto trimmed = unicode::TrimView(item);
    if (!trimmed.empty()) out.emplace_back(trimmed);
  }
  return out;
}

Method RequireMethod(const std::string& name) {
  auto method = ParseMethod(name);
  if (!method) throw ConfigError("unknown method '" + name + "'");
  return *method;
}

template <typename T>
T Get(const pt::ptree& tree, const std::string& key, T fallback) {
  if (!tree.get_optional<std::string>(key)) return fallback;
  try {
    return tree.get<T>(key);
  } catch (const pt::ptree_bad_data& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::optional<std::filesystem::path> OptionalPath(
    const pt::ptree& tree, const std::string& key,
    const std::filesystem::path& base) {
  auto value = tree.get_optional<std::string>(key);
  if (!value || unicode::TrimView(*value).empty()) return std::nullopt;
  std::filesystem::path p(std::string(unicode::TrimView(*value)));
  return p.is_absolute() ? p : base / p;
}

}  // namespace

std::string_view EngineKindName(EngineKind kind) {
  switch (kind) {
    case EngineKind::kNone:
      return "none";
    case EngineKind::kMock:
      return "mock";
    case EngineKind::kBing:
      return "bing";
  }
  return "none";
}

nlohmann::ordered_json TrainerConfigJson(const TrainerConfig& trainer,
                                         const promptgen::GenerationParams& params) {
  nlohmann::ordered_json j;
  j["optimizer"] = trainer.optimizer;
  j["learning_rate"] = trainer.learning_rate;
  j["epochs"] = trainer.epochs;
  j["max_input_length"] = trainer.max_input_length;
  j["validation_fraction"] = trainer.validation_fraction;
  j["checkpoint_metric"] = trainer.checkpoint_metric;
  j["generation"] = {{"num_beams", params.num_beams},
                     {"no_repeat_ngram_size",
                      params.forbid_repeated_bigrams ? 2 : 0},
                     {"early_stopping", params.early_stopping},
                     {"max_new_tokens", params.max_new_tokens}};
  return j;
}

const std::vector<std::string>& ExperimentConfig::TemplatesFor(
    Method method) const {
  if (auto it = method_templates.find(method); it != method_templates.end()) {
    return it->second;
  }
  return templates;
}

void ExperimentConfig::Validate() const {
  if (dataset_path.empty()) throw ConfigError("config: dataset is required");
  if (methods.empty()) throw ConfigError("config: no methods selected");
  if (folds < 2) throw ConfigError("config: folds must be >= 2");
  if (executions < 1) throw ConfigError("config: executions must be >= 1");
  if (results_k < 1) throw ConfigError("config: k must be >= 1");
  for (Method m : methods) {
    if (ShotCount(m) < 0 || ShotCount(m) > 3) {
      throw ConfigError("config: shots must be in {0, 1, 2, 3}");
    }
    if ((m == Method::kNamedEntities || m == Method::kNounPhrases) &&
        !annotations_path) {
      throw ConfigError("config: " + std::string(MethodName(m)) +
                        " needs an annotations file");
    }
    if (UsesTemplate(m)) {
      if (TemplatesFor(m).empty()) {
        throw ConfigError("config: no templates for " +
                          std::string(MethodName(m)));
      }
      for (const auto& id : TemplatesFor(m)) {
        try {
          promptgen::FindTemplate(id);
        } catch (const std::out_of_range&) {
          throw ConfigError("config: unknown template '" + id + "'");
        }
      }
    }
  }
  if (engine == EngineKind::kMock && !mock_script) {
    throw ConfigError("config: mock engine needs search.mock_script");
  }
  try {
    params.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& spec : ensembles) {
    if (spec.methods.size() < 2) {
      throw ConfigError("config: an ensemble needs at least two methods");
    }
    for (Method m : spec.methods) {
      if (std::find(methods.begin(), methods.end(), m) == methods.end()) {
        throw ConfigError("config: ensemble member " +
                          std::string(MethodName(m)) + " is not run");
      }
    }
  }
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const std::filesystem::path base = path.parent_path();
  ExperimentConfig c;

  if (auto dataset = OptionalPath(tree, "experiment.dataset", base)) {
    c.dataset_path = *dataset;
  }
  c.annotations_path = OptionalPath(tree, "experiment.annotations", base);
  c.error_labels_path = OptionalPath(tree, "experiment.error_labels", base);
  for (const auto& name :
       SplitList(Get<std::string>(tree, "experiment.methods", ""))) {
    c.methods.push_back(RequireMethod(name));
  }
  if (auto t = tree.get_optional<std::string>("experiment.templates")) {
    c.templates = SplitList(*t);
  }
  c.folds = Get(tree, "experiment.folds", c.folds);
  c.seed = Get(tree, "experiment.seed", c.seed);
  if (auto overrides = tree.get_child_optional("templates")) {
    for (const auto& [key, value] : *overrides) {
      c.method_templates[RequireMethod(key)] = SplitList(value.data());
    }
  }

  const std::string engine = Get<std::string>(tree, "search.engine", "none");
  if (engine == "none" || engine.empty()) {
    c.engine = EngineKind::kNone;
  } else if (engine == "mock") {
    c.engine = EngineKind::kMock;
  } else if (engine == "bing") {
    c.engine = EngineKind::kBing;
  } else {
    throw ConfigError("config: unknown search engine '" + engine + "'");
  }
  c.mock_script = OptionalPath(tree, "search.mock_script", base);
  c.snapshot_dir = OptionalPath(tree, "search.snapshot_dir", base);
  c.executions = Get(tree, "search.executions", c.executions);
  c.results_k = Get(tree, "search.k", c.results_k);
  c.strict_url_match = Get(tree, "search.strict_url_match", false);
  c.bing.endpoint = Get(tree, "search.endpoint", c.bing.endpoint);
  c.bing.key_env = Get(tree, "search.key_env", c.bing.key_env);
  c.bing.market = Get(tree, "search.market", c.bing.market);
  c.bing.requests_per_second =
      Get(tree, "search.requests_per_second", c.bing.requests_per_second);
  c.bing.retry.max_attempts =
      Get(tree, "search.retry_attempts", c.bing.retry.max_attempts);

  const std::string backend = Get<std::string>(tree, "backend.kind", "stub");
  if (backend == "stub") {
    c.backend = BackendKind::kStub;
  } else if (backend == "http") {
    c.backend = BackendKind::kHttp;
  } else {
    throw ConfigError("config: unknown backend kind '" + backend + "'");
  }
  c.stub_map = OptionalPath(tree, "backend.stub_map", base);
  c.http.base_url = Get(tree, "backend.url", c.http.base_url);
  c.http.path = Get(tree, "backend.path", c.http.path);
  c.http.token_env = Get(tree, "backend.token_env", c.http.token_env);
  c.http.timeout_seconds = Get(tree, "backend.timeout_seconds", c.http.timeout_seconds);
  if (auto url = tree.get_optional<std::string>("backend.fine_tuned_url")) {
    c.fine_tuned_url = std::string(unicode::TrimView(*url));
  }
  c.params.num_beams = Get(tree, "backend.num_beams", c.params.num_beams);
  c.params.forbid_repeated_bigrams = Get(tree, "backend.forbid_repeated_bigrams",
                                         c.params.forbid_repeated_bigrams);
  c.params.early_stopping =
      Get(tree, "backend.early_stopping", c.params.early_stopping);
  c.params.max_new_tokens =
      Get(tree, "backend.max_new_tokens", c.params.max_new_tokens);
  c.retry.max_attempts = Get(tree, "backend.retry_attempts", c.retry.max_attempts);
  c.retry.initial_backoff = std::chrono::milliseconds(
      Get<long long>(tree, "backend.retry_backoff_ms", c.retry.initial_backoff.count()));
  c.max_in_flight = Get(tree, "backend.max_in_flight", c.max_in_flight);
  c.fewshot_checkpoint_dir = OptionalPath(tree, "backend.checkpoint_dir", base);

  std::map<Method, int> shared_priorities;
  for (const auto& entry :
       SplitList(Get<std::string>(tree, "ensemble.priorities", ""))) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("config: ensemble priority '" + entry +
                        "' must be method:rank");
    }
    try {
      shared_priorities[RequireMethod(
          std::string(unicode::TrimView(entry.substr(0, colon))))] =
          std::stoi(entry.substr(colon + 1));
    } catch (const std::logic_error&) {
      throw ConfigError("config: bad ensemble priority '" + entry + "'");
    }
  }
  for (const auto& combo :
       SplitList(Get<std::string>(tree, "ensemble.combinations", ""), ';')) {
    EnsembleSpec spec;
    for (const auto& name : SplitList(combo, '+')) {
      spec.methods.push_back(RequireMethod(name));
    }
    if (!shared_priorities.empty()) {
      for (Method m : spec.methods) {
        auto it = shared_priorities.find(m);
        if (it == shared_priorities.end()) {
          throw ConfigError("config: no ensemble priority for " +
                            std::string(MethodName(m)));
        }
        spec.priorities[m] = it->second;
      }
    }
    c.ensembles.push_back(std::move(spec));
  }

  c.trainer.optimizer = Get(tree, "trainer.optimizer", c.trainer.optimizer);
  c.trainer.learning_rate =
      Get(tree, "trainer.learning_rate", c.trainer.learning_rate);
  c.trainer.epochs = Get(tree, "trainer.epochs", c.trainer.epochs);
  c.trainer.max_input_length =
      Get(tree, "trainer.max_input_length", c.trainer.max_input_length);
  c.trainer.validation_fraction =
      Get(tree, "trainer.validation_fraction", c.trainer.validation_fraction);

  c.Validate();
  return c;
}

}  // namespace eqk::harness
