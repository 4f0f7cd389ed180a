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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqk/backend.h"
#include "eqk/method.h"
#include "eqk/retry.h"
#include "eqk/search.h"

namespace eqk::harness {

// Settings handed to an external fine-tuning job; nothing here trains.
struct TrainerConfig {
  std::string optimizer = "adafactor";
  double learning_rate = 1e-3;
  int epochs = 10;
  int max_input_length = 512;
  double validation_fraction = 0.15;
  std::string checkpoint_metric = "levenshtein_ratio";
};

nlohmann::ordered_json TrainerConfigJson(const TrainerConfig& trainer,
                                         const promptgen::GenerationParams& params);

enum class EngineKind { kNone, kMock, kBing };
enum class BackendKind { kStub, kHttp };

struct EnsembleSpec {
  std::vector<Method> methods;
  // Empty: ranked by standalone FM%.
  std::map<Method, int> priorities;
};

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  std::optional<std::filesystem::path> annotations_path;
  std::optional<std::filesystem::path> error_labels_path;

  std::vector<Method> methods;
  // Templates tried for every template-driven method unless overridden.
  std::vector<std::string> templates = {"no-prompt"};
  std::map<Method, std::vector<std::string>> method_templates;

  int folds = 4;
  std::uint64_t seed = 0;

  EngineKind engine = EngineKind::kNone;
  std::optional<std::filesystem::path> mock_script;
  search::BingOptions bing;
  int executions = 3;
  int results_k = 10;
  std::optional<std::filesystem::path> snapshot_dir;
  bool strict_url_match = false;

  BackendKind backend = BackendKind::kStub;
  std::optional<std::filesystem::path> stub_map;
  promptgen::HttpBackendOptions http;
  // Per-fold fine-tuned checkpoints; "{fold}" is replaced by the fold index.
  std::optional<std::string> fine_tuned_url;
  promptgen::GenerationParams params;
  RetryPolicy retry;
  int max_in_flight = 1;
  std::optional<std::filesystem::path> fewshot_checkpoint_dir;

  std::vector<EnsembleSpec> ensembles;
  TrainerConfig trainer;

  const std::vector<std::string>& TemplatesFor(Method method) const;
  // Throws ConfigError.
  void Validate() const;
};

// INI file. Relative paths resolve against the file's directory.
ExperimentConfig LoadConfig(const std::filesystem::path& path);

std::string_view EngineKindName(EngineKind kind);

}  // namespace eqk::harness
