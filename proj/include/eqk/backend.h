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

#include <filesystem>
#include <map>
#include <mutex>
#include <string>

#include "eqk/retry.h"

namespace eqk::promptgen {

// Decoding settings forwarded to the backend.
struct GenerationParams {
  int num_beams = 10;
  bool forbid_repeated_bigrams = true;
  bool early_stopping = true;
  int max_new_tokens = 16;

  void Validate() const;
  bool operator==(const GenerationParams&) const = default;
};

struct GenerationResult {
  std::string output;
  // Tokens generated, as counted by the backend.
  int token_count = 0;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string id() const = 0;
  // One attempt. Throws BackendError; retryable() marks transient failures.
  virtual GenerationResult Complete(const std::string& input,
                                    const GenerationParams& params) = 0;
};

// Offline backend: returns the mapped output for known inputs, otherwise the
// first max_new_tokens whitespace-separated tokens of the input.
class StubBackend : public GenerationBackend {
 public:
  explicit StubBackend(std::map<std::string, std::string> mapping = {});
  // JSON object mapping input to output.
  static StubBackend FromFile(const std::filesystem::path& path);

  std::string id() const override { return "stub"; }
  GenerationResult Complete(const std::string& input,
                            const GenerationParams& params) override;

 private:
  std::map<std::string, std::string> mapping_;
};

struct HttpBackendOptions {
  // scheme://host[:port]
  std::string base_url = "http://127.0.0.1:8080";
  std::string path = "/generate";
  // Sent as "Authorization: Bearer <token>" when the variable is set.
  std::string token_env = "EQK_BACKEND_TOKEN";
  int timeout_seconds = 60;
};

// POSTs {"input": ..., "params": {...}} and expects
// {"output": string, "token_count": integer}.
class HttpBackend : public GenerationBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  std::string id() const override { return options_.base_url; }
  GenerationResult Complete(const std::string& input,
                            const GenerationParams& params) override;

 private:
  HttpBackendOptions options_;
  std::string token_;
};

// Calls the backend with retries on transient failures. Rejects a response
// whose reported token count exceeds params.max_new_tokens. Errors carry the
// number of attempts made.
std::string Generate(GenerationBackend& backend, const std::string& input,
                     const GenerationParams& params = {},
                     const RetryPolicy& retry = {});

}  // namespace eqk::promptgen
