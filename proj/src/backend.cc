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

#include "eqk/backend.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "eqk/error.h"
#include "eqk/json_io.h"

namespace eqk::promptgen {

using nlohmann::json;

void GenerationParams::Validate() const {
  if (num_beams < 1) throw std::invalid_argument("num_beams must be >= 1");
  if (max_new_tokens < 1) {
    throw std::invalid_argument("max_new_tokens must be >= 1");
  }
}

StubBackend::StubBackend(std::map<std::string, std::string> mapping)
    : mapping_(std::move(mapping)) {}

StubBackend StubBackend::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stub map " + path.string());
  try {
    return StubBackend(json::parse(in).get<std::map<std::string, std::string>>());
  } catch (const json::exception& e) {
    throw ConfigError("stub map " + path.string() + ": " + e.what());
  }
}

GenerationResult StubBackend::Complete(const std::string& input,
                                       const GenerationParams& params) {
  if (auto it = mapping_.find(input); it != mapping_.end()) {
    std::istringstream words(it->second);
    int count = 0;
    for (std::string w; words >> w;) ++count;
    return {it->second, std::min(count, params.max_new_tokens)};
  }
  std::istringstream words(input);
  GenerationResult result;
  for (std::string w; result.token_count < params.max_new_tokens && words >> w;) {
    if (!result.output.empty()) result.output.push_back(' ');
    result.output += w;
    ++result.token_count;
  }
  return result;
}

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)) {
  if (const char* token = std::getenv(options_.token_env.c_str())) {
    token_ = token;
  }
}

GenerationResult HttpBackend::Complete(const std::string& input,
                                       const GenerationParams& params) {
  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  const json body = {{"input", input}, {"params", params}};
  auto res = client.Post(options_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendError("backend " + options_.base_url + ": " +
                           httplib::to_string(res.error()),
                       true);
  }
  if (res->status != 200) {
    const bool retryable = res->status == 429 || res->status >= 500;
    throw BackendError("backend " + options_.base_url + ": HTTP " +
                           std::to_string(res->status),
                       retryable);
  }
  try {
    const json reply = json::parse(res->body);
    GenerationResult result;
    result.output = reply.at("output").get<std::string>();
    result.token_count = reply.at("token_count").get<int>();
    return result;
  } catch (const json::exception& e) {
    throw BackendError(std::string("backend protocol error: ") + e.what(), true);
  }
}

std::string Generate(GenerationBackend& backend, const std::string& input,
                     const GenerationParams& params, const RetryPolicy& retry) {
  params.Validate();
  auto backoff = retry.initial_backoff;
  const int max_attempts = std::max(1, retry.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      GenerationResult result = backend.Complete(input, params);
      if (result.token_count > params.max_new_tokens || result.token_count < 0) {
        throw BackendError("backend protocol error: token_count " +
                               std::to_string(result.token_count) +
                               " outside [0, " +
                               std::to_string(params.max_new_tokens) + "]",
                           false, attempt);
      }
      return std::move(result.output);
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= max_attempts) {
        if (e.attempts() == attempt) throw;
        throw BackendError(e.detail(), e.retryable(), attempt);
      }
      spdlog::warn("backend {}: attempt {} failed: {}", backend.id(), attempt,
                   e.what());
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long long>(backoff.count() * retry.backoff_multiplier));
    }
  }
}

}  // namespace eqk::promptgen
