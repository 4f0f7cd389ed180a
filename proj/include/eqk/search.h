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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eqk/retry.h"

namespace eqk::search {

class SnapshotStore;

// One ranked list from one execution of one query on one engine.
struct ResultList {
  std::string query_text;
  std::string engine_id;
  int execution_index = 0;
  std::vector<std::string> urls;
  std::int64_t retrieved_at_ms = 0;
  // Set when the engine call failed; urls is then empty.
  bool failed = false;

  bool operator==(const ResultList&) const = default;
};

std::int64_t NowMs();

class SearchEngine {
 public:
  virtual ~SearchEngine() = default;
  virtual std::string id() const = 0;
  // Up to k URLs in rank order. Throws SearchError once the adapter's own
  // retry budget is spent. Must be safe to call concurrently.
  virtual std::vector<std::string> Search(const std::string& query, int k) = 0;
};

using eqk::RetryPolicy;

// Token bucket; Acquire() blocks until a token is available. Callers that
// find the bucket empty reserve the next token, so waiters are served in
// arrival order.
class TokenBucket {
 public:
  TokenBucket(double tokens_per_second, double burst);
  void Acquire();
  bool TryAcquire();

 private:
  void Refill(std::chrono::steady_clock::time_point now);

  std::mutex mu_;
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

// A document in the mock engine's keyword index.
struct MockDocument {
  std::string url;
  std::string text;
};

// Scripted engine for offline runs. Each query maps to a sequence of
// per-call lists, consumed cyclically; a missing entry (JSON null) makes that
// call fail. Unscripted queries are ranked against `index` by the number of
// distinct query words found in each document (ties keep index order,
// documents with no shared word are dropped); with an empty index they
// return `fallback`. With dropout > 0 every URL
// is independently removed with that probability, seeded by
// (seed, query, call index) so results do not depend on call interleaving
// across queries.
struct MockScript {
  std::string engine_id = "mock";
  std::map<std::string, std::vector<std::optional<std::vector<std::string>>>>
      queries;
  std::vector<MockDocument> index;
  std::vector<std::string> fallback;
  double dropout = 0.0;
  std::uint64_t seed = 0;
};

MockScript LoadMockScript(const std::filesystem::path& path);

// Lowercased alphanumeric words, as used by the keyword index.
std::vector<std::string> KeywordTerms(std::string_view text);

// Ranks `index` against `query` as described for MockScript.
std::vector<std::string> RankByKeywords(const std::vector<MockDocument>& index,
                                        std::string_view query);

class MockEngine : public SearchEngine {
 public:
  explicit MockEngine(MockScript script);

  std::string id() const override { return script_.engine_id; }
  std::vector<std::string> Search(const std::string& query, int k) override;

  std::size_t total_calls() const;
  std::size_t calls_for(const std::string& query) const;

 private:
  MockScript script_;
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> calls_;
  std::size_t total_calls_ = 0;
};

// Bing Web Search v7 adapter. The subscription key is read from `key_env`.
struct BingOptions {
  std::string endpoint = "https://api.bing.microsoft.com";
  std::string path = "/v7.0/search";
  std::string key_env = "BING_SEARCH_V7_SUBSCRIPTION_KEY";
  std::string market;
  double requests_per_second = 3.0;
  double burst = 1.0;
  int timeout_seconds = 10;
  RetryPolicy retry;
};

class BingEngine : public SearchEngine {
 public:
  explicit BingEngine(BingOptions options);

  std::string id() const override { return "bing"; }
  std::vector<std::string> Search(const std::string& query, int k) override;

 private:
  BingOptions options_;
  std::string key_;
  TokenBucket limiter_;
};

// Extracts webPages.value[].url from a Bing v7 response body.
std::vector<std::string> ParseBingResponse(std::string_view body);

struct ExecutionOptions {
  int n = 3;
  int k = 10;
  // Every engine call is appended here before ExecuteRepeated returns.
  SnapshotStore* store = nullptr;
  // When set (and a store is given), stored executions newer than this are
  // reused instead of calling the engine.
  std::optional<std::chrono::milliseconds> reuse_max_age;
};

// Runs `query` n times. Each list is de-duplicated by normalized URL and cut
// to k entries. A failing call yields an empty list flagged failed. An empty
// query yields n empty lists without touching the engine.
std::vector<ResultList> ExecuteRepeated(SearchEngine& engine,
                                        const std::string& query,
                                        const ExecutionOptions& options = {});

}  // namespace eqk::search
