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

#include "eqk/search.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "eqk/error.h"
#include "eqk/rng.h"
#include "eqk/snapshot.h"
#include "eqk/unicode.h"
#include "eqk/url.h"

namespace eqk::search {

using nlohmann::json;

std::int64_t NowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second),
      burst_(std::max(burst, 1.0)),
      tokens_(std::max(burst, 1.0)),
      last_(std::chrono::steady_clock::now()) {
  if (!(tokens_per_second > 0.0)) {
    throw std::invalid_argument("token bucket rate must be positive");
  }
}

void TokenBucket::Refill(std::chrono::steady_clock::time_point now) {
  const std::chrono::duration<double> elapsed = now - last_;
  tokens_ = std::min(burst_, tokens_ + elapsed.count() * rate_);
  last_ = now;
}

bool TokenBucket::TryAcquire() {
  std::lock_guard lock(mu_);
  Refill(std::chrono::steady_clock::now());
  if (tokens_ < 1.0) return false;
  tokens_ -= 1.0;
  return true;
}

void TokenBucket::Acquire() {
  std::chrono::duration<double> wait{0.0};
  {
    std::lock_guard lock(mu_);
    Refill(std::chrono::steady_clock::now());
    tokens_ -= 1.0;
    if (tokens_ < 0.0) wait = std::chrono::duration<double>(-tokens_ / rate_);
  }
  if (wait.count() > 0.0) std::this_thread::sleep_for(wait);
}

MockScript LoadMockScript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SearchError("cannot open mock script " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SearchError("mock script " + path.string() + ": " + e.what());
  }
  MockScript script;
  script.engine_id = doc.value("engine_id", std::string("mock"));
  script.dropout = doc.value("dropout", 0.0);
  script.seed = doc.value("seed", std::uint64_t{0});
  if (doc.contains("fallback")) {
    script.fallback = doc["fallback"].get<std::vector<std::string>>();
  }
  const json index = doc.value("index", json::array());
  for (const auto& d : index) {
    if (!d.contains("url") || !d.contains("text")) {
      throw SearchError("mock script index entries need 'url' and 'text'");
    }
    script.index.push_back(
        {d["url"].get<std::string>(), d["text"].get<std::string>()});
  }
  const json queries = doc.value("queries", json::object());
  for (const auto& [query, calls] : queries.items()) {
    auto& entry = script.queries[query];
    for (const auto& call : calls) {
      if (call.is_null()) {
        entry.emplace_back(std::nullopt);
      } else {
        entry.emplace_back(call.get<std::vector<std::string>>());
      }
    }
  }
  if (script.dropout < 0.0 || script.dropout >= 1.0) {
    throw SearchError("mock script dropout must be in [0, 1)");
  }
  return script;
}

std::vector<std::string> KeywordTerms(std::string_view text) {
  std::vector<std::string> terms;
  std::string current;
  for (char32_t c : unicode::Decode(text)) {
    const char32_t lower = unicode::ToLower(c);
    const bool word = (lower >= U'0' && lower <= U'9') ||
                      (lower >= U'a' && lower <= U'z') ||
                      (lower > 0x7F && (lower < 0x2000 || lower > 0x206F));
    if (word && !unicode::IsSpace(lower)) {
      current += unicode::Encode(std::u32string(1, lower));
    } else if (!current.empty()) {
      terms.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) terms.push_back(std::move(current));
  return terms;
}

std::vector<std::string> RankByKeywords(const std::vector<MockDocument>& index,
                                        std::string_view query) {
  auto query_terms = KeywordTerms(query);
  std::sort(query_terms.begin(), query_terms.end());
  query_terms.erase(std::unique(query_terms.begin(), query_terms.end()),
                    query_terms.end());
  std::vector<std::pair<std::size_t, std::size_t>> scored;  // score, position
  for (std::size_t i = 0; i < index.size(); ++i) {
    auto doc_terms = KeywordTerms(index[i].text);
    std::sort(doc_terms.begin(), doc_terms.end());
    std::size_t score = 0;
    for (const auto& t : query_terms) {
      if (std::binary_search(doc_terms.begin(), doc_terms.end(), t)) ++score;
    }
    if (score > 0) scored.emplace_back(score, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> urls;
  for (const auto& [score, i] : scored) urls.push_back(index[i].url);
  return urls;
}

MockEngine::MockEngine(MockScript script) : script_(std::move(script)) {}

std::vector<std::string> MockEngine::Search(const std::string& query, int k) {
  std::size_t call_index;
  {
    std::lock_guard lock(mu_);
    call_index = calls_[query]++;
    ++total_calls_;
  }
  std::vector<std::string> urls;
  if (auto it = script_.queries.find(query); it != script_.queries.end()) {
    const auto& calls = it->second;
    if (calls.empty()) return {};
    const auto& scripted = calls[call_index % calls.size()];
    if (!scripted) {
      throw SearchError("mock engine: scripted failure for query '" + query +
                        "' call " + std::to_string(call_index));
    }
    urls = *scripted;
  } else if (!script_.index.empty()) {
    urls = RankByKeywords(script_.index, query);
  } else {
    urls = script_.fallback;
  }
  if (script_.dropout > 0.0) {
    Rng rng(StableHash(query, script_.seed) ^ (call_index * 0x9E3779B97F4A7C15ULL));
    std::erase_if(urls, [&](const std::string&) {
      return rng.UniformUnit() < script_.dropout;
    });
  }
  if (k >= 0 && urls.size() > static_cast<std::size_t>(k)) urls.resize(k);
  return urls;
}

std::size_t MockEngine::total_calls() const {
  std::lock_guard lock(mu_);
  return total_calls_;
}

std::size_t MockEngine::calls_for(const std::string& query) const {
  std::lock_guard lock(mu_);
  auto it = calls_.find(query);
  return it == calls_.end() ? 0 : it->second;
}

std::vector<std::string> ParseBingResponse(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw SearchError(std::string("bing: malformed response: ") + e.what());
  }
  std::vector<std::string> urls;
  if (!doc.contains("webPages")) return urls;
  for (const auto& page : doc["webPages"].value("value", json::array())) {
    if (page.contains("url") && page["url"].is_string()) {
      urls.push_back(page["url"].get<std::string>());
    }
  }
  return urls;
}

BingEngine::BingEngine(BingOptions options)
    : options_(std::move(options)),
      limiter_(options_.requests_per_second, options_.burst) {
  const char* key = std::getenv(options_.key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("bing: environment variable " + options_.key_env +
                      " is not set");
  }
  key_ = key;
}

std::vector<std::string> BingEngine::Search(const std::string& query, int k) {
  httplib::Client client(options_.endpoint);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers = {{"Ocp-Apim-Subscription-Key", key_}};
  httplib::Params params = {{"q", query}, {"count", std::to_string(k)}};
  if (!options_.market.empty()) params.emplace("mkt", options_.market);

  auto backoff = options_.retry.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    limiter_.Acquire();
    auto res = client.Get(options_.path, params, headers);
    if (res && res->status == 200) {
      auto urls = ParseBingResponse(res->body);
      if (urls.size() > static_cast<std::size_t>(k)) urls.resize(k);
      return urls;
    }
    const bool retryable =
        !res || res->status == 429 || res->status >= 500;
    last_error = res ? "HTTP " + std::to_string(res->status)
                     : httplib::to_string(res.error());
    if (!retryable) break;
    if (attempt < options_.retry.max_attempts) {
      spdlog::warn("bing: attempt {} failed ({}), retrying", attempt,
                   last_error);
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<std::int64_t>(
          backoff.count() * options_.retry.backoff_multiplier));
    }
  }
  throw SearchError("bing: query '" + query + "' failed: " + last_error);
}

namespace {

std::vector<std::string> DedupAndTruncate(std::vector<std::string> urls,
                                          int k) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (auto& url : urls) {
    if (out.size() >= static_cast<std::size_t>(k)) break;
    if (seen.insert(NormalizeUrl(url)).second) out.push_back(std::move(url));
  }
  return out;
}

}  // namespace

std::vector<ResultList> ExecuteRepeated(SearchEngine& engine,
                                        const std::string& query,
                                        const ExecutionOptions& options) {
  if (options.n < 1) throw std::invalid_argument("execution count must be >= 1");
  if (options.k < 1) throw std::invalid_argument("k must be >= 1");
  const std::string engine_id = engine.id();

  std::vector<ResultList> lists;
  if (query.empty()) {
    for (int i = 0; i < options.n; ++i) {
      lists.push_back(ResultList{query, engine_id, i, {}, 0, false});
    }
    return lists;
  }

  if (options.store != nullptr && options.reuse_max_age) {
    auto cached = options.store->Get(query, engine_id, options.reuse_max_age);
    std::erase_if(cached, [](const ResultList& l) { return l.failed; });
    if (cached.size() >= static_cast<std::size_t>(options.n)) {
      cached.erase(cached.begin(), cached.end() - options.n);
      for (int i = 0; i < options.n; ++i) {
        cached[i].execution_index = i;
        cached[i].urls = DedupAndTruncate(std::move(cached[i].urls), options.k);
      }
      return cached;
    }
  }

  for (int i = 0; i < options.n; ++i) {
    ResultList list{query, engine_id, i, {}, NowMs(), false};
    try {
      list.urls = DedupAndTruncate(engine.Search(query, options.k), options.k);
    } catch (const SearchError& e) {
      spdlog::warn("search: execution {} of '{}' failed: {}", i, query,
                   e.what());
      list.failed = true;
    }
    if (options.store != nullptr) options.store->Put(list);
    lists.push_back(std::move(list));
  }
  return lists;
}

}  // namespace eqk::search
