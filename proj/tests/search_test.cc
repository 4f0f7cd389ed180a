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

#include <atomic>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "eqk/error.h"
#include "eqk/snapshot.h"
#include "test_util.h"

namespace eqk::search {
namespace {

using testing::TempDir;
using Urls = std::vector<std::string>;

MockScript Script(std::map<std::string, std::vector<std::optional<Urls>>> q) {
  MockScript s;
  s.queries = std::move(q);
  return s;
}

TEST(MockEngine, CyclesScriptedLists) {
  MockEngine engine(Script({{"q", {Urls{"a"}, Urls{"b"}, Urls{"c"}}}}));
  EXPECT_EQ(engine.Search("q", 10), Urls{"a"});
  EXPECT_EQ(engine.Search("q", 10), Urls{"b"});
  EXPECT_EQ(engine.Search("q", 10), Urls{"c"});
  EXPECT_EQ(engine.Search("q", 10), Urls{"a"});
  EXPECT_EQ(engine.calls_for("q"), 4u);
  EXPECT_EQ(engine.calls_for("other"), 0u);
}

TEST(MockEngine, NullEntryFailsAndFallbackCoversUnknown) {
  MockScript script = Script({{"q", {std::nullopt, Urls{"x"}}}});
  script.fallback = {"f1", "f2", "f3"};
  MockEngine engine(script);
  EXPECT_THROW(engine.Search("q", 10), SearchError);
  EXPECT_EQ(engine.Search("q", 10), Urls{"x"});
  EXPECT_EQ(engine.Search("zzz", 2), (Urls{"f1", "f2"}));
  EXPECT_EQ(engine.total_calls(), 3u);
}

TEST(MockEngine, KeywordIndexRanksByDistinctTermOverlap) {
  MockScript script;
  script.index = {{"https://a.org", "oecd growth forecast"},
                  {"https://b.org", "galileo satellite height"},
                  {"https://c.org", "OECD growth"},
                  {"https://d.org", "unrelated"}};
  MockEngine engine(script);
  EXPECT_EQ(engine.Search("OECD growth forecast, 2021", 10),
            (Urls{"https://a.org", "https://c.org"}));
  EXPECT_EQ(engine.Search("growth growth", 10),
            (Urls{"https://a.org", "https://c.org"}));
  EXPECT_EQ(engine.Search("galileo", 10), Urls{"https://b.org"});
  EXPECT_TRUE(engine.Search("nothing matches", 10).empty());
  EXPECT_EQ(KeywordTerms("Israel's longest-serving, Caffè"),
            (Urls{"israel", "s", "longest", "serving", "caffè"}));
}

TEST(MockEngine, DropoutIsDeterministicPerQueryAndCall) {
  MockScript script;
  script.fallback = {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10"};
  script.dropout = 0.5;
  script.seed = 42;
  MockEngine a(script), b(script);
  std::vector<Urls> first, second;
  for (int i = 0; i < 5; ++i) first.push_back(a.Search("q", 10));
  // Interleave another query; per-query sequences must not change.
  for (int i = 0; i < 5; ++i) {
    b.Search("other", 10);
    second.push_back(b.Search("q", 10));
  }
  EXPECT_EQ(first, second);
  bool varied = false;
  for (const auto& l : first) varied |= l != first[0];
  EXPECT_TRUE(varied);
}

TEST(MockScript, LoadsFromJson) {
  TempDir dir;
  testing::WriteFile(dir / "m.json", R"({
    "engine_id": "scripted", "seed": 3, "dropout": 0.0,
    "fallback": ["https://f.org"],
    "queries": {"q": [["https://a.org"], null]},
    "index": [{"url": "https://i.org", "text": "index words"}]
  })");
  MockEngine engine(LoadMockScript(dir / "m.json"));
  EXPECT_EQ(engine.id(), "scripted");
  EXPECT_EQ(engine.Search("q", 10), Urls{"https://a.org"});
  EXPECT_THROW(engine.Search("q", 10), SearchError);
  EXPECT_EQ(engine.Search("words", 10), Urls{"https://i.org"});

  testing::WriteFile(dir / "bad.json", R"({"dropout": 1.5})");
  EXPECT_THROW(LoadMockScript(dir / "bad.json"), SearchError);
  testing::WriteFile(dir / "broken.json", "{");
  EXPECT_THROW(LoadMockScript(dir / "broken.json"), SearchError);
}

TEST(TokenBucket, LimitsRate) {
  TokenBucket bucket(50.0, 2.0);
  EXPECT_TRUE(bucket.TryAcquire());
  EXPECT_TRUE(bucket.TryAcquire());
  EXPECT_FALSE(bucket.TryAcquire());
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) bucket.Acquire();
  const auto elapsed = std::chrono::steady_clock::now() - start;
  // Five tokens at 50/s need about 100 ms.
  EXPECT_GE(elapsed, std::chrono::milliseconds(80));
  EXPECT_THROW(TokenBucket(0.0, 1.0), std::invalid_argument);
}

TEST(ExecuteRepeated, FixedListRepeated) {
  MockEngine engine(Script({{"q", {Urls{"https://a.org", "https://b.org"}}}}));
  const auto lists = ExecuteRepeated(engine, "q");
  ASSERT_EQ(lists.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(lists[i].urls, (Urls{"https://a.org", "https://b.org"}));
    EXPECT_EQ(lists[i].execution_index, i);
    EXPECT_EQ(lists[i].engine_id, "mock");
    EXPECT_EQ(lists[i].query_text, "q");
  }
}

TEST(ExecuteRepeated, DistinctListsInCallOrder) {
  MockEngine engine(Script({{"q", {Urls{"1"}, Urls{"2"}, Urls{"3"}}}}));
  const auto lists = ExecuteRepeated(engine, "q");
  EXPECT_EQ(lists[0].urls, Urls{"1"});
  EXPECT_EQ(lists[1].urls, Urls{"2"});
  EXPECT_EQ(lists[2].urls, Urls{"3"});
}

TEST(ExecuteRepeated, EmptyQueryMakesNoCalls) {
  MockEngine engine(Script({}));
  const auto lists = ExecuteRepeated(engine, "");
  ASSERT_EQ(lists.size(), 3u);
  for (const auto& l : lists) {
    EXPECT_TRUE(l.urls.empty());
    EXPECT_FALSE(l.failed);
  }
  EXPECT_EQ(engine.total_calls(), 0u);
}

TEST(ExecuteRepeated, DedupsNormalizedWithinTopK) {
  MockEngine engine(Script({{"q",
                             {Urls{"https://a.org/", "http://www.a.org",
                                   "https://b.org", "https://c.org"}}}}));
  ExecutionOptions options;
  options.n = 1;
  options.k = 3;
  EXPECT_EQ(ExecuteRepeated(engine, "q", options)[0].urls,
            (Urls{"https://a.org/", "https://b.org"}));
  // The engine is asked for k results; duplicates are dropped from those.
  options.k = 2;
  EXPECT_EQ(ExecuteRepeated(engine, "q", options)[0].urls, (Urls{"https://a.org/"}));
}

TEST(ExecuteRepeated, FailureBecomesFlaggedEmptyList) {
  MockEngine engine(Script({{"q", {Urls{"a"}, std::nullopt, Urls{"c"}}}}));
  const auto lists = ExecuteRepeated(engine, "q");
  EXPECT_FALSE(lists[0].failed);
  EXPECT_TRUE(lists[1].failed);
  EXPECT_TRUE(lists[1].urls.empty());
  EXPECT_EQ(lists[2].urls, Urls{"c"});
}

TEST(ExecuteRepeated, PersistsAndReusesSnapshots) {
  TempDir dir;
  SnapshotStore store(dir.path());
  MockEngine engine(Script({{"q", {Urls{"1"}, Urls{"2"}, Urls{"3"}}}}));
  ExecutionOptions options;
  options.store = &store;
  const auto first = ExecuteRepeated(engine, "q", options);
  EXPECT_EQ(store.Get("q", "mock").size(), 3u);

  options.reuse_max_age = std::chrono::hours(1);
  const auto second = ExecuteRepeated(engine, "q", options);
  EXPECT_EQ(engine.total_calls(), 3u);
  EXPECT_EQ(first, second);
}

TEST(Snapshot, RoundTripAndOrder) {
  TempDir dir;
  SnapshotStore store(dir.path() / "nested");
  const ResultList a{"q", "mock", 0, {"https://a.org"}, 1000, false};
  const ResultList b{"q", "mock", 1, {}, 2000, true};
  const ResultList other{"other", "mock", 0, {"x"}, 1500, false};
  EXPECT_TRUE(store.Get("q", "mock").empty());
  store.Put(a);
  store.Put(other);
  store.Put(b);
  EXPECT_EQ(store.Get("q", "mock"), (std::vector<ResultList>{a, b}));
  EXPECT_TRUE(store.Get("q", "bing").empty());
  // Only executions retrieved at or after now - max_age.
  EXPECT_EQ(store.Get("q", "mock", std::chrono::milliseconds(500), 2400),
            (std::vector<ResultList>{b}));
}

TEST(Snapshot, SkipsCorruptLines) {
  TempDir dir;
  SnapshotStore store(dir.path());
  const ResultList a{"q", "mock", 0, {"u"}, 1, false};
  store.Put(a);
  {
    std::ofstream out(store.FileFor("mock"), std::ios::app);
    out << "{\"query_text\": \"q\", \"trunc";
  }
  EXPECT_EQ(store.Get("q", "mock"), std::vector<ResultList>{a});
}

TEST(Snapshot, EngineIdsAreSanitizedIntoFileNames) {
  TempDir dir;
  SnapshotStore store(dir.path());
  EXPECT_EQ(store.FileFor("../evil/id").parent_path(), dir.path());
}

TEST(Bing, ParsesResponse) {
  EXPECT_EQ(ParseBingResponse(R"({"webPages": {"value": [
      {"url": "https://a.org", "name": "A"}, {"name": "no url"},
      {"url": "https://b.org"}]}})"),
            (Urls{"https://a.org", "https://b.org"}));
  EXPECT_TRUE(ParseBingResponse(R"({"_type": "SearchResponse"})").empty());
  EXPECT_THROW(ParseBingResponse("<html>"), SearchError);
}

TEST(Bing, MissingKeyIsConfigError) {
  BingOptions options;
  options.key_env = "EQK_TEST_UNSET_KEY";
  ::unsetenv("EQK_TEST_UNSET_KEY");
  EXPECT_THROW(BingEngine{options}, ConfigError);
}

TEST(Bing, SendsKeyAndRetriesThrottling) {
  httplib::Server server;
  std::atomic<int> calls{0};
  std::string key, q, count, mkt;
  server.Get("/v7.0/search", [&](const httplib::Request& req, httplib::Response& res) {
    if (++calls == 1) {
      res.status = 429;
      return;
    }
    key = req.get_header_value("Ocp-Apim-Subscription-Key");
    q = req.get_param_value("q");
    count = req.get_param_value("count");
    mkt = req.get_param_value("mkt");
    res.set_content(R"({"webPages": {"value": [{"url": "https://a.org"},
        {"url": "https://b.org"}, {"url": "https://c.org"}]}})",
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("EQK_TEST_BING_KEY", "k123", 1);
  BingOptions options;
  options.endpoint = "http://127.0.0.1:" + std::to_string(port);
  options.key_env = "EQK_TEST_BING_KEY";
  options.market = "en-GB";
  options.requests_per_second = 100;
  options.retry.initial_backoff = std::chrono::milliseconds(1);
  BingEngine engine(options);
  EXPECT_EQ(engine.Search("oecd growth", 2), (Urls{"https://a.org", "https://b.org"}));
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(key, "k123");
  EXPECT_EQ(q, "oecd growth");
  EXPECT_EQ(count, "2");
  EXPECT_EQ(mkt, "en-GB");

  server.stop();
  thread.join();
  ::unsetenv("EQK_TEST_BING_KEY");
}

TEST(Bing, ClientErrorIsNotRetried) {
  httplib::Server server;
  std::atomic<int> calls{0};
  server.Get("/v7.0/search", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 401;
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  ::setenv("EQK_TEST_BING_KEY", "k", 1);
  BingOptions options;
  options.endpoint = "http://127.0.0.1:" + std::to_string(port);
  options.key_env = "EQK_TEST_BING_KEY";
  options.requests_per_second = 100;
  BingEngine engine(options);
  EXPECT_THROW(engine.Search("q", 10), SearchError);
  EXPECT_EQ(calls.load(), 1);
  server.stop();
  thread.join();
}

}  // namespace
}  // namespace eqk::search
