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
#include <filesystem>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "eqk/search.h"

namespace eqk::search {

// Append-only JSONL store of executed result lists, one file per engine
// (<dir>/<engine_id>.jsonl). One writer, many readers: readers skip a
// partially written trailing line as corrupt.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::filesystem::path dir);

  void Put(const ResultList& list);

  // Every stored execution of `query` on `engine_id`, in insertion order.
  // With max_age, only executions retrieved at or after now - max_age.
  std::vector<ResultList> Get(
      std::string_view query, std::string_view engine_id,
      std::optional<std::chrono::milliseconds> max_age = std::nullopt,
      std::optional<std::int64_t> now_ms = std::nullopt) const;

  std::filesystem::path FileFor(std::string_view engine_id) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex write_mu_;
};

}  // namespace eqk::search
