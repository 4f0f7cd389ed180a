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

#include "eqk/snapshot.h"

#include <fstream>

#include <spdlog/spdlog.h>

#include "eqk/error.h"
#include "eqk/json_io.h"

namespace eqk::search {

SnapshotStore::SnapshotStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw SnapshotError("snapshot store: cannot create " + dir_.string() +
                        ": " + ec.message());
  }
}

std::filesystem::path SnapshotStore::FileFor(std::string_view engine_id) const {
  std::string name;
  for (char c : engine_id) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                      c == '_' || c == '.';
    name.push_back(safe ? c : '_');
  }
  if (name.empty()) name = "engine";
  return dir_ / (name + ".jsonl");
}

void SnapshotStore::Put(const ResultList& list) {
  const std::string line = nlohmann::json(list).dump();
  std::lock_guard lock(write_mu_);
  std::ofstream out(FileFor(list.engine_id), std::ios::app | std::ios::binary);
  if (!out) {
    throw SnapshotError("snapshot store: cannot open " +
                        FileFor(list.engine_id).string() + " for append");
  }
  out << line << '\n';
  out.flush();
  if (!out) throw SnapshotError("snapshot store: write failed");
}

std::vector<ResultList> SnapshotStore::Get(
    std::string_view query, std::string_view engine_id,
    std::optional<std::chrono::milliseconds> max_age,
    std::optional<std::int64_t> now_ms) const {
  std::vector<ResultList> out;
  const auto path = FileFor(engine_id);
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("snapshot store: cannot read " + path.string());
  const std::int64_t cutoff =
      max_age ? now_ms.value_or(NowMs()) - max_age->count()
              : std::numeric_limits<std::int64_t>::min();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ResultList list;
    try {
      list = nlohmann::json::parse(line).get<ResultList>();
    } catch (const nlohmann::json::exception& e) {
      spdlog::warn("snapshot store: skipping corrupt record {}:{}: {}",
                   path.string(), line_no, e.what());
      continue;
    }
    if (list.query_text == query && list.engine_id == engine_id &&
        list.retrieved_at_ms >= cutoff) {
      out.push_back(std::move(list));
    }
  }
  return out;
}

}  // namespace eqk::search
