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

// JSON mappings for the wire formats (snake_case keys throughout).

#include <json.hpp>

#include "eqk/backend.h"
#include "eqk/corpus.h"
#include "eqk/rulegen.h"
#include "eqk/search.h"
#include "eqk/searchmetrics.h"
#include "eqk/textmetrics.h"

namespace eqk::corpus {
void to_json(nlohmann::json& j, const ClaimRecord& r);
void from_json(const nlohmann::json& j, ClaimRecord& r);
}  // namespace eqk::corpus

namespace eqk::rulegen {
void to_json(nlohmann::json& j, const Span& s);
void from_json(const nlohmann::json& j, Span& s);
void to_json(nlohmann::json& j, const LinguisticAnnotation& a);
void from_json(const nlohmann::json& j, LinguisticAnnotation& a);
void to_json(nlohmann::json& j, const GeneratedQuery& q);
void from_json(const nlohmann::json& j, GeneratedQuery& q);
}  // namespace eqk::rulegen

namespace eqk::promptgen {
void to_json(nlohmann::json& j, const GenerationParams& p);
void from_json(const nlohmann::json& j, GenerationParams& p);
}  // namespace eqk::promptgen

namespace eqk::search {
void to_json(nlohmann::json& j, const ResultList& r);
void from_json(const nlohmann::json& j, ResultList& r);
void to_json(nlohmann::json& j, const SampleSearchOutcome& o);
void from_json(const nlohmann::json& j, SampleSearchOutcome& o);
void to_json(nlohmann::json& j, const SearchMetrics& m);
}  // namespace eqk::search

namespace eqk::textmetrics {
void to_json(nlohmann::json& j, const RougeScore& s);
void to_json(nlohmann::json& j, const SimilarityReport& r);
}  // namespace eqk::textmetrics
