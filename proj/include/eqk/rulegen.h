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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqk/corpus.h"
#include "eqk/method.h"

// Rule-based query generation over precomputed linguistic annotations.
namespace eqk::rulegen {

// Offsets count Unicode scalar values of the claim text, end exclusive.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
  std::optional<std::string> label;

  bool operator==(const Span&) const = default;
};

struct LinguisticAnnotation {
  std::string claim_id;
  std::vector<Span> entities;
  std::vector<Span> noun_phrases;
  std::vector<Span> tokens;

  bool operator==(const LinguisticAnnotation&) const = default;
};

struct GeneratedQuery {
  std::string claim_id;
  Method method = Method::kVerbatim;
  std::optional<std::string> template_id;
  std::string text;
  // The generator produced nothing. Such queries are kept and scored.
  bool empty = false;

  bool operator==(const GeneratedQuery&) const = default;
};

GeneratedQuery MakeQuery(std::string claim_id, Method method,
                         std::optional<std::string> template_id,
                         std::string text);

// Throws AnnotationError when a span is out of bounds, its text differs from
// the claim substring, a list is not sorted by start, or entities overlap.
void ValidateAnnotation(const LinguisticAnnotation& ann,
                        const corpus::ClaimRecord& claim);

// JSONL, one annotation per line. Structural checks only; pair with
// ValidateAnnotation against the claims to check offsets.
std::vector<LinguisticAnnotation> LoadAnnotations(
    const std::filesystem::path& path);
void WriteAnnotations(const std::filesystem::path& path,
                      std::span<const LinguisticAnnotation> annotations);

// Indexes annotations by claim_id after validating each against its claim.
// Annotations for unknown claims are rejected.
std::map<std::string, LinguisticAnnotation> IndexAnnotations(
    std::vector<LinguisticAnnotation> annotations,
    const corpus::Dataset& dataset);

GeneratedQuery Verbatim(const corpus::ClaimRecord& claim);
// Entity texts in sentence order, exact duplicates dropped, joined by ", ".
GeneratedQuery NamedEntities(const corpus::ClaimRecord& claim,
                             const LinguisticAnnotation& ann);
GeneratedQuery NounPhrases(const corpus::ClaimRecord& claim,
                           const LinguisticAnnotation& ann);

// Dispatches on a rule-based method.
GeneratedQuery Generate(Method method, const corpus::ClaimRecord& claim,
                        const LinguisticAnnotation* ann);

inline constexpr std::string_view kSeparator = ", ";

}  // namespace eqk::rulegen
