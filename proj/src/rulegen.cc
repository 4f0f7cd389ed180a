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

#include "eqk/rulegen.h"

#include <fstream>
#include <set>

#include <json.hpp>

#include "eqk/error.h"
#include "eqk/json_io.h"
#include "eqk/unicode.h"

namespace eqk::rulegen {

using nlohmann::json;

namespace {

void CheckSpans(const std::vector<Span>& spans, std::u32string_view claim,
                const std::string& kind, const std::string& claim_id,
                bool disjoint) {
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    if (s.start >= s.end || s.end > claim.size()) {
      throw AnnotationError(claim_id + ": " + kind + " span [" +
                            std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ") outside claim of length " +
                            std::to_string(claim.size()));
    }
    const std::string actual =
        unicode::Encode(claim.substr(s.start, s.end - s.start));
    if (actual != s.text) {
      throw AnnotationError(claim_id + ": " + kind + " span [" +
                            std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ") text '" + s.text +
                            "' does not match claim substring '" + actual + "'");
    }
    if (i > 0) {
      if (spans[i - 1].start > s.start) {
        throw AnnotationError(claim_id + ": " + kind +
                              " spans not sorted by start offset");
      }
      if (disjoint && spans[i - 1].end > s.start) {
        throw AnnotationError(claim_id + ": overlapping " + kind + " spans");
      }
    }
  }
}

GeneratedQuery JoinSpans(const corpus::ClaimRecord& claim,
                         const LinguisticAnnotation& ann,
                         const std::vector<Span>& spans, Method method) {
  if (ann.claim_id != claim.claim_id) {
    throw std::invalid_argument("annotation " + ann.claim_id +
                                " does not belong to claim " + claim.claim_id);
  }
  std::set<std::string> seen;
  std::string joined;
  for (const Span& s : spans) {
    if (s.text.empty() || !seen.insert(s.text).second) continue;
    if (!joined.empty()) joined += kSeparator;
    joined += s.text;
  }
  return MakeQuery(claim.claim_id, method, std::nullopt, std::move(joined));
}

}  // namespace

GeneratedQuery MakeQuery(std::string claim_id, Method method,
                         std::optional<std::string> template_id,
                         std::string text) {
  GeneratedQuery q;
  q.claim_id = std::move(claim_id);
  q.method = method;
  q.template_id = std::move(template_id);
  q.empty = text.empty();
  q.text = std::move(text);
  return q;
}

void ValidateAnnotation(const LinguisticAnnotation& ann,
                        const corpus::ClaimRecord& claim) {
  if (ann.claim_id != claim.claim_id) {
    throw AnnotationError("annotation " + ann.claim_id +
                          " paired with claim " + claim.claim_id);
  }
  const std::u32string text = unicode::Decode(claim.claim_text);
  CheckSpans(ann.entities, text, "entity", ann.claim_id, true);
  CheckSpans(ann.noun_phrases, text, "noun phrase", ann.claim_id, false);
  CheckSpans(ann.tokens, text, "token", ann.claim_id, false);
}

std::vector<LinguisticAnnotation> LoadAnnotations(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AnnotationError("cannot open annotations " + path.string());
  std::vector<LinguisticAnnotation> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    LinguisticAnnotation ann;
    try {
      ann = json::parse(line).get<LinguisticAnnotation>();
    } catch (const json::exception& e) {
      throw AnnotationError(std::string("malformed annotation: ") + e.what(),
                            line_no);
    }
    if (!ids.insert(ann.claim_id).second) {
      throw AnnotationError("duplicate annotation for claim " + ann.claim_id,
                            line_no);
    }
    out.push_back(std::move(ann));
  }
  return out;
}

void WriteAnnotations(const std::filesystem::path& path,
                      std::span<const LinguisticAnnotation> annotations) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw AnnotationError("cannot write " + path.string());
  for (const auto& ann : annotations) out << json(ann).dump() << '\n';
}

std::map<std::string, LinguisticAnnotation> IndexAnnotations(
    std::vector<LinguisticAnnotation> annotations,
    const corpus::Dataset& dataset) {
  std::map<std::string, const corpus::ClaimRecord*> claims;
  for (const auto& r : dataset.records) claims[r.claim_id] = &r;
  std::map<std::string, LinguisticAnnotation> index;
  for (auto& ann : annotations) {
    auto it = claims.find(ann.claim_id);
    if (it == claims.end()) {
      throw AnnotationError("annotation for unknown claim " + ann.claim_id);
    }
    ValidateAnnotation(ann, *it->second);
    std::string id = ann.claim_id;
    index.emplace(std::move(id), std::move(ann));
  }
  return index;
}

GeneratedQuery Verbatim(const corpus::ClaimRecord& claim) {
  return MakeQuery(claim.claim_id, Method::kVerbatim, std::nullopt,
                   claim.claim_text);
}

GeneratedQuery NamedEntities(const corpus::ClaimRecord& claim,
                             const LinguisticAnnotation& ann) {
  return JoinSpans(claim, ann, ann.entities, Method::kNamedEntities);
}

GeneratedQuery NounPhrases(const corpus::ClaimRecord& claim,
                           const LinguisticAnnotation& ann) {
  return JoinSpans(claim, ann, ann.noun_phrases, Method::kNounPhrases);
}

GeneratedQuery Generate(Method method, const corpus::ClaimRecord& claim,
                        const LinguisticAnnotation* ann) {
  switch (method) {
    case Method::kVerbatim:
      return Verbatim(claim);
    case Method::kNamedEntities:
    case Method::kNounPhrases: {
      if (ann == nullptr) {
        throw AnnotationError("no annotation for claim " + claim.claim_id);
      }
      return method == Method::kNamedEntities ? NamedEntities(claim, *ann)
                                              : NounPhrases(claim, *ann);
    }
    default:
      throw std::invalid_argument(std::string(MethodName(method)) +
                                  " is not a rule-based method");
  }
}

}  // namespace eqk::rulegen
