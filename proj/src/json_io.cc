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

#include "eqk/json_io.h"

namespace eqk::corpus {

void to_json(nlohmann::json& j, const ClaimRecord& r) {
  j = {{"claim_id", r.claim_id},
       {"article_id", r.article_id},
       {"claim_text", r.claim_text},
       {"target_query", r.target_query},
       {"target_url", r.target_url}};
  if (r.context_sentences) j["context_sentences"] = *r.context_sentences;
}

void from_json(const nlohmann::json& j, ClaimRecord& r) {
  j.at("claim_id").get_to(r.claim_id);
  j.at("article_id").get_to(r.article_id);
  j.at("claim_text").get_to(r.claim_text);
  j.at("target_query").get_to(r.target_query);
  j.at("target_url").get_to(r.target_url);
  if (j.contains("context_sentences") && !j["context_sentences"].is_null()) {
    r.context_sentences = j["context_sentences"].get<std::vector<std::string>>();
  } else {
    r.context_sentences.reset();
  }
}

}  // namespace eqk::corpus

namespace eqk::rulegen {

void to_json(nlohmann::json& j, const Span& s) {
  j = {{"start", s.start}, {"end", s.end}, {"text", s.text}};
  if (s.label) j["label"] = *s.label;
}

void from_json(const nlohmann::json& j, Span& s) {
  j.at("start").get_to(s.start);
  j.at("end").get_to(s.end);
  j.at("text").get_to(s.text);
  if (j.contains("label") && j["label"].is_string() &&
      !j["label"].get<std::string>().empty()) {
    s.label = j["label"].get<std::string>();
  } else {
    s.label.reset();
  }
}

void to_json(nlohmann::json& j, const LinguisticAnnotation& a) {
  j = {{"claim_id", a.claim_id},
       {"entities", a.entities},
       {"noun_phrases", a.noun_phrases},
       {"tokens", a.tokens}};
}

void from_json(const nlohmann::json& j, LinguisticAnnotation& a) {
  j.at("claim_id").get_to(a.claim_id);
  a.entities = j.value("entities", std::vector<Span>{});
  a.noun_phrases = j.value("noun_phrases", std::vector<Span>{});
  a.tokens = j.value("tokens", std::vector<Span>{});
}

void to_json(nlohmann::json& j, const GeneratedQuery& q) {
  j = {{"claim_id", q.claim_id},
       {"method", MethodName(q.method)},
       {"template_id", q.template_id ? nlohmann::json(*q.template_id)
                                     : nlohmann::json(nullptr)},
       {"text", q.text},
       {"empty", q.empty}};
}

void from_json(const nlohmann::json& j, GeneratedQuery& q) {
  j.at("claim_id").get_to(q.claim_id);
  const auto method = ParseMethod(j.at("method").get<std::string>());
  if (!method) {
    throw nlohmann::json::other_error::create(
        501, "unknown method " + j.at("method").get<std::string>(), &j);
  }
  q.method = *method;
  if (j.contains("template_id") && j["template_id"].is_string()) {
    q.template_id = j["template_id"].get<std::string>();
  } else {
    q.template_id.reset();
  }
  j.at("text").get_to(q.text);
  q.empty = j.value("empty", q.text.empty());
}

}  // namespace eqk::rulegen

namespace eqk::promptgen {

void to_json(nlohmann::json& j, const GenerationParams& p) {
  j = {{"num_beams", p.num_beams},
       {"forbid_repeated_bigrams", p.forbid_repeated_bigrams},
       {"early_stopping", p.early_stopping},
       {"max_new_tokens", p.max_new_tokens}};
}

void from_json(const nlohmann::json& j, GenerationParams& p) {
  const GenerationParams defaults;
  p.num_beams = j.value("num_beams", defaults.num_beams);
  p.forbid_repeated_bigrams =
      j.value("forbid_repeated_bigrams", defaults.forbid_repeated_bigrams);
  p.early_stopping = j.value("early_stopping", defaults.early_stopping);
  p.max_new_tokens = j.value("max_new_tokens", defaults.max_new_tokens);
}

}  // namespace eqk::promptgen

namespace eqk::search {

void to_json(nlohmann::json& j, const ResultList& r) {
  j = {{"query_text", r.query_text},
       {"engine_id", r.engine_id},
       {"execution_index", r.execution_index},
       {"urls", r.urls},
       {"retrieved_at_ms", r.retrieved_at_ms},
       {"failed", r.failed}};
}

void from_json(const nlohmann::json& j, ResultList& r) {
  j.at("query_text").get_to(r.query_text);
  j.at("engine_id").get_to(r.engine_id);
  j.at("execution_index").get_to(r.execution_index);
  j.at("urls").get_to(r.urls);
  r.retrieved_at_ms = j.value("retrieved_at_ms", std::int64_t{0});
  r.failed = j.value("failed", false);
}

void to_json(nlohmann::json& j, const SampleSearchOutcome& o) {
  nlohmann::json ranks = nlohmann::json::array();
  for (const auto& r : o.best_rank_per_list) {
    ranks.push_back(r ? nlohmann::json(*r) : nlohmann::json(nullptr));
  }
  j = {{"claim_id", o.claim_id},
       {"method", o.method},
       {"target_url", o.target_url},
       {"lists", o.lists},
       {"target_found_per_list", o.target_found_per_list},
       {"best_rank_per_list", ranks}};
}

void from_json(const nlohmann::json& j, SampleSearchOutcome& o) {
  // Found flags and ranks are recomputed from the lists.
  o = MakeOutcome(j.at("claim_id").get<std::string>(),
                  j.at("method").get<std::string>(),
                  j.at("target_url").get<std::string>(),
                  j.at("lists").get<std::vector<ResultList>>());
}

void to_json(nlohmann::json& j, const SearchMetrics& m) {
  j = {{"fa_pct", m.fa_pct},
       {"fm_pct", m.fm_pct},
       {"fo_pct", m.fo_pct},
       {"mrr", m.mrr}};
}

}  // namespace eqk::search

namespace eqk::textmetrics {

void to_json(nlohmann::json& j, const RougeScore& s) {
  j = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

void to_json(nlohmann::json& j, const SimilarityReport& r) {
  j = {{"rouge1", r.rouge1},
       {"rouge2", r.rouge2},
       {"rougeL", r.rougeL},
       {"levenshtein_distance", r.levenshtein_distance},
       {"levenshtein_ratio", r.levenshtein_ratio}};
}

}  // namespace eqk::textmetrics
