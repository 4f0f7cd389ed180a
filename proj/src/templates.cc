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

#include "eqk/templates.h"

#include <stdexcept>

#include "eqk/unicode.h"

namespace eqk::promptgen {

std::string_view FormatClassName(FormatClass format) {
  switch (format) {
    case FormatClass::kNoPrompt:
      return "no_prompt";
    case FormatClass::kLongExplanation:
      return "long_explanation";
    case FormatClass::kShortSuffix:
      return "short_suffix";
    case FormatClass::kShortPrefix:
      return "short_prefix";
  }
  return "unknown";
}

PromptTemplate PromptTemplate::Make(std::string id,
                                    std::optional<std::string> prefix,
                                    std::optional<std::string> suffix,
                                    FormatClass format) {
  if (id.empty()) throw std::invalid_argument("template id is empty");
  const bool want_prefix = format == FormatClass::kLongExplanation ||
                           format == FormatClass::kShortPrefix;
  const bool want_suffix = format == FormatClass::kLongExplanation ||
                           format == FormatClass::kShortSuffix;
  if (prefix.has_value() != want_prefix || suffix.has_value() != want_suffix ||
      (prefix && prefix->empty()) || (suffix && suffix->empty())) {
    throw std::invalid_argument("template " + id +
                                ": prefix/suffix do not match format class " +
                                std::string(FormatClassName(format)));
  }
  return PromptTemplate{std::move(id), std::move(prefix), std::move(suffix),
                        format};
}

const std::vector<PromptTemplate>& BuiltinTemplates() {
  using F = FormatClass;
  using std::nullopt;
  static const std::vector<PromptTemplate> templates = {
      PromptTemplate::Make("no-prompt", nullopt, nullopt, F::kNoPrompt),
      PromptTemplate::Make("template-01", "Generate search query:",
                           "Search query:", F::kLongExplanation),
      PromptTemplate::Make("template-02", "Fact-check the following sentence:",
                           "Fact-check:", F::kLongExplanation),
      PromptTemplate::Make("template-03", "Verify the following sentence:",
                           "Verify:", F::kLongExplanation),
      PromptTemplate::Make("template-04", "Summarize the following sentence:",
                           "Summarize:", F::kLongExplanation),
      PromptTemplate::Make("template-05", nullopt, "Search query:",
                           F::kShortSuffix),
      PromptTemplate::Make("template-06", nullopt, "Fact-Check:",
                           F::kShortSuffix),
      PromptTemplate::Make("template-07", nullopt, "Verify:", F::kShortSuffix),
      PromptTemplate::Make("template-08", nullopt, "Summarize:",
                           F::kShortSuffix),
      PromptTemplate::Make("template-09", "Search query:", nullopt,
                           F::kShortPrefix),
      PromptTemplate::Make("template-10", "Fact-Check:", nullopt,
                           F::kShortPrefix),
      PromptTemplate::Make("template-11", "Verify:", nullopt, F::kShortPrefix),
      PromptTemplate::Make("template-12", "Summarize:", nullopt,
                           F::kShortPrefix),
  };
  return templates;
}

const PromptTemplate& FindTemplate(std::string_view template_id) {
  for (const auto& tpl : BuiltinTemplates()) {
    if (tpl.template_id == template_id) return tpl;
  }
  throw std::out_of_range("unknown template '" + std::string(template_id) +
                          "'");
}

std::string RenderZeroShot(const PromptTemplate& tpl, std::string_view claim) {
  std::string out;
  auto append = [&out](std::string_view part) {
    if (part.empty()) return;
    if (!out.empty()) out.push_back(' ');
    out.append(part);
  };
  if (tpl.prefix) append(*tpl.prefix);
  append(claim);
  if (tpl.suffix) append(*tpl.suffix);
  return out;
}

std::string RenderFewShot(const PromptTemplate& tpl,
                          std::span<const InContextExample> examples,
                          std::string_view claim) {
  if (examples.empty() || examples.size() > 3) {
    throw std::invalid_argument("few-shot rendering needs 1 to 3 examples, got " +
                                std::to_string(examples.size()));
  }
  std::string out;
  for (const auto& ex : examples) {
    out += RenderZeroShot(tpl, ex.claim_text);
    out += ' ';
    out += ex.target_query;
    out += '\n';
  }
  out += RenderZeroShot(tpl, claim);
  return out;
}

namespace {

bool RemoveAll(std::string& s, const std::optional<std::string>& needle) {
  if (!needle || needle->empty()) return false;
  bool changed = false;
  for (auto pos = s.find(*needle); pos != std::string::npos;
       pos = s.find(*needle, pos)) {
    s.erase(pos, needle->size());
    changed = true;
  }
  return changed;
}

std::string CollapseSpaces(std::string_view s) {
  std::string out;
  for (char c : unicode::TrimView(s)) {
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string Postprocess(std::string_view raw_output, const PromptTemplate& tpl) {
  std::string s(raw_output);
  std::string before;
  do {
    before = s;
    RemoveAll(s, tpl.prefix);
    RemoveAll(s, tpl.suffix);
    s = CollapseSpaces(s);
  } while (s != before);
  return s;
}

}  // namespace eqk::promptgen
