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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eqk::promptgen {

enum class FormatClass { kNoPrompt, kLongExplanation, kShortSuffix, kShortPrefix };

std::string_view FormatClassName(FormatClass format);

struct PromptTemplate {
  std::string template_id;
  std::optional<std::string> prefix;
  std::optional<std::string> suffix;
  FormatClass format_class = FormatClass::kNoPrompt;

  // Throws std::invalid_argument when prefix/suffix presence disagrees with
  // the format class.
  static PromptTemplate Make(std::string id, std::optional<std::string> prefix,
                             std::optional<std::string> suffix,
                             FormatClass format);
  bool operator==(const PromptTemplate&) const = default;
};

// no-prompt followed by template-01 ... template-12.
const std::vector<PromptTemplate>& BuiltinTemplates();
// Throws std::out_of_range for an unknown id.
const PromptTemplate& FindTemplate(std::string_view template_id);

struct InContextExample {
  std::string claim_text;
  std::string target_query;
  std::string source_claim_id;

  bool operator==(const InContextExample&) const = default;
};

// "prefix claim suffix", absent parts omitted, single spaces between parts.
std::string RenderZeroShot(const PromptTemplate& tpl, std::string_view claim);

// One "<zero-shot rendering of example> <target query>\n" block per example
// (1 to 3 of them), then the zero-shot rendering of the claim.
std::string RenderFewShot(const PromptTemplate& tpl,
                          std::span<const InContextExample> examples,
                          std::string_view claim);

// Strips every exact occurrence of the template's prefix and suffix from a
// model output, trims both ends and collapses runs of spaces. Partial
// inclusions stay. Repeats until stable, so the result never contains the
// prefix or suffix verbatim.
std::string Postprocess(std::string_view raw_output, const PromptTemplate& tpl);

}  // namespace eqk::promptgen
