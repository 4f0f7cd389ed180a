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

#include "eqk/method.h"

#include <array>
#include <utility>

namespace eqk {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 8> kNames = {{
    {Method::kVerbatim, "verbatim"},
    {Method::kNamedEntities, "named_entities"},
    {Method::kNounPhrases, "noun_phrases"},
    {Method::kZeroShot, "zero_shot"},
    {Method::kFewShot1, "few_shot_1"},
    {Method::kFewShot2, "few_shot_2"},
    {Method::kFewShot3, "few_shot_3"},
    {Method::kFineTuned, "fine_tuned"},
}};

}  // namespace

std::string_view MethodName(Method method) {
  for (const auto& [m, name] : kNames) {
    if (m == method) return name;
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (const auto& [m, n] : kNames) {
    if (n == name) return m;
  }
  // Short CLI aliases.
  if (name == "ne") return Method::kNamedEntities;
  if (name == "np") return Method::kNounPhrases;
  if (name == "zero-shot") return Method::kZeroShot;
  if (name == "fine-tuned") return Method::kFineTuned;
  return std::nullopt;
}

const std::vector<Method>& AllMethods() {
  static const std::vector<Method> all = [] {
    std::vector<Method> v;
    for (const auto& [m, n] : kNames) v.push_back(m);
    return v;
  }();
  return all;
}

bool IsRuleBased(Method method) {
  return method == Method::kVerbatim || method == Method::kNamedEntities ||
         method == Method::kNounPhrases;
}

int ShotCount(Method method) {
  switch (method) {
    case Method::kFewShot1:
      return 1;
    case Method::kFewShot2:
      return 2;
    case Method::kFewShot3:
      return 3;
    default:
      return 0;
  }
}

bool UsesTemplate(Method method) { return !IsRuleBased(method); }

}  // namespace eqk
