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
#include <string>
#include <string_view>
#include <vector>

namespace eqk {

// Query generation methods. The wire name is the snake_case spelling.
enum class Method {
  kVerbatim,
  kNamedEntities,
  kNounPhrases,
  kZeroShot,
  kFewShot1,
  kFewShot2,
  kFewShot3,
  kFineTuned,
};

std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);
const std::vector<Method>& AllMethods();

bool IsRuleBased(Method method);
// Number of in-context examples; 0 for every non few-shot method.
int ShotCount(Method method);
bool UsesTemplate(Method method);

}  // namespace eqk
