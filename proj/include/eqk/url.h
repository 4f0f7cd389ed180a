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

#include <string>
#include <string_view>

namespace eqk {

// Canonical form used to decide whether a result list contains the target:
// lowercased, no "http://"/"https://" scheme, no leading "www.", no
// fragment, no trailing slashes. Idempotent.
std::string NormalizeUrl(std::string_view url);

// True for "<scheme>://<host>..." with an RFC 3986 scheme and non-empty host.
bool IsAbsoluteUrl(std::string_view url);

enum class UrlMatch { kNormalized, kStrict };

bool SameUrl(std::string_view a, std::string_view b,
             UrlMatch match = UrlMatch::kNormalized);

}  // namespace eqk
