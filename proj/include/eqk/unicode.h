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

namespace eqk::unicode {

// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to
// U+FFFD, one replacement per offending byte.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view text);

// Number of scalar values in a UTF-8 string.
std::size_t Length(std::string_view utf8);

// Substring by scalar-value offsets [start, end).
std::string Substr(std::string_view utf8, std::size_t start, std::size_t end);

bool IsSpace(char32_t c);
char32_t ToLower(char32_t c);

std::string AsciiLower(std::string_view s);
std::string_view TrimView(std::string_view s);

}  // namespace eqk::unicode
