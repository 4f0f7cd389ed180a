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

#include "eqk/url.h"

#include <cctype>

#include "eqk/unicode.h"

namespace eqk {

std::string NormalizeUrl(std::string_view url) {
  std::string s = unicode::AsciiLower(unicode::TrimView(url));
  for (std::string_view scheme : {"https://", "http://"}) {
    if (s.starts_with(scheme)) {
      s.erase(0, scheme.size());
      break;
    }
  }
  while (s.starts_with("www.")) s.erase(0, 4);
  if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

bool IsAbsoluteUrl(std::string_view url) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(url[0]))) return false;
  for (std::size_t i = 1; i < sep; ++i) {
    const auto c = static_cast<unsigned char>(url[i]);
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  const std::string_view rest = url.substr(sep + 3);
  const auto host_end = rest.find_first_of("/?#");
  const std::string_view host = rest.substr(0, host_end);
  if (host.empty()) return false;
  for (char c : host) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool SameUrl(std::string_view a, std::string_view b, UrlMatch match) {
  if (match == UrlMatch::kStrict) return a == b;
  return NormalizeUrl(a) == NormalizeUrl(b);
}

}  // namespace eqk
