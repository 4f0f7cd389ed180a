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

#include <gtest/gtest.h>

#include "eqk/unicode.h"
#include "eqk/url.h"

namespace eqk {
namespace {

TEST(Unicode, RoundTripsUtf8) {
  const std::string s = "Caffè 北京 \xF0\x9F\x98\x80";
  EXPECT_EQ(unicode::Encode(unicode::Decode(s)), s);
  EXPECT_EQ(unicode::Length(s), 10u);
}

TEST(Unicode, InvalidBytesBecomeReplacement) {
  EXPECT_EQ(unicode::Decode("a\xFF" "b"), U"a�b");
  // Truncated two-byte sequence at the end.
  EXPECT_EQ(unicode::Decode("a\xC3"), U"a�");
}

TEST(Unicode, SubstrUsesScalarOffsets) {
  EXPECT_EQ(unicode::Substr("Caffè Nero", 0, 5), "Caffè");
  EXPECT_EQ(unicode::Substr("Caffè Nero", 6, 10), "Nero");
  EXPECT_EQ(unicode::Substr("abc", 2, 2), "");
}

TEST(Unicode, Lowercase) {
  EXPECT_EQ(unicode::ToLower(U'A'), U'a');
  EXPECT_EQ(unicode::ToLower(U'É'), U'é');
  EXPECT_EQ(unicode::ToLower(U'1'), U'1');
  EXPECT_EQ(unicode::AsciiLower("HeLLo É"), "hello É");
}

TEST(Unicode, Whitespace) {
  EXPECT_TRUE(unicode::IsSpace(U' '));
  EXPECT_TRUE(unicode::IsSpace(U'\t'));
  EXPECT_TRUE(unicode::IsSpace(U' '));
  EXPECT_TRUE(unicode::IsSpace(U'　'));
  EXPECT_FALSE(unicode::IsSpace(U'x'));
  EXPECT_EQ(unicode::TrimView("  a b \n"), "a b");
}

TEST(Url, Normalization) {
  EXPECT_EQ(NormalizeUrl("https://en.wikipedia.org/wiki/Liz_Truss"),
            "en.wikipedia.org/wiki/liz_truss");
  EXPECT_EQ(NormalizeUrl("http://www.oecd.org/economic-outlook/may-2021/"),
            "oecd.org/economic-outlook/may-2021");
  EXPECT_EQ(NormalizeUrl("  HTTPS://Example.com/a/#frag  "), "example.com/a");
  EXPECT_EQ(NormalizeUrl("example.com//"), "example.com");
}

TEST(Url, NormalizationIsIdempotent) {
  for (const char* u :
       {"https://www.bbc.co.uk/news/", "http://a.b/c#d/", "oecd.org/x",
        "https://www.www.example.com/", "ftp://host/path/"}) {
    const auto once = NormalizeUrl(u);
    EXPECT_EQ(NormalizeUrl(once), once) << u;
  }
}

TEST(Url, Matching) {
  EXPECT_TRUE(SameUrl("https://www.oecd.org/x/", "http://oecd.org/x"));
  EXPECT_FALSE(SameUrl("https://www.oecd.org/x/", "http://oecd.org/x",
                       UrlMatch::kStrict));
  EXPECT_TRUE(SameUrl("https://a.org/x", "https://a.org/x", UrlMatch::kStrict));
}

TEST(Url, Absolute) {
  EXPECT_TRUE(IsAbsoluteUrl("https://en.wikipedia.org/wiki/X"));
  EXPECT_TRUE(IsAbsoluteUrl("ftp://host"));
  EXPECT_FALSE(IsAbsoluteUrl("en.wikipedia.org/wiki/X"));
  EXPECT_FALSE(IsAbsoluteUrl("https://"));
  EXPECT_FALSE(IsAbsoluteUrl("1http://x"));
}

}  // namespace
}  // namespace eqk
