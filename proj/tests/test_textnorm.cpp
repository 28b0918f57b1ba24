// Copyright 2026 the pseudoqe authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "pseudoqe/error.hpp"
#include "pseudoqe/textnorm.hpp"
#include "testutil.hpp"

using namespace pseudoqe;

namespace {

// Random UTF-8 over several ranges: ASCII, Latin-1, combining marks,
// general punctuation, CJK, plus whitespace.
std::string random_unicode(testutil::Rng& rng, int max_cps) {
  static const std::vector<std::pair<char32_t, char32_t>> ranges = {
      {0x20, 0x7e},     {0xa1, 0xff},     {0x300, 0x36f},
      {0x2000, 0x203c}, {0x4e00, 0x4e2f}, {0x1f600, 0x1f60f},
  };
  std::string out;
  const int n = rng.below(max_cps + 1);
  for (int i = 0; i < n; ++i) {
    if (rng.below(6) == 0) {
      out.push_back(' ');
      continue;
    }
    const auto& [lo, hi] = ranges[static_cast<size_t>(rng.below(static_cast<int>(ranges.size())))];
    char32_t cp = lo + static_cast<char32_t>(rng.below(static_cast<int>(hi - lo + 1)));
    // manual UTF-8 encode
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("normalize splits punctuation and lowercases") {
  CHECK(normalize("Hello,  world!") == "hello , world !");
  CHECK(normalize("") == "");
  CHECK(normalize("3.14 runs.") == "3.14 runs .");
}

TEST_CASE("decimal separators stay attached only between digits") {
  CHECK(normalize("1,000.5") == "1,000.5");
  CHECK(normalize("end.") == "end .");
  CHECK(normalize(".5") == ". 5");
  CHECK(normalize("3.") == "3 .");
}

TEST_CASE("tokenize basics") {
  CHECK(tokenize("Hello, world!") == TokenSeq{"hello", ",", "world", "!"});
  CHECK(tokenize("a  b") == TokenSeq{"a", "b"});
  CHECK(tokenize("Don't stop") == TokenSeq{"don", "'", "t", "stop"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \t \n ").empty());
}

TEST_CASE("policy flags") {
  NormPolicy keep_case;
  keep_case.lowercase = false;
  CHECK(normalize("Hello", keep_case) == "Hello");

  NormPolicy keep_punct;
  keep_punct.split_punct = false;
  CHECK(normalize("Don't", keep_punct) == "don't");
}

TEST_CASE("nfc composes combining marks") {
  const std::string decomposed = "e\xcc\x81";  // e + COMBINING ACUTE
  CHECK(normalize(decomposed) == "\xc3\xa9");  // precomposed é
  NormPolicy no_nfc;
  no_nfc.nfc = false;
  CHECK(normalize(decomposed, no_nfc) == decomposed);
}

TEST_CASE("invalid UTF-8 is rejected") {
  CHECK_THROWS_AS(normalize("ab\xffz"), EncodingError);
  CHECK_THROWS_AS(tokenize("\xc3"), EncodingError);  // truncated sequence
}

TEST_CASE("tokenize is idempotent on random unicode") {
  testutil::Rng rng(20260809);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string text = random_unicode(rng, 40);
    const TokenSeq once = tokenize(text);
    const TokenSeq twice = tokenize(join(once));
    CHECK(once == twice);
    for (const std::string& tok : once) {
      CHECK(!tok.empty());
      CHECK(tok.find(' ') == std::string::npos);
    }
  }
}

TEST_CASE("normalize is idempotent on random unicode") {
  testutil::Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string text = random_unicode(rng, 30);
    const std::string once = normalize(text);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("join round trips whitespace-free tokens") {
  const TokenSeq tokens{"a", "b,c", "седм"};
  CHECK(split_ws(join(tokens)) == tokens);
}
