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

#include "pseudoqe/textnorm.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <sstream>

#include "pseudoqe/error.hpp"

namespace pseudoqe {

namespace {

bool is_category_p(UChar32 c) {
  switch (u_charType(c)) {
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_CONNECTOR_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
      return true;
    default:
      return false;
  }
}

bool is_decimal_digit(UChar32 c) {
  return u_charType(c) == U_DECIMAL_DIGIT_NUMBER;
}

std::vector<UChar32> decode_utf8(std::string_view text) {
  std::vector<UChar32> out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  int32_t i = 0;
  const auto len = static_cast<int32_t>(text.size());
  while (i < len) {
    UChar32 c;
    const int32_t at = i;
    U8_NEXT(s, i, len, c);
    if (c < 0) {
      std::ostringstream msg;
      msg << "invalid UTF-8 at byte " << at;
      throw EncodingError(msg.str());
    }
    out.push_back(c);
  }
  return out;
}

void append_utf8(std::string& out, UChar32 c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool err = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, c, err);
  if (!err) out.append(reinterpret_cast<char*>(buf), n);
}

std::vector<UChar32> compose_nfc(const std::vector<UChar32>& cps) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC instance unavailable");
  icu::UnicodeString u;
  for (UChar32 c : cps) u.append(c);
  icu::UnicodeString composed = nfc->normalize(u, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::vector<UChar32> out;
  out.reserve(static_cast<size_t>(composed.countChar32()));
  for (int32_t i = 0; i < composed.length();) {
    UChar32 c = composed.char32At(i);
    out.push_back(c);
    i += U16_LENGTH(c);
  }
  return out;
}

}  // namespace

std::string normalize(std::string_view text, const NormPolicy& policy) {
  std::vector<UChar32> cps = decode_utf8(text);
  if (policy.nfc) cps = compose_nfc(cps);

  std::string out;
  out.reserve(text.size() + 8);
  bool pending_space = false;  // emit one space before the next character
  auto emit = [&](UChar32 c) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    append_utf8(out, policy.lowercase ? u_tolower(c) : c);
  };

  for (size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i];
    if (u_isUWhiteSpace(c)) {
      pending_space = true;
      continue;
    }
    if (policy.split_punct && is_category_p(c)) {
      const bool decimal_sep =
          (c == '.' || c == ',') && i > 0 && i + 1 < cps.size() &&
          is_decimal_digit(cps[i - 1]) && is_decimal_digit(cps[i + 1]);
      if (!decimal_sep) {
        pending_space = true;
        emit(c);
        pending_space = true;
        continue;
      }
    }
    emit(c);
  }
  return out;
}

TokenSeq tokenize(std::string_view text, const NormPolicy& policy) {
  return split_ws(normalize(text, policy));
}

std::string join(const TokenSeq& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

TokenSeq split_ws(std::string_view text) {
  TokenSeq out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                               text[i] == '\n' || text[i] == '\r'))
      ++i;
    size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' &&
           text[i] != '\n' && text[i] != '\r')
      ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

}  // namespace pseudoqe
