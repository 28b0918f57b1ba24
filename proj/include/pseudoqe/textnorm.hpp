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

#ifndef PSEUDOQE_TEXTNORM_HPP
#define PSEUDOQE_TEXTNORM_HPP

#include <string>
#include <string_view>
#include <vector>

namespace pseudoqe {

// Whitespace-free, non-empty tokens. Joining with single spaces and
// re-tokenizing reproduces the sequence.
using TokenSeq = std::vector<std::string>;

struct NormPolicy {
  bool lowercase = true;    // simple (language-agnostic) per-codepoint mapping
  bool split_punct = true;  // isolate Unicode category-P characters
  bool nfc = true;          // canonical composition
};

// Canonical text normalization: NFC, optional lowercasing, punctuation
// isolated by single spaces (a '.' or ',' directly between two decimal
// digits stays attached), whitespace runs collapsed, ends trimmed.
// Idempotent: normalize(normalize(x)) == normalize(x).
// Throws EncodingError on invalid UTF-8.
std::string normalize(std::string_view text, const NormPolicy& policy = {});

// normalize() then split on spaces. Empty text gives an empty sequence.
TokenSeq tokenize(std::string_view text, const NormPolicy& policy = {});

// Tokens joined with single spaces.
std::string join(const TokenSeq& tokens);

// Plain whitespace split without any normalization (for pre-tokenized input).
TokenSeq split_ws(std::string_view text);

}  // namespace pseudoqe

#endif  // PSEUDOQE_TEXTNORM_HPP
