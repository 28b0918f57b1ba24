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

#ifndef PSEUDOQE_TAGS_HPP
#define PSEUDOQE_TAGS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pseudoqe/aligner.hpp"
#include "pseudoqe/ter.hpp"

namespace pseudoqe {

enum class Tag : std::uint8_t { OK, BAD };

using TagSeq = std::vector<Tag>;

const std::string& tag_name(Tag t);          // "OK" / "BAD"
Tag tag_from_string(const std::string& s);   // throws ScriptError otherwise

struct MtTags {
  TagSeq word;  // one per MT token: BAD when covered by Sub or Ins
  TagSeq gap;   // mt_len + 1: BAD where reference tokens were dropped
};

// Word and gap tags from a shift-free script covering mt_len hypothesis
// tokens. Adjacent deletions collapse into a single BAD gap.
// Throws ScriptError if the script does not cover exactly mt_len tokens.
MtTags mt_tags(const EditScript& script, int mt_len);

// Source tags: a source token is BAD iff linked to a pseudo-reference
// position that the script marks errorful (ref side of a Sub or a Del).
// Unlinked source tokens are OK.
// Throws AlignmentError on out-of-range links.
TagSeq source_tags(const Alignment& src_pe_links, const EditScript& script,
                   int src_len);

// gap[0], word[0], gap[1], ..., word[n-1], gap[n]  (the tag-file layout).
// Throws ScriptError unless |gap| == |word| + 1.
TagSeq interleave(const TagSeq& word, const TagSeq& gap);

}  // namespace pseudoqe

#endif  // PSEUDOQE_TAGS_HPP
