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

#include "pseudoqe/tags.hpp"

#include <sstream>

#include "pseudoqe/error.hpp"

namespace pseudoqe {

const std::string& tag_name(Tag t) {
  static const std::string ok = "OK";
  static const std::string bad = "BAD";
  return t == Tag::OK ? ok : bad;
}

Tag tag_from_string(const std::string& s) {
  if (s == "OK") return Tag::OK;
  if (s == "BAD") return Tag::BAD;
  throw ScriptError("unknown tag value '" + s + "'");
}

MtTags mt_tags(const EditScript& script, int mt_len) {
  if (mt_len < 0) throw ScriptError("negative MT length");
  MtTags out;
  out.word.assign(static_cast<size_t>(mt_len), Tag::OK);
  out.gap.assign(static_cast<size_t>(mt_len) + 1, Tag::OK);

  int consumed = 0;  // hypothesis tokens covered so far == current gap slot
  for (const EditOp& op : script) {
    switch (op.kind) {
      case OpKind::Match:
      case OpKind::Sub:
      case OpKind::Ins:
        if (op.hyp != consumed || consumed >= mt_len) {
          std::ostringstream msg;
          msg << "script covers hypothesis position " << op.hyp
              << " where position " << consumed << " of " << mt_len
              << " was expected";
          throw ScriptError(msg.str());
        }
        out.word[consumed] = (op.kind == OpKind::Match) ? Tag::OK : Tag::BAD;
        ++consumed;
        break;
      case OpKind::Del:
        out.gap[consumed] = Tag::BAD;
        break;
      case OpKind::Shift:
        throw ScriptError("tagging requires a shift-free script");
    }
  }
  if (consumed != mt_len) {
    std::ostringstream msg;
    msg << "script covers " << consumed << " hypothesis tokens, expected "
        << mt_len;
    throw ScriptError(msg.str());
  }
  return out;
}

TagSeq source_tags(const Alignment& src_pe_links, const EditScript& script,
                   int src_len) {
  if (src_len < 0) throw AlignmentError("negative source length");

  int pe_len = 0;
  for (const EditOp& op : script)
    if (op.kind == OpKind::Match || op.kind == OpKind::Sub ||
        op.kind == OpKind::Del)
      ++pe_len;

  std::vector<char> errorful(static_cast<size_t>(pe_len), 0);
  for (const EditOp& op : script)
    if (op.kind == OpKind::Sub || op.kind == OpKind::Del)
      errorful[static_cast<size_t>(op.ref)] = 1;

  TagSeq tags(static_cast<size_t>(src_len), Tag::OK);
  for (const Link& link : src_pe_links.links) {
    if (link.src < 0 || link.src >= src_len || link.tgt < 0 ||
        link.tgt >= pe_len) {
      std::ostringstream msg;
      msg << "link " << link.src << "-" << link.tgt
          << " out of range for source length " << src_len
          << " and reference length " << pe_len;
      throw AlignmentError(msg.str());
    }
    if (errorful[static_cast<size_t>(link.tgt)])
      tags[static_cast<size_t>(link.src)] = Tag::BAD;
  }
  return tags;
}

TagSeq interleave(const TagSeq& word, const TagSeq& gap) {
  if (gap.size() != word.size() + 1) {
    std::ostringstream msg;
    msg << "gap/word length mismatch: " << gap.size() << " vs " << word.size();
    throw ScriptError(msg.str());
  }
  TagSeq out;
  out.reserve(2 * word.size() + 1);
  for (size_t i = 0; i < word.size(); ++i) {
    out.push_back(gap[i]);
    out.push_back(word[i]);
  }
  out.push_back(gap.back());
  return out;
}

}  // namespace pseudoqe
