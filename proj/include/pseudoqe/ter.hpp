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

#ifndef PSEUDOQE_TER_HPP
#define PSEUDOQE_TER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "pseudoqe/textnorm.hpp"

namespace pseudoqe {

enum class OpKind : std::uint8_t { Match, Sub, Ins, Del, Shift };

// One edit operation. Field meaning depends on kind:
//   Match/Sub: hyp and ref are the aligned positions.
//   Ins:       hyp is the spurious hypothesis position (ref unused).
//   Del:       ref is the uncovered reference position (hyp unused).
//   Shift:     hyp = block start, len = block length, ref = destination
//              (insertion index into the sequence after block removal),
//              all in the coordinates of the hypothesis state the shift
//              was applied to.
struct EditOp {
  OpKind kind = OpKind::Match;
  int hyp = -1;
  int ref = -1;
  int len = 0;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

using EditScript = std::vector<EditOp>;

struct LevResult {
  int cost = 0;
  EditScript script;  // monotone: no Shift ops, full coverage of both sides
};

// Minimal unit-cost sub/ins/del alignment of hyp onto ref. Deterministic
// backtrace from the bottom-right cell, preferring Match, Sub, Del, Ins.
LevResult levenshtein_align(const TokenSeq& hyp, const TokenSeq& ref);

// Edit distance only; same DP as levenshtein_align without the backtrace.
int levenshtein_cost(const TokenSeq& hyp, const TokenSeq& ref);

struct ShiftParams {
  bool enable = true;
  int max_shift_size = 10;
  int max_shift_dist = 50;
};

struct ShiftCandidate {
  int block_start = 0;
  int block_len = 0;
  int dest = 0;      // insertion index after block removal
  int new_cost = 0;  // shift-free cost after applying the move
};

// Best single block move per the tercom rules: the block must equal some
// contiguous reference span, contain at least one token not Match-aligned
// at its current position, move at most max_shift_dist, and strictly
// reduce the shift-free cost. Ties resolved by lower cost, leftmost block,
// shortest block, smallest displacement, then smaller destination.
std::optional<ShiftCandidate> find_best_shift(const TokenSeq& hyp_state,
                                              const TokenSeq& ref,
                                              const ShiftParams& params = {});

struct TerResult {
  int num_sub = 0;
  int num_ins = 0;
  int num_del = 0;
  int num_shift = 0;
  int ref_len = 0;
  int hyp_len = 0;
  // Applied shifts in order, then the monotone script of the fully shifted
  // hypothesis against the reference. Monotone ops index post-shift
  // hypothesis positions; hyp_order maps those back to the original ones.
  EditScript script;
  std::vector<int> hyp_order;

  int total_edits() const { return num_sub + num_ins + num_del + num_shift; }
};

// Greedy tercom loop: apply improving shifts until exhausted (one edit
// each), then score the shifted hypothesis with levenshtein_align.
TerResult ter_score(const TokenSeq& hyp, const TokenSeq& ref,
                    const ShiftParams& params = {});

// total_edits / max(1, ref_len); clipped to 1.0 on request.
double hter(const TerResult& result, bool clip = false);

// The monotone part of a TerResult script (everything after the shifts).
EditScript monotone_script(const TerResult& result);

}  // namespace pseudoqe

#endif  // PSEUDOQE_TER_HPP
