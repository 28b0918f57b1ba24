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

#include "pseudoqe/ter.hpp"

#include <algorithm>
#include <cassert>

namespace pseudoqe {

namespace {

// Moves the block [s, s+len) so that it starts at index dest of the
// sequence with the block removed.
template <typename T>
std::vector<T> apply_block_move(const std::vector<T>& seq, int s, int len,
                                int dest) {
  std::vector<T> out;
  out.reserve(seq.size());
  for (int i = 0; i < static_cast<int>(seq.size()); ++i)
    if (i < s || i >= s + len) out.push_back(seq[i]);
  out.insert(out.begin() + dest, seq.begin() + s, seq.begin() + s + len);
  return out;
}

}  // namespace

int levenshtein_cost(const TokenSeq& hyp, const TokenSeq& ref) {
  const int h = static_cast<int>(hyp.size());
  const int w = static_cast<int>(ref.size());
  std::vector<int> prev(w + 1), cur(w + 1);
  for (int j = 0; j <= w; ++j) prev[j] = j;
  for (int i = 1; i <= h; ++i) {
    cur[0] = i;
    for (int j = 1; j <= w; ++j) {
      const int diag = prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, cur[j - 1] + 1, prev[j] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[w];
}

LevResult levenshtein_align(const TokenSeq& hyp, const TokenSeq& ref) {
  const int h = static_cast<int>(hyp.size());
  const int w = static_cast<int>(ref.size());
  std::vector<int> d(static_cast<size_t>(h + 1) * (w + 1));
  auto at = [&](int i, int j) -> int& { return d[static_cast<size_t>(i) * (w + 1) + j]; };

  for (int j = 0; j <= w; ++j) at(0, j) = j;
  for (int i = 1; i <= h; ++i) {
    at(i, 0) = i;
    for (int j = 1; j <= w; ++j) {
      const int diag = at(i - 1, j - 1) + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }

  LevResult res;
  res.cost = at(h, w);
  res.script.reserve(static_cast<size_t>(std::max(h, w)));
  // Backtrace preference: Match, Sub, Del, Ins.
  int i = h, j = w;
  while (i > 0 || j > 0) {
    const int cost = at(i, j);
    if (i > 0 && j > 0 && hyp[i - 1] == ref[j - 1] &&
        at(i - 1, j - 1) == cost) {
      res.script.push_back({OpKind::Match, i - 1, j - 1, 0});
      --i, --j;
    } else if (i > 0 && j > 0 && hyp[i - 1] != ref[j - 1] &&
               at(i - 1, j - 1) + 1 == cost) {
      res.script.push_back({OpKind::Sub, i - 1, j - 1, 0});
      --i, --j;
    } else if (j > 0 && at(i, j - 1) + 1 == cost) {
      res.script.push_back({OpKind::Del, -1, j - 1, 0});
      --j;
    } else {
      assert(i > 0 && at(i - 1, j) + 1 == cost);
      res.script.push_back({OpKind::Ins, i - 1, -1, 0});
      --i;
    }
  }
  std::reverse(res.script.begin(), res.script.end());
  return res;
}

std::optional<ShiftCandidate> find_best_shift(const TokenSeq& hyp_state,
                                              const TokenSeq& ref,
                                              const ShiftParams& params) {
  if (!params.enable) return std::nullopt;
  const int h = static_cast<int>(hyp_state.size());
  const int w = static_cast<int>(ref.size());
  if (h < 1 || w < 1) return std::nullopt;

  const LevResult base = levenshtein_align(hyp_state, ref);
  if (base.cost == 0) return std::nullopt;

  std::vector<char> matched(h, 0);
  for (const EditOp& op : base.script)
    if (op.kind == OpKind::Match) matched[op.hyp] = 1;

  std::optional<ShiftCandidate> best;
  auto better = [&](const ShiftCandidate& c) {
    if (!best) return true;
    const int cd = std::abs(c.dest - c.block_start);
    const int bd = std::abs(best->dest - best->block_start);
    if (c.new_cost != best->new_cost) return c.new_cost < best->new_cost;
    if (c.block_start != best->block_start) return c.block_start < best->block_start;
    if (c.block_len != best->block_len) return c.block_len < best->block_len;
    if (cd != bd) return cd < bd;
    return c.dest < best->dest;
  };

  for (int s = 0; s < h; ++s) {
    // Candidate reference starts matching the growing block hyp[s, s+len).
    std::vector<int> starts;
    for (int p = 0; p < w; ++p)
      if (ref[p] == hyp_state[s]) starts.push_back(p);
    bool any_mismatch = false;
    const int max_len = std::min(params.max_shift_size, h - s);
    for (int len = 1; len <= max_len && !starts.empty(); ++len) {
      if (len > 1) {
        std::vector<int> kept;
        for (int p : starts)
          if (p + len <= w && ref[p + len - 1] == hyp_state[s + len - 1])
            kept.push_back(p);
        starts.swap(kept);
        if (starts.empty()) break;
      }
      any_mismatch = any_mismatch || !matched[s + len - 1];
      if (!any_mismatch) continue;

      const int lo = std::max(0, s - params.max_shift_dist);
      const int hi = std::min(h - len, s + params.max_shift_dist);
      for (int dest = lo; dest <= hi; ++dest) {
        if (dest == s) continue;  // identity move
        const TokenSeq moved = apply_block_move(hyp_state, s, len, dest);
        const int cost = levenshtein_cost(moved, ref);
        ShiftCandidate cand{s, len, dest, cost};
        if (better(cand)) best = cand;
      }
    }
  }

  if (best && best->new_cost < base.cost) return best;
  return std::nullopt;
}

TerResult ter_score(const TokenSeq& hyp, const TokenSeq& ref,
                    const ShiftParams& params) {
  TerResult res;
  res.ref_len = static_cast<int>(ref.size());
  res.hyp_len = static_cast<int>(hyp.size());
  res.hyp_order.resize(hyp.size());
  for (size_t i = 0; i < hyp.size(); ++i) res.hyp_order[i] = static_cast<int>(i);

  TokenSeq state = hyp;
  while (true) {
    const auto shift = find_best_shift(state, ref, params);
    if (!shift) break;
    state = apply_block_move(state, shift->block_start, shift->block_len,
                             shift->dest);
    res.hyp_order = apply_block_move(res.hyp_order, shift->block_start,
                                     shift->block_len, shift->dest);
    res.script.push_back(
        {OpKind::Shift, shift->block_start, shift->dest, shift->block_len});
    ++res.num_shift;
  }

  LevResult lev = levenshtein_align(state, ref);
  for (const EditOp& op : lev.script) {
    switch (op.kind) {
      case OpKind::Sub: ++res.num_sub; break;
      case OpKind::Ins: ++res.num_ins; break;
      case OpKind::Del: ++res.num_del; break;
      default: break;
    }
    res.script.push_back(op);
  }
  return res;
}

double hter(const TerResult& result, bool clip) {
  const double score = static_cast<double>(result.total_edits()) /
                       static_cast<double>(std::max(1, result.ref_len));
  return clip ? std::min(score, 1.0) : score;
}

EditScript monotone_script(const TerResult& result) {
  EditScript out;
  out.reserve(result.script.size());
  for (const EditOp& op : result.script)
    if (op.kind != OpKind::Shift) out.push_back(op);
  return out;
}

}  // namespace pseudoqe
