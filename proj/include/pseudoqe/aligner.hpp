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

#ifndef PSEUDOQE_ALIGNER_HPP
#define PSEUDOQE_ALIGNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pseudoqe/textnorm.hpp"

namespace pseudoqe {

struct AlignerConfig {
  int iterations = 5;
  double p0 = 0.08;          // null-alignment mass
  double lambda_init = 4.0;  // diagonal tension
  int lambda_steps = 8;      // gradient-ascent steps per M-step (0 = fixed)
  double lambda_rate = 1.0;  // base step size, decayed by 1/iteration
  double alpha = 0.01;       // add-alpha smoothing; also the unseen floor
  int workers = 0;           // E-step worker threads; 0 = auto
};

class Vocab {
 public:
  std::uint32_t intern(std::string_view token);
  std::optional<std::uint32_t> lookup(std::string_view token) const;
  const std::string& word(std::uint32_t id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> words_;
};

struct Link {
  int src = 0;
  int tgt = 0;
  friend bool operator==(const Link&, const Link&) = default;
  friend auto operator<=>(const Link&, const Link&) = default;
};

struct Alignment {
  std::vector<Link> links;  // sorted, unique
  int src_len = 0;
  int tgt_len = 0;
};

struct TrainStats {
  // Corpus log-likelihood measured in each E-step, i.e. entry k is the
  // likelihood under the parameters produced by iteration k's predecessor.
  std::vector<double> iteration_loglik;
  // max |row sum - 1| over ttable rows after each M-step
  std::vector<double> row_sum_err;
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;
  double final_tension = 0.0;
};

// Lexical translation table with a diagonal distortion prior:
//   p(f_j | e, n, m) = p0 * t(f_j|NULL)
//                    + sum_i (1-p0) * exp(lambda * -|i/n - j/m|)/Z_j * t(f_j|e_i)
class AlignmentModel {
 public:
  static constexpr std::uint32_t kNull = 0;

  double prob(std::uint32_t src_id, std::uint32_t tgt_id) const;
  double floor() const { return floor_; }
  double tension() const { return tension_; }
  double null_prob() const { return null_prob_; }
  const Vocab& src_vocab() const { return src_vocab_; }
  const Vocab& tgt_vocab() const { return tgt_vocab_; }

  // Entries of one translation row as (target token, probability); empty
  // for unknown source tokens. "<null>" addresses the null row.
  std::vector<std::pair<std::string, double>> ttable_row(
      std::string_view src_token) const;

 private:
  friend AlignmentModel em_train(
      const std::vector<std::pair<TokenSeq, TokenSeq>>&, const AlignerConfig&,
      TrainStats*);

  Vocab src_vocab_;  // id 0 = <null>
  Vocab tgt_vocab_;
  std::vector<std::unordered_map<std::uint32_t, double>> ttable_;  // by src id
  double tension_ = 4.0;
  double null_prob_ = 0.08;
  double floor_ = 0.01;
};

// EM training of the diagonal-tension model. Pairs with an empty side are
// skipped and counted in stats. Throws NoTrainableDataError when nothing
// remains.
AlignmentModel em_train(const std::vector<std::pair<TokenSeq, TokenSeq>>& bitext,
                        const AlignerConfig& config = {},
                        TrainStats* stats = nullptr);

// Per-target-token argmax decode. Null decisions produce no link; ties go
// to null first, then to the smaller source index.
Alignment viterbi_align(const AlignmentModel& model, const TokenSeq& src,
                        const TokenSeq& tgt);

double corpus_log_likelihood(
    const AlignmentModel& model,
    const std::vector<std::pair<TokenSeq, TokenSeq>>& bitext);

enum class SymHeuristic { Intersection, Union, GrowDiagFinalAnd };

SymHeuristic sym_heuristic_from_string(const std::string& name);
const std::string& sym_heuristic_name(SymHeuristic h);

// Swap link sides (and lengths) so a reverse-direction alignment can be
// combined with a forward one.
Alignment transpose(const Alignment& a);

// Combine two alignments over the same sentence-pair geometry.
// Throws AlignmentError when the lengths disagree.
Alignment symmetrize(const Alignment& forward, const Alignment& reverse,
                     SymHeuristic heuristic);

// "i-j i-j ..." per sentence
std::string to_pharaoh(const Alignment& a);

}  // namespace pseudoqe

#endif  // PSEUDOQE_ALIGNER_HPP
