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

#ifndef PSEUDOQE_PIPELINE_HPP
#define PSEUDOQE_PIPELINE_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pseudoqe/aligner.hpp"
#include "pseudoqe/mtbackend.hpp"
#include "pseudoqe/tags.hpp"
#include "pseudoqe/ter.hpp"
#include "pseudoqe/textnorm.hpp"

namespace pseudoqe {

enum class CorpusMode { Mono, Parallel };
enum class Level { Word, Sentence, Both };

CorpusMode mode_from_string(const std::string& name);
const std::string& mode_name(CorpusMode mode);
Level level_from_string(const std::string& name);
const std::string& level_name(Level level);

struct RecordMeta {
  CorpusMode mode = CorpusMode::Mono;
  std::string src_lang;
  std::string tgt_lang;
  std::string engine;
  std::size_t line_no = 0;  // 1-based input line
};

// One generated training example. pe is the pseudo-reference the input
// corpus supplied; src is the (pseudo-)source; mt carries the round-trip
// or forward-translation errors.
struct QeRecord {
  TokenSeq src;
  TokenSeq mt;
  TokenSeq pe;
  double hter = 0.0;
  TagSeq src_tags;
  TagSeq mt_word_tags;
  TagSeq gap_tags;
  RecordMeta meta;
};

struct PipelineConfig {
  CorpusMode mode = CorpusMode::Mono;
  Level level = Level::Both;
  std::string src_lang;
  std::string tgt_lang;
  NormPolicy norm;
  ShiftParams shift;
  AlignerConfig aligner;
  SymHeuristic sym = SymHeuristic::GrowDiagFinalAnd;
  bool clip_hter = false;
  int max_tokens = 200;
  bool strict = false;  // fail on degenerate lines instead of skipping
};

struct TagCounts {
  std::size_t ok = 0;
  std::size_t bad = 0;
};

struct RunStats {
  std::size_t input_lines = 0;
  std::size_t records_emitted = 0;
  std::size_t skipped = 0;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  double mean_hter = 0.0;
  TagCounts mt_word_tags;
  TagCounts gap_tags;
  TagCounts source_tags;
};

struct RunHooks {
  std::function<void(const std::string&)> log;  // skip notices, progress
  std::function<bool()> cancelled;              // polled between batches
  std::string checkpoint_path;                  // written on abort
};

struct BuildResult {
  std::vector<QeRecord> records;
  RunStats stats;
};

// Monolingual mode: back-translate each target sentence to a pseudo-source,
// translate forward again, score the round trip against the original, and
// tag words through a self-trained source<->reference alignment.
BuildResult build_mono(const std::vector<std::string>& corpus,
                       Translator& translator, const PipelineConfig& config,
                       const RunHooks& hooks = {});

// Parallel mode: one forward translation per pair; the given target acts
// as the pseudo-reference.
BuildResult build_parallel(
    const std::vector<std::pair<std::string, std::string>>& corpus,
    Translator& translator, const PipelineConfig& config,
    const RunHooks& hooks = {});

// Single-run-per-output-directory guard (.pseudoqe.lock).
class OutputLock {
 public:
  explicit OutputLock(const std::string& out_dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::string path_;
};

// Cooperative cancellation, safe to flip from a signal handler.
void request_cancel();
bool cancel_requested();
void reset_cancel();

}  // namespace pseudoqe

#endif  // PSEUDOQE_PIPELINE_HPP
