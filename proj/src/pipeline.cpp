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

#include "pseudoqe/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "pseudoqe/error.hpp"

namespace pseudoqe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_cancel{false};

struct Item {
  std::size_t line_no = 0;  // 1-based
  TokenSeq src;             // given (parallel) or back-translated (mono)
  TokenSeq pe;
  TokenSeq mt;
  std::vector<std::string> cache_keys;  // translations completed for this item
  bool translated = false;
};

void log_skip(const RunHooks& hooks, std::size_t line_no, const char* why) {
  if (hooks.log) {
    std::ostringstream msg;
    msg << "skipping line " << line_no << ": " << why;
    hooks.log(msg.str());
  }
}

// True when the line survives filtering; throws in strict mode.
bool keep_line(const TokenSeq& tokens, std::size_t line_no,
               const PipelineConfig& cfg, const RunHooks& hooks,
               RunStats& stats) {
  const char* why = nullptr;
  if (tokens.empty())
    why = "empty after normalization";
  else if (static_cast<int>(tokens.size()) > cfg.max_tokens)
    why = "longer than max_tokens";
  if (!why) return true;
  if (cfg.strict) {
    std::ostringstream msg;
    msg << "line " << line_no << ": " << why;
    throw InvalidCorpusError(msg.str());
  }
  ++stats.skipped;
  log_skip(hooks, line_no, why);
  return false;
}

void write_checkpoint(const RunHooks& hooks, const std::vector<Item>& items) {
  if (hooks.checkpoint_path.empty()) return;
  std::ofstream out(hooks.checkpoint_path, std::ios::trunc | std::ios::binary);
  if (!out) return;  // checkpointing must never mask the original failure
  for (const Item& item : items) {
    if (item.cache_keys.empty()) continue;
    json rec;
    rec["line"] = item.line_no;
    rec["cache_keys"] = item.cache_keys;
    rec["completed"] = item.translated;
    out << rec.dump() << '\n';
  }
}

void check_cancelled(const RunHooks& hooks) {
  const bool cancelled =
      cancel_requested() || (hooks.cancelled && hooks.cancelled());
  if (cancelled) throw BackendError("run interrupted", false);
}

// Batched translation of one field across all items; records cache keys as
// batches complete so an abort can be checkpointed.
void translate_stage(std::vector<Item>& items, Translator& translator,
                     const std::string& src_lang, const std::string& tgt_lang,
                     const RunHooks& hooks,
                     const std::function<std::string(const Item&)>& input_of,
                     const std::function<void(Item&, std::string&&)>& store,
                     bool final_stage) {
  const std::size_t batch = static_cast<std::size_t>(translator.batch_size());
  for (std::size_t begin = 0; begin < items.size(); begin += batch) {
    check_cancelled(hooks);
    const std::size_t end = std::min(items.size(), begin + batch);
    std::vector<std::string> texts;
    texts.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) texts.push_back(input_of(items[i]));
    std::vector<std::string> outputs =
        translator.translate_batch(texts, src_lang, tgt_lang);
    for (std::size_t i = begin; i < end; ++i) {
      items[i].cache_keys.push_back(cache_key(translator.engine_id(), src_lang,
                                              tgt_lang, texts[i - begin]));
      if (final_stage) items[i].translated = true;
      store(items[i], std::move(outputs[i - begin]));
    }
  }
}

BuildResult assemble(std::vector<Item>& items, Translator& translator,
                     const PipelineConfig& cfg, const RunHooks& hooks,
                     RunStats stats) {
  BuildResult result;
  result.stats = stats;

  // Alignment phase: self-train on the generated (source, reference) pairs,
  // both directions, then symmetrize per record.
  std::vector<Alignment> links(items.size());
  if (cfg.level != Level::Sentence && !items.empty()) {
    std::vector<std::pair<TokenSeq, TokenSeq>> bitext;
    bitext.reserve(items.size());
    for (const Item& item : items) bitext.emplace_back(item.src, item.pe);
    std::vector<std::pair<TokenSeq, TokenSeq>> reversed;
    reversed.reserve(items.size());
    for (const Item& item : items) reversed.emplace_back(item.pe, item.src);
    bool trained = false;
    AlignmentModel fwd, rev;
    try {
      fwd = em_train(bitext, cfg.aligner);
      rev = em_train(reversed, cfg.aligner);
      trained = true;
    } catch (const NoTrainableDataError&) {
      // every pseudo-source came out empty; tags fall back to unlinked
      if (hooks.log) hooks.log("alignment skipped: no trainable pairs");
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (trained) {
        const Alignment a_f = viterbi_align(fwd, items[i].src, items[i].pe);
        const Alignment a_r = viterbi_align(rev, items[i].pe, items[i].src);
        links[i] = symmetrize(a_f, transpose(a_r), cfg.sym);
      } else {
        links[i].src_len = static_cast<int>(items[i].src.size());
        links[i].tgt_len = static_cast<int>(items[i].pe.size());
      }
    }
  }

  double hter_sum = 0.0;
  result.records.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    Item& item = items[i];
    QeRecord rec;
    rec.src = std::move(item.src);
    rec.mt = std::move(item.mt);
    rec.pe = std::move(item.pe);
    rec.meta.mode = cfg.mode;
    rec.meta.src_lang = cfg.src_lang;
    rec.meta.tgt_lang = cfg.tgt_lang;
    rec.meta.engine = translator.engine_id();
    rec.meta.line_no = item.line_no;

    const TerResult ter = ter_score(rec.mt, rec.pe, cfg.shift);
    rec.hter = hter(ter, cfg.clip_hter);
    hter_sum += rec.hter;

    if (cfg.level != Level::Sentence) {
      const LevResult lev = levenshtein_align(rec.mt, rec.pe);
      MtTags mt = mt_tags(lev.script, static_cast<int>(rec.mt.size()));
      rec.mt_word_tags = std::move(mt.word);
      rec.gap_tags = std::move(mt.gap);
      rec.src_tags = source_tags(links[i], lev.script,
                                 static_cast<int>(rec.src.size()));
      for (Tag t : rec.mt_word_tags)
        (t == Tag::OK ? result.stats.mt_word_tags.ok
                      : result.stats.mt_word_tags.bad)++;
      for (Tag t : rec.gap_tags)
        (t == Tag::OK ? result.stats.gap_tags.ok : result.stats.gap_tags.bad)++;
      for (Tag t : rec.src_tags)
        (t == Tag::OK ? result.stats.source_tags.ok
                      : result.stats.source_tags.bad)++;
    }
    result.records.push_back(std::move(rec));
  }

  result.stats.records_emitted = result.records.size();
  result.stats.mean_hter =
      result.records.empty() ? 0.0
                             : hter_sum / static_cast<double>(result.records.size());
  return result;
}

}  // namespace

CorpusMode mode_from_string(const std::string& name) {
  if (name == "mono") return CorpusMode::Mono;
  if (name == "parallel") return CorpusMode::Parallel;
  throw ConfigError("unknown mode '" + name + "'");
}

const std::string& mode_name(CorpusMode mode) {
  static const std::string names[] = {"mono", "parallel"};
  return names[static_cast<int>(mode)];
}

Level level_from_string(const std::string& name) {
  if (name == "word") return Level::Word;
  if (name == "sentence") return Level::Sentence;
  if (name == "both") return Level::Both;
  throw ConfigError("unknown level '" + name + "'");
}

const std::string& level_name(Level level) {
  static const std::string names[] = {"word", "sentence", "both"};
  return names[static_cast<int>(level)];
}

BuildResult build_mono(const std::vector<std::string>& corpus,
                       Translator& translator, const PipelineConfig& config,
                       const RunHooks& hooks) {
  if (config.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  const std::uint64_t calls_before = translator.backend_calls();
  const std::uint64_t hits_before = translator.cache_hits();

  RunStats stats;
  stats.input_lines = corpus.size();

  std::vector<Item> items;
  items.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    TokenSeq pe = tokenize(corpus[i], config.norm);
    if (!keep_line(pe, i + 1, config, hooks, stats)) continue;
    Item item;
    item.line_no = i + 1;
    item.pe = std::move(pe);
    items.push_back(std::move(item));
  }
  if (items.empty())
    throw NoTrainableDataError("every input line was filtered out");

  try {
    // backward pass: pseudo-reference -> pseudo-source
    translate_stage(
        items, translator, config.tgt_lang, config.src_lang, hooks,
        [](const Item& item) { return join(item.pe); },
        [&](Item& item, std::string&& text) {
          item.src = tokenize(text, config.norm);
        },
        /*final_stage=*/false);
    // forward pass: pseudo-source -> MT output
    translate_stage(
        items, translator, config.src_lang, config.tgt_lang, hooks,
        [](const Item& item) { return join(item.src); },
        [&](Item& item, std::string&& text) {
          item.mt = tokenize(text, config.norm);
        },
        /*final_stage=*/true);
  } catch (const BackendError&) {
    write_checkpoint(hooks, items);
    throw;
  }

  BuildResult result = assemble(items, translator, config, hooks, stats);
  result.stats.backend_calls =
      static_cast<std::size_t>(translator.backend_calls() - calls_before);
  result.stats.cache_hits =
      static_cast<std::size_t>(translator.cache_hits() - hits_before);
  return result;
}

BuildResult build_parallel(
    const std::vector<std::pair<std::string, std::string>>& corpus,
    Translator& translator, const PipelineConfig& config,
    const RunHooks& hooks) {
  if (config.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  const std::uint64_t calls_before = translator.backend_calls();
  const std::uint64_t hits_before = translator.cache_hits();

  RunStats stats;
  stats.input_lines = corpus.size();

  std::vector<Item> items;
  items.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    TokenSeq src = tokenize(corpus[i].first, config.norm);
    TokenSeq pe = tokenize(corpus[i].second, config.norm);
    // a pair is degenerate when either side is
    if (!keep_line(src, i + 1, config, hooks, stats)) continue;
    if (!keep_line(pe, i + 1, config, hooks, stats)) continue;
    Item item;
    item.line_no = i + 1;
    item.src = std::move(src);
    item.pe = std::move(pe);
    items.push_back(std::move(item));
  }
  if (items.empty())
    throw NoTrainableDataError("every input pair was filtered out");

  try {
    translate_stage(
        items, translator, config.src_lang, config.tgt_lang, hooks,
        [](const Item& item) { return join(item.src); },
        [&](Item& item, std::string&& text) {
          item.mt = tokenize(text, config.norm);
        },
        /*final_stage=*/true);
  } catch (const BackendError&) {
    write_checkpoint(hooks, items);
    throw;
  }

  BuildResult result = assemble(items, translator, config, hooks, stats);
  result.stats.backend_calls =
      static_cast<std::size_t>(translator.backend_calls() - calls_before);
  result.stats.cache_hits =
      static_cast<std::size_t>(translator.cache_hits() - hits_before);
  return result;
}

OutputLock::OutputLock(const std::string& out_dir) {
  path_ = (fs::path(out_dir) / ".pseudoqe.lock").string();
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw IoError("output directory is locked by another run: " + path_);
    throw IoError("cannot create lockfile: " + path_);
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] ssize_t n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

void request_cancel() { g_cancel.store(true); }
bool cancel_requested() { return g_cancel.load(); }
void reset_cancel() { g_cancel.store(false); }

}  // namespace pseudoqe
