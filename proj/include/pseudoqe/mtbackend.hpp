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

#ifndef PSEUDOQE_MTBACKEND_HPP
#define PSEUDOQE_MTBACKEND_HPP

#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pseudoqe/textnorm.hpp"

namespace pseudoqe {

enum class EngineKind { Http, MockIdentity, MockNoise };

EngineKind engine_from_string(const std::string& name);
const std::string& engine_name(EngineKind kind);

struct TranslatorConfig {
  EngineKind engine = EngineKind::MockIdentity;
  std::string endpoint;                          // http engine only
  std::string api_key_env = "PSEUDOQE_API_KEY";  // bearer token source
  int batch_size = 32;
  int max_retries = 3;
  double timeout_s = 30.0;
  double noise_rate = 0.0;   // mock-noise
  std::uint64_t noise_seed = 0;
  std::string noise_ops = "sdi";  // allowed edits: s(ub) d(el) i(ns)
  int max_inflight = 4;      // concurrent uncached batches (http)
};

// Persistent translation cache: append-only JSONL, one entry per line.
// A corrupt trailing record (torn write) is truncated and survives; corrupt
// interior records raise CacheCorruptError with the bad byte offset.
class TranslationCache {
 public:
  TranslationCache();                        // in-memory only
  explicit TranslationCache(std::string path);
  ~TranslationCache();

  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, const std::string& value);

  std::size_t size() const;
  std::uint64_t hits() const { return hits_.load(); }
  const std::string& path() const { return path_; }

 private:
  void load();

  std::string path_;  // empty = in-memory
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
  std::atomic<std::uint64_t> hits_{0};
  std::ofstream out_;
};

// SHA-256 hex digest of (engine id, languages, normalized text).
std::string cache_key(std::string_view engine_id, std::string_view src_lang,
                      std::string_view tgt_lang, std::string_view normalized_text);

// One deterministic corruption applied by the mock-noise engine.
struct NoiseEdit {
  enum class Kind { Sub, Del, Ins } kind;
  int pos = 0;           // original token position the edit was drawn at
  std::string before;    // token at that position ("" for Ins)
  std::string after;     // replacement / inserted token ("" for Del)
};

// Seeded left-to-right corruption pass: at each position, with probability
// `rate`, apply one of the ops allowed by `ops` (chosen uniformly among
// them). Substitutions append "x" to the token, insertions place the
// token's "xx" variant before it. Fully deterministic in (seed,
// sentence_id); the log is the exact record of what happened.
std::pair<TokenSeq, std::vector<NoiseEdit>> mock_noise_apply(
    const TokenSeq& tokens, double rate, std::uint64_t seed,
    std::uint64_t sentence_id, std::string_view ops = "sdi");

// Batch-composition-independent sentence id the mock-noise engine derives
// from its inputs (FNV-1a of direction and text).
std::uint64_t mock_sentence_id(std::string_view src_lang,
                               std::string_view tgt_lang,
                               std::string_view text);

class Translator {
 public:
  explicit Translator(std::shared_ptr<TranslationCache> cache);
  virtual ~Translator() = default;

  // Order-preserving, one output per input. Items are served from the
  // cache where possible; only the misses reach the backend, and the
  // whole batch fails if the backend call does.
  std::vector<std::string> translate_batch(const std::vector<std::string>& texts,
                                           const std::string& src_lang,
                                           const std::string& tgt_lang);

  virtual std::string engine_id() const = 0;
  virtual int batch_size() const = 0;

  std::uint64_t backend_calls() const { return backend_calls_.load(); }
  std::uint64_t cache_hits() const { return cache_hits_.load(); }
  TranslationCache& cache() { return *cache_; }

 protected:
  virtual std::vector<std::string> translate_uncached(
      const std::vector<std::string>& texts, const std::string& src_lang,
      const std::string& tgt_lang) = 0;

 private:
  std::shared_ptr<TranslationCache> cache_;
  std::atomic<std::uint64_t> backend_calls_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
};

class HttpTranslator;  // defined in translator.cpp

struct HttpAttempt {
  int status = 0;      // HTTP status, or -1 for transport failure
  double sleep_s = 0;  // jittered backoff slept after this attempt
  double cap_s = 0;    // backoff cap the sleep was drawn from
};

std::unique_ptr<Translator> make_translator(
    const TranslatorConfig& config,
    std::shared_ptr<TranslationCache> cache = nullptr);

// Introspection for tests/diagnostics: attempt log of the most recent
// http request cycle (empty for mock engines).
const std::vector<HttpAttempt>& http_attempt_log(const Translator& t);

}  // namespace pseudoqe

#endif  // PSEUDOQE_MTBACKEND_HPP
