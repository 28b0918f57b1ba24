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

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>

#include "pseudoqe/error.hpp"
#include "pseudoqe/mtbackend.hpp"

namespace pseudoqe {

using nlohmann::json;

namespace {

// Self-contained splitmix64 so mock output is identical on every platform
// and standard library.
struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next() % n);
  }
};

std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

EngineKind engine_from_string(const std::string& name) {
  if (name == "http") return EngineKind::Http;
  if (name == "mock-identity") return EngineKind::MockIdentity;
  if (name == "mock-noise") return EngineKind::MockNoise;
  throw ConfigError("unknown engine '" + name + "'");
}

const std::string& engine_name(EngineKind kind) {
  static const std::string names[] = {"http", "mock-identity", "mock-noise"};
  return names[static_cast<int>(kind)];
}

std::uint64_t mock_sentence_id(std::string_view src_lang,
                               std::string_view tgt_lang,
                               std::string_view text) {
  std::uint64_t h = fnv1a64(src_lang);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(tgt_lang, h);
  h = fnv1a64("\x1f", h);
  return fnv1a64(text, h);
}

std::pair<TokenSeq, std::vector<NoiseEdit>> mock_noise_apply(
    const TokenSeq& tokens, double rate, std::uint64_t seed,
    std::uint64_t sentence_id, std::string_view ops) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw ConfigError("noise rate must be in [0,1]");
  std::string allowed;
  for (char c : ops) {
    if (c != 's' && c != 'd' && c != 'i')
      throw ConfigError("noise ops must be drawn from \"sdi\"");
    if (allowed.find(c) == std::string::npos) allowed.push_back(c);
  }

  SplitMix64 mix{seed};
  const std::uint64_t a = mix.next();
  mix.state = sentence_id;
  const std::uint64_t b = mix.next();
  SplitMix64 rng{a ^ (b * 0x9e3779b97f4a7c15ULL)};

  TokenSeq out;
  out.reserve(tokens.size());
  std::vector<NoiseEdit> log;
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const std::string& tok = tokens[pos];
    const double u = rng.uniform();
    if (u >= rate || allowed.empty()) {
      out.push_back(tok);
      continue;
    }
    const char kind = allowed[rng.below(static_cast<std::uint32_t>(allowed.size()))];
    switch (kind) {
      case 's':
        out.push_back(tok + "x");
        log.push_back({NoiseEdit::Kind::Sub, static_cast<int>(pos), tok, tok + "x"});
        break;
      case 'd':
        log.push_back({NoiseEdit::Kind::Del, static_cast<int>(pos), tok, ""});
        break;
      case 'i':
        out.push_back(tok + "xx");
        out.push_back(tok);
        log.push_back({NoiseEdit::Kind::Ins, static_cast<int>(pos), "", tok + "xx"});
        break;
    }
  }
  return {std::move(out), std::move(log)};
}

Translator::Translator(std::shared_ptr<TranslationCache> cache)
    : cache_(cache ? std::move(cache) : std::make_shared<TranslationCache>()) {}

std::vector<std::string> Translator::translate_batch(
    const std::vector<std::string>& texts, const std::string& src_lang,
    const std::string& tgt_lang) {
  if (src_lang == tgt_lang)
    throw ConfigError("source and target language must differ");

  std::vector<std::string> results(texts.size());
  std::vector<std::size_t> miss_idx;
  std::vector<std::string> miss_texts;
  std::vector<std::string> keys(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    keys[i] = cache_key(engine_id(), src_lang, tgt_lang, texts[i]);
    if (auto hit = cache_->get(keys[i])) {
      results[i] = *hit;
      cache_hits_.fetch_add(1);
    } else {
      miss_idx.push_back(i);
      miss_texts.push_back(texts[i]);
    }
  }
  if (miss_idx.empty()) return results;

  backend_calls_.fetch_add(1);
  std::vector<std::string> translated =
      translate_uncached(miss_texts, src_lang, tgt_lang);
  if (translated.size() != miss_texts.size())
    throw BackendError("backend returned " + std::to_string(translated.size()) +
                           " translations for " +
                           std::to_string(miss_texts.size()) + " inputs",
                       false);
  for (std::size_t k = 0; k < miss_idx.size(); ++k) {
    results[miss_idx[k]] = translated[k];
    cache_->put(keys[miss_idx[k]], translated[k]);
  }
  return results;
}

namespace {

class IdentityTranslator final : public Translator {
 public:
  IdentityTranslator(TranslatorConfig cfg, std::shared_ptr<TranslationCache> cache)
      : Translator(std::move(cache)), cfg_(std::move(cfg)) {}

  std::string engine_id() const override { return "mock-identity"; }
  int batch_size() const override { return cfg_.batch_size; }

 protected:
  std::vector<std::string> translate_uncached(
      const std::vector<std::string>& texts, const std::string&,
      const std::string&) override {
    return texts;
  }

 private:
  TranslatorConfig cfg_;
};

class NoiseTranslator final : public Translator {
 public:
  NoiseTranslator(TranslatorConfig cfg, std::shared_ptr<TranslationCache> cache)
      : Translator(std::move(cache)), cfg_(std::move(cfg)) {
    std::ostringstream id;
    id << "mock-noise:seed=" << cfg_.noise_seed << ":rate=" << cfg_.noise_rate
       << ":ops=" << cfg_.noise_ops;
    id_ = id.str();
  }

  std::string engine_id() const override { return id_; }
  int batch_size() const override { return cfg_.batch_size; }

 protected:
  std::vector<std::string> translate_uncached(
      const std::vector<std::string>& texts, const std::string& src_lang,
      const std::string& tgt_lang) override {
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
      const std::uint64_t sid = mock_sentence_id(src_lang, tgt_lang, text);
      auto [tokens, log] = mock_noise_apply(split_ws(text), cfg_.noise_rate,
                                            cfg_.noise_seed, sid, cfg_.noise_ops);
      out.push_back(join(tokens));
    }
    return out;
  }

 private:
  TranslatorConfig cfg_;
  std::string id_;
};

}  // namespace

class HttpTranslator final : public Translator {
 public:
  HttpTranslator(TranslatorConfig cfg, std::shared_ptr<TranslationCache> cache,
                 double backoff_base_s)
      : Translator(std::move(cache)),
        cfg_(std::move(cfg)),
        backoff_base_s_(backoff_base_s),
        inflight_(cfg_.max_inflight),
        jitter_rng_(std::random_device{}()) {
    const auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos)
      throw ConfigError("endpoint must be an http(s):// URL");
    const std::string scheme = cfg_.endpoint.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
      throw ConfigError("unsupported endpoint scheme '" + scheme + "'");
    const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base_url_ = cfg_.endpoint;
      path_ = "/";
    } else {
      base_url_ = cfg_.endpoint.substr(0, path_start);
      path_ = cfg_.endpoint.substr(path_start);
    }
  }

  std::string engine_id() const override { return "http:" + cfg_.endpoint; }
  int batch_size() const override { return cfg_.batch_size; }

  const std::vector<HttpAttempt>& attempts() const { return attempts_; }

 protected:
  std::vector<std::string> translate_uncached(
      const std::vector<std::string>& texts, const std::string& src_lang,
      const std::string& tgt_lang) override {
    inflight_.acquire();
    struct Release {
      std::counting_semaphore<>& sem;
      ~Release() { sem.release(); }
    } release{inflight_};

    json body;
    body["q"] = texts;
    body["source"] = src_lang;
    body["target"] = tgt_lang;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str());
        key && *key != '\0')
      headers.emplace("Authorization", std::string("Bearer ") + key);

    {
      std::lock_guard<std::mutex> lock(attempts_mu_);
      attempts_.clear();
    }

    const int total_attempts = cfg_.max_retries + 1;
    for (int attempt = 0; attempt < total_attempts; ++attempt) {
      httplib::Client client(base_url_);
      client.set_connection_timeout(std::chrono::duration<double>(cfg_.timeout_s));
      client.set_read_timeout(std::chrono::duration<double>(cfg_.timeout_s));
      client.set_write_timeout(std::chrono::duration<double>(cfg_.timeout_s));

      httplib::Result res = client.Post(path_, headers, payload, "application/json");
      const int status = res ? res->status : -1;

      if (res && status >= 200 && status < 300) {
        record_attempt(status, 0.0, 0.0);
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("translations") ||
            !reply["translations"].is_array() ||
            reply["translations"].size() != texts.size())
          throw BackendError("malformed translation response", false);
        std::vector<std::string> out;
        out.reserve(texts.size());
        for (const auto& item : reply["translations"]) {
          if (!item.is_string())
            throw BackendError("malformed translation response", false);
          out.push_back(item.get<std::string>());
        }
        return out;
      }

      const bool retryable = !res || status == 429 || status >= 500;
      if (!retryable) {
        record_attempt(status, 0.0, 0.0);
        throw BackendError("request rejected: HTTP " + std::to_string(status),
                           false);
      }
      if (attempt + 1 == total_attempts) {
        record_attempt(status, 0.0, 0.0);
        break;
      }
      // exponential backoff with full jitter
      const double cap = backoff_base_s_ * std::pow(2.0, attempt);
      double sleep_s;
      {
        std::lock_guard<std::mutex> lock(attempts_mu_);
        sleep_s = std::uniform_real_distribution<double>(0.0, cap)(jitter_rng_);
        attempts_.push_back({status, sleep_s, cap});
      }
      std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
    }
    throw BackendError("backend unavailable after " +
                           std::to_string(total_attempts) + " attempts: " +
                           cfg_.endpoint,
                       true);
  }

 private:
  void record_attempt(int status, double sleep_s, double cap_s) {
    std::lock_guard<std::mutex> lock(attempts_mu_);
    attempts_.push_back({status, sleep_s, cap_s});
  }

  TranslatorConfig cfg_;
  double backoff_base_s_;
  std::string base_url_;
  std::string path_;
  std::counting_semaphore<> inflight_;
  std::mutex attempts_mu_;
  std::vector<HttpAttempt> attempts_;
  std::mt19937_64 jitter_rng_;
};

std::unique_ptr<Translator> make_translator(
    const TranslatorConfig& config, std::shared_ptr<TranslationCache> cache) {
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (!(config.noise_rate >= 0.0 && config.noise_rate <= 1.0))
    throw ConfigError("noise rate must be in [0,1]");
  if (config.max_inflight < 1) throw ConfigError("max_inflight must be >= 1");

  switch (config.engine) {
    case EngineKind::MockIdentity:
      return std::make_unique<IdentityTranslator>(config, std::move(cache));
    case EngineKind::MockNoise:
      return std::make_unique<NoiseTranslator>(config, std::move(cache));
    case EngineKind::Http:
      if (config.endpoint.empty())
        throw ConfigError("http engine requires --endpoint");
      return std::make_unique<HttpTranslator>(config, std::move(cache), 0.5);
  }
  throw ConfigError("unknown engine");
}

const std::vector<HttpAttempt>& http_attempt_log(const Translator& t) {
  static const std::vector<HttpAttempt> empty;
  if (const auto* http = dynamic_cast<const HttpTranslator*>(&t))
    return http->attempts();
  return empty;
}

}  // namespace pseudoqe
