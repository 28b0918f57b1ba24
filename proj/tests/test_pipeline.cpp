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

#include <doctest.h>

#include "pseudoqe/error.hpp"
#include "pseudoqe/ioformats.hpp"
#include "pseudoqe/pipeline.hpp"
#include "testutil.hpp"

using namespace pseudoqe;

namespace {

PipelineConfig mono_config() {
  PipelineConfig cfg;
  cfg.mode = CorpusMode::Mono;
  cfg.src_lang = "en";
  cfg.tgt_lang = "de";
  return cfg;
}

std::vector<std::string> small_corpus(int n) {
  std::vector<std::string> lines;
  const char* words[] = {"the", "quick", "brown", "fox", "jumps", "over",
                         "lazy", "dog", "again", "today"};
  for (int i = 0; i < n; ++i) {
    std::string line;
    for (int k = 0; k < 4 + (i % 5); ++k) {
      if (k) line += ' ';
      line += words[(i + k * 3) % 10];
    }
    lines.push_back(line);
  }
  return lines;
}

// Always fails: exercises abort/checkpoint paths without sleeping.
class FailingTranslator : public Translator {
 public:
  FailingTranslator() : Translator(nullptr) {}
  std::string engine_id() const override { return "failing"; }
  int batch_size() const override { return 4; }

 protected:
  std::vector<std::string> translate_uncached(const std::vector<std::string>&,
                                              const std::string&,
                                              const std::string&) override {
    throw BackendError("synthetic outage", true);
  }
};

}  // namespace

TEST_CASE("identity round trip gives perfect records") {
  const auto corpus = small_corpus(20);
  auto tr = make_translator({});
  const BuildResult result = build_mono(corpus, *tr, mono_config());
  REQUIRE(result.records.size() == 20);
  for (const QeRecord& rec : result.records) {
    CHECK(rec.hter == 0.0);
    CHECK(rec.mt == rec.pe);
    CHECK(rec.src == rec.pe);  // identity back-translation
    for (Tag t : rec.mt_word_tags) CHECK(t == Tag::OK);
    for (Tag t : rec.gap_tags) CHECK(t == Tag::OK);
    for (Tag t : rec.src_tags) CHECK(t == Tag::OK);
    CHECK(rec.mt_word_tags.size() == rec.mt.size());
    CHECK(rec.gap_tags.size() == rec.mt.size() + 1);
    CHECK(rec.src_tags.size() == rec.src.size());
  }
  CHECK(result.stats.records_emitted == 20);
  CHECK(result.stats.skipped == 0);
  CHECK(result.stats.mean_hter == 0.0);
  CHECK(result.stats.mt_word_tags.bad == 0);
}

TEST_CASE("blank lines are skipped and counted") {
  std::vector<std::string> corpus{"one two three", "   ", "four five"};
  auto tr = make_translator({});
  std::vector<std::string> logged;
  RunHooks hooks;
  hooks.log = [&](const std::string& msg) { logged.push_back(msg); };
  const BuildResult result = build_mono(corpus, *tr, mono_config(), hooks);
  CHECK(result.records.size() == 2);
  CHECK(result.stats.skipped == 1);
  CHECK(result.stats.input_lines == 3);
  CHECK(result.stats.records_emitted + result.stats.skipped ==
        result.stats.input_lines);
  REQUIRE(logged.size() == 1);
  CHECK(logged[0].find("line 2") != std::string::npos);
  // records keep their input line numbers
  CHECK(result.records[0].meta.line_no == 1);
  CHECK(result.records[1].meta.line_no == 3);
}

TEST_CASE("max_tokens filters long lines; strict mode fails instead") {
  PipelineConfig cfg = mono_config();
  cfg.max_tokens = 3;
  auto tr = make_translator({});
  std::vector<std::string> corpus{"a b c", "a b c d e"};
  const BuildResult result = build_mono(corpus, *tr, cfg);
  CHECK(result.records.size() == 1);
  CHECK(result.stats.skipped == 1);

  cfg.strict = true;
  CHECK_THROWS_AS(build_mono(corpus, *tr, cfg), InvalidCorpusError);
}

TEST_CASE("an entirely degenerate corpus is an error") {
  auto tr = make_translator({});
  CHECK_THROWS_AS(build_mono({"", "  "}, *tr, mono_config()),
                  NoTrainableDataError);
}

TEST_CASE("sentence level skips tags but still scores") {
  PipelineConfig cfg = mono_config();
  cfg.level = Level::Sentence;
  auto tr = make_translator({});
  const BuildResult result = build_mono(small_corpus(5), *tr, cfg);
  for (const QeRecord& rec : result.records) {
    CHECK(rec.mt_word_tags.empty());
    CHECK(rec.gap_tags.empty());
    CHECK(rec.src_tags.empty());
    CHECK(rec.hter == 0.0);
  }
}

TEST_CASE("parallel mode with echoing translator") {
  PipelineConfig cfg = mono_config();
  cfg.mode = CorpusMode::Parallel;
  auto tr = make_translator({});
  // source column == target column, so the identity MT equals the reference
  std::vector<std::pair<std::string, std::string>> corpus;
  for (const std::string& line : small_corpus(10)) corpus.emplace_back(line, line);
  const BuildResult result = build_parallel(corpus, *tr, cfg);
  REQUIRE(result.records.size() == 10);
  for (const QeRecord& rec : result.records) {
    CHECK(rec.hter == 0.0);
    CHECK(rec.mt == rec.pe);
  }
  CHECK(result.stats.backend_calls > 0);
}

TEST_CASE("controlled substitutions produce exact scores and tags") {
  PipelineConfig cfg = mono_config();
  cfg.mode = CorpusMode::Parallel;
  TranslatorConfig tcfg;
  tcfg.engine = EngineKind::MockNoise;
  tcfg.noise_rate = 0.3;
  tcfg.noise_seed = 7;
  tcfg.noise_ops = "s";
  auto tr = make_translator(tcfg);

  std::vector<std::pair<std::string, std::string>> corpus;
  for (const std::string& line : small_corpus(20)) corpus.emplace_back(line, line);

  const BuildResult result = build_parallel(corpus, *tr, cfg);
  REQUIRE(result.records.size() == 20);
  std::size_t total_bad = 0;
  for (const QeRecord& rec : result.records) {
    // the mock's own edit log is the oracle
    const std::string text = join(rec.pe);
    const auto sid = mock_sentence_id(cfg.src_lang, cfg.tgt_lang, text);
    const auto [noised, log] =
        mock_noise_apply(rec.pe, tcfg.noise_rate, tcfg.noise_seed, sid, "s");
    REQUIRE(rec.mt == noised);
    const std::size_t k = log.size();
    const std::size_t n = rec.pe.size();
    CHECK(rec.hter == doctest::Approx(static_cast<double>(k) / n).epsilon(1e-12));
    std::size_t bad = 0;
    for (Tag t : rec.mt_word_tags) bad += (t == Tag::BAD);
    CHECK(bad == k);
    for (Tag t : rec.gap_tags) CHECK(t == Tag::OK);
    total_bad += bad;
  }
  CHECK(result.stats.mt_word_tags.bad == total_bad);
}

TEST_CASE("record order matches input order") {
  auto tr = make_translator({});
  const auto corpus = small_corpus(15);
  const BuildResult result = build_mono(corpus, *tr, mono_config());
  for (std::size_t i = 0; i < result.records.size(); ++i)
    CHECK(result.records[i].meta.line_no == i + 1);
}

TEST_CASE("hter is recomputable from the stored sequences") {
  PipelineConfig cfg = mono_config();
  TranslatorConfig tcfg;
  tcfg.engine = EngineKind::MockNoise;
  tcfg.noise_rate = 0.4;
  tcfg.noise_seed = 19;
  auto tr = make_translator(tcfg);
  const BuildResult result = build_mono(small_corpus(15), *tr, cfg);
  for (const QeRecord& rec : result.records) {
    const TerResult ter = ter_score(rec.mt, rec.pe, cfg.shift);
    CHECK(rec.hter == doctest::Approx(hter(ter, cfg.clip_hter)).epsilon(1e-12));
  }
}

TEST_CASE("seeded runs are reproducible") {
  PipelineConfig cfg = mono_config();
  TranslatorConfig tcfg;
  tcfg.engine = EngineKind::MockNoise;
  tcfg.noise_rate = 0.25;
  tcfg.noise_seed = 99;
  const auto corpus = small_corpus(12);

  testutil::TempDir dir("repro");
  for (int run = 0; run < 2; ++run) {
    auto tr = make_translator(tcfg);
    const BuildResult result = build_mono(corpus, *tr, cfg);
    write_jsonl(result.records, (dir.path() / ("run" + std::to_string(run) + ".jsonl")).string());
  }
  CHECK(testutil::slurp(dir.path() / "run0.jsonl") ==
        testutil::slurp(dir.path() / "run1.jsonl"));
}

TEST_CASE("backend failure writes a checkpoint and propagates") {
  testutil::TempDir dir("ckpt");
  FailingTranslator tr;
  RunHooks hooks;
  hooks.checkpoint_path = (dir.path() / "checkpoint.jsonl").string();
  CHECK_THROWS_AS(build_mono(small_corpus(5), tr, mono_config(), hooks),
                  BackendError);
  // the file exists (it may be empty when nothing completed)
  CHECK(std::filesystem::exists(hooks.checkpoint_path));
}

TEST_CASE("cancellation hook aborts the run") {
  auto tr = make_translator({});
  RunHooks hooks;
  hooks.cancelled = [] { return true; };
  CHECK_THROWS_AS(build_mono(small_corpus(3), *tr, mono_config(), hooks),
                  BackendError);
}

TEST_CASE("output lock is exclusive and releases on destruction") {
  testutil::TempDir dir("lock");
  {
    OutputLock lock(dir.str());
    CHECK_THROWS_AS(OutputLock(dir.str()), IoError);
  }
  OutputLock relock(dir.str());  // fine after release
}

TEST_CASE("warm cache rerun performs zero backend calls") {
  testutil::TempDir dir("warm");
  const std::string cache_path = (dir.path() / "cache.jsonl").string();
  PipelineConfig cfg = mono_config();
  TranslatorConfig tcfg;
  tcfg.engine = EngineKind::MockNoise;
  tcfg.noise_rate = 0.3;
  tcfg.noise_seed = 5;
  const auto corpus = small_corpus(10);

  std::vector<QeRecord> cold_records;
  {
    auto cache = std::make_shared<TranslationCache>(cache_path);
    auto tr = make_translator(tcfg, cache);
    const BuildResult cold = build_mono(corpus, *tr, cfg);
    CHECK(cold.stats.backend_calls > 0);
    cold_records = cold.records;
  }
  {
    auto cache = std::make_shared<TranslationCache>(cache_path);
    auto tr = make_translator(tcfg, cache);
    const BuildResult warm = build_mono(corpus, *tr, cfg);
    CHECK(warm.stats.backend_calls == 0);
    CHECK(warm.stats.cache_hits > 0);
    REQUIRE(warm.records.size() == cold_records.size());
    for (std::size_t i = 0; i < warm.records.size(); ++i) {
      CHECK(warm.records[i].mt == cold_records[i].mt);
      CHECK(warm.records[i].hter == cold_records[i].hter);
    }
  }
}
