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

#include <fstream>

#include "pseudoqe/error.hpp"
#include "pseudoqe/ioformats.hpp"
#include "testutil.hpp"

using namespace pseudoqe;

namespace {

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
}

// Random record satisfying every length contract; hter is normalized to
// the 6-decimal grid so file round trips are exact.
QeRecord random_record(testutil::Rng& rng) {
  QeRecord rec;
  rec.mt = rng.tokens(8, 6);
  rec.pe = rng.tokens(8, 6);
  rec.src = rng.tokens(8, 6);
  rec.hter = std::strtod(format_hter(rng.uniform() * 1.4).c_str(), nullptr);
  auto random_tags = [&](std::size_t n) {
    TagSeq tags;
    for (std::size_t i = 0; i < n; ++i)
      tags.push_back(rng.below(2) ? Tag::BAD : Tag::OK);
    return tags;
  };
  rec.mt_word_tags = random_tags(rec.mt.size());
  rec.gap_tags = random_tags(rec.mt.size() + 1);
  rec.src_tags = random_tags(rec.src.size());
  rec.meta.mode = CorpusMode::Parallel;
  rec.meta.src_lang = "en";
  rec.meta.tgt_lang = "de";
  rec.meta.engine = "mock-identity";
  rec.meta.line_no = 1 + static_cast<std::size_t>(rng.below(1000));
  return rec;
}

void check_equal_data(const QeRecord& a, const QeRecord& b) {
  CHECK(a.src == b.src);
  CHECK(a.mt == b.mt);
  CHECK(a.pe == b.pe);
  CHECK(a.hter == b.hter);
  CHECK(a.src_tags == b.src_tags);
  CHECK(a.mt_word_tags == b.mt_word_tags);
  CHECK(a.gap_tags == b.gap_tags);
}

}  // namespace

TEST_CASE("read_mono") {
  testutil::TempDir dir("mono");
  SUBCASE("three lines in order") {
    write_file(dir.path() / "a.txt", "one\ntwo\nthree\n");
    CHECK(read_mono((dir.path() / "a.txt").string()) ==
          std::vector<std::string>{"one", "two", "three"});
  }
  SUBCASE("trailing newline adds no phantom sentence") {
    write_file(dir.path() / "b.txt", "one\ntwo");
    write_file(dir.path() / "c.txt", "one\ntwo\n");
    CHECK(read_mono((dir.path() / "b.txt").string()) ==
          read_mono((dir.path() / "c.txt").string()));
  }
  SUBCASE("CRLF parses identically to LF") {
    write_file(dir.path() / "d.txt", "one two\r\nthree four\r\n");
    write_file(dir.path() / "e.txt", "one two\nthree four\n");
    CHECK(read_mono((dir.path() / "d.txt").string()) ==
          read_mono((dir.path() / "e.txt").string()));
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_mono((dir.path() / "nope.txt").string()), IoError);
  }
}

TEST_CASE("read_parallel") {
  testutil::TempDir dir("par");
  SUBCASE("equal files pair up") {
    write_file(dir.path() / "s.txt", "s1\ns2\n");
    write_file(dir.path() / "t.txt", "t1\nt2\n");
    const auto pairs = read_parallel((dir.path() / "s.txt").string(),
                                     (dir.path() / "t.txt").string());
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == std::pair<std::string, std::string>{"s1", "t1"});
  }
  SUBCASE("count mismatch is fatal") {
    std::string ten, nine;
    for (int i = 0; i < 10; ++i) ten += "line\n";
    for (int i = 0; i < 9; ++i) nine += "line\n";
    write_file(dir.path() / "ten.txt", ten);
    write_file(dir.path() / "nine.txt", nine);
    CHECK_THROWS_AS(read_parallel((dir.path() / "ten.txt").string(),
                                  (dir.path() / "nine.txt").string()),
                    InvalidCorpusError);
  }
}

TEST_CASE("read_parallel_tsv") {
  testutil::TempDir dir("tsv");
  SUBCASE("single tab per line") {
    write_file(dir.path() / "ok.tsv", "a b\tc d\ne\tf\n");
    const auto pairs = read_parallel_tsv((dir.path() / "ok.tsv").string());
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].first == "a b");
    CHECK(pairs[0].second == "c d");
  }
  SUBCASE("two tabs name the offending line") {
    write_file(dir.path() / "bad.tsv", "a\tb\nx\ty\tz\n");
    try {
      read_parallel_tsv((dir.path() / "bad.tsv").string());
      FAIL("expected InvalidCorpusError");
    } catch (const InvalidCorpusError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("no tab is also malformed") {
    write_file(dir.path() / "notab.tsv", "a b c\n");
    CHECK_THROWS_AS(read_parallel_tsv((dir.path() / "notab.tsv").string()),
                    InvalidCorpusError);
  }
}

TEST_CASE("write_wmt formatting") {
  testutil::TempDir dir("wmt");
  QeRecord rec;
  rec.src = {"s1", "s2"};
  rec.mt = {"m1", "m2"};
  rec.pe = {"p1", "p2", "p3"};
  rec.hter = 1.0 / 3.0;
  rec.mt_word_tags = {Tag::OK, Tag::BAD};
  rec.gap_tags = {Tag::OK, Tag::OK, Tag::BAD};
  rec.src_tags = {Tag::OK, Tag::OK};
  write_wmt({rec}, dir.str(), "corpus");

  CHECK(testutil::slurp(dir.path() / "corpus.hter") == "0.333333\n");
  // 2n+1 interleaved tags for n MT tokens
  CHECK(testutil::slurp(dir.path() / "corpus.tags") == "OK OK OK BAD BAD\n");
  CHECK(testutil::slurp(dir.path() / "corpus.src") == "s1 s2\n");
  CHECK(testutil::slurp(dir.path() / "corpus.mt") == "m1 m2\n");
  CHECK(testutil::slurp(dir.path() / "corpus.pe") == "p1 p2 p3\n");
  CHECK(testutil::slurp(dir.path() / "corpus.source_tags") == "OK OK\n");

  SUBCASE("refuses to overwrite without the flag") {
    CHECK_THROWS_AS(write_wmt({rec}, dir.str(), "corpus"), IoError);
    write_wmt({rec}, dir.str(), "corpus", /*overwrite=*/true);
  }
}

TEST_CASE("write_wmt requires the output directory") {
  CHECK_THROWS_AS(write_wmt({}, "/nonexistent/dir/xyz", "p"), IoError);
}

TEST_CASE("wmt round trip over fuzzed records") {
  testutil::TempDir dir("wmtfuzz");
  testutil::Rng rng(606);
  std::vector<QeRecord> records;
  for (int i = 0; i < 200; ++i) records.push_back(random_record(rng));
  write_wmt(records, dir.str(), "fuzz");

  // line-parallel check
  const WmtFileSet set = WmtFileSet::at(dir.str(), "fuzz");
  for (const std::string& path : set.all()) {
    std::ifstream in(path);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == records.size());
  }

  const auto parsed = read_wmt(dir.str(), "fuzz");
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < parsed.size(); ++i)
    check_equal_data(parsed[i], records[i]);
}

TEST_CASE("sentence-level records round trip with empty tag lines") {
  testutil::TempDir dir("wmtsent");
  QeRecord rec;
  rec.src = {"a"};
  rec.mt = {"b"};
  rec.pe = {"b"};
  rec.hter = 0.0;
  write_wmt({rec}, dir.str(), "s");
  const auto parsed = read_wmt(dir.str(), "s");
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].mt_word_tags.empty());
  CHECK(parsed[0].gap_tags.empty());
  CHECK(parsed[0].src_tags.empty());
}

TEST_CASE("jsonl round trip") {
  testutil::TempDir dir("jsonl");
  testutil::Rng rng(777);
  std::vector<QeRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back(random_record(rng));
  const std::string path = (dir.path() / "data.jsonl").string();
  write_jsonl(records, path);
  const auto parsed = read_jsonl(path);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    check_equal_data(parsed[i], records[i]);
    CHECK(parsed[i].meta.line_no == records[i].meta.line_no);
    CHECK(parsed[i].meta.engine == records[i].meta.engine);
  }

  SUBCASE("identity record serializes all-OK") {
    QeRecord rec;
    rec.src = {"a"};
    rec.mt = {"b"};
    rec.pe = {"b"};
    rec.mt_word_tags = {Tag::OK};
    rec.gap_tags = {Tag::OK, Tag::OK};
    rec.src_tags = {Tag::OK};
    const std::string p2 = (dir.path() / "one.jsonl").string();
    write_jsonl({rec}, p2);
    const std::string content = testutil::slurp(p2);
    CHECK(content.find("\"hter\":0.0") != std::string::npos);
    CHECK(content.find("BAD") == std::string::npos);
  }
  SUBCASE("empty stream writes an empty file") {
    const std::string p3 = (dir.path() / "empty.jsonl").string();
    write_jsonl({}, p3);
    CHECK(testutil::slurp(p3).empty());
    CHECK(read_jsonl(p3).empty());
  }
}

TEST_CASE("manifest schema") {
  PipelineConfig cfg;
  cfg.src_lang = "en";
  cfg.tgt_lang = "de";
  TranslatorConfig tcfg;
  tcfg.noise_seed = 42;
  RunStats stats;
  stats.records_emitted = 5;
  const auto manifest = manifest_json(cfg, tcfg, stats, "corpus", "wmt");

  CHECK(manifest.at("tool") == "pseudoqe");
  CHECK(manifest.at("version").is_string());
  const auto& c = manifest.at("config");
  for (const char* key :
       {"mode", "level", "src-lang", "tgt-lang", "prefix", "format",
        "lowercase", "split-punct", "nfc", "shifts", "max-shift-size",
        "max-shift-dist", "iterations", "p0", "tension", "tension-steps",
        "tension-rate", "alpha", "heuristic", "clip-hter", "max-tokens",
        "strict", "engine", "endpoint", "api-key-env", "batch-size",
        "max-retries", "timeout", "noise-rate", "seed", "noise-ops",
        "max-inflight"})
    CHECK_MESSAGE(c.contains(key), "missing config key: " << key);
  CHECK(c.at("seed") == 42);
  const auto& s = manifest.at("stats");
  CHECK(s.at("records_emitted") == 5);
  CHECK(s.at("tag_counts").contains("mt_word"));

  SUBCASE("writes fail into a missing directory") {
    CHECK_THROWS_AS(write_manifest(manifest, "/nonexistent/dir/m.json"), IoError);
  }
  SUBCASE("writes and re-parses") {
    testutil::TempDir dir("manifest");
    const std::string path = (dir.path() / "manifest.json").string();
    write_manifest(manifest, path);
    const auto parsed = nlohmann::json::parse(testutil::slurp(path));
    CHECK(parsed.at("config").at("tgt-lang") == "de");
  }
}
