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

#include "pseudoqe/ioformats.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pseudoqe/error.hpp"
#include "pseudoqe/version.hpp"

namespace pseudoqe {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  return out;
}

std::string tags_to_line(const TagSeq& tags) {
  std::ostringstream out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out << ' ';
    out << tag_name(tags[i]);
  }
  return out.str();
}

TagSeq tags_from_line(const std::string& line, const std::string& path,
                      std::size_t line_no) {
  TagSeq out;
  for (const std::string& tok : split_ws(line)) {
    if (tok == "OK")
      out.push_back(Tag::OK);
    else if (tok == "BAD")
      out.push_back(Tag::BAD);
    else {
      std::ostringstream msg;
      msg << path << " line " << line_no << ": unknown tag '" << tok << "'";
      throw InvalidCorpusError(msg.str());
    }
  }
  return out;
}

json tags_to_json(const TagSeq& tags) {
  json arr = json::array();
  for (Tag t : tags) arr.push_back(tag_name(t));
  return arr;
}

TagSeq tags_from_json(const json& arr) {
  TagSeq out;
  for (const auto& item : arr) out.push_back(tag_from_string(item.get<std::string>()));
  return out;
}

}  // namespace

std::vector<std::string> read_mono(const std::string& path) {
  return read_lines(path);
}

std::vector<std::pair<std::string, std::string>> read_parallel(
    const std::string& src_path, const std::string& tgt_path) {
  std::vector<std::string> src = read_lines(src_path);
  std::vector<std::string> tgt = read_lines(tgt_path);
  if (src.size() != tgt.size()) {
    std::ostringstream msg;
    msg << "line count mismatch: " << src_path << " has " << src.size()
        << " lines, " << tgt_path << " has " << tgt.size();
    throw InvalidCorpusError(msg.str());
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i)
    pairs.emplace_back(std::move(src[i]), std::move(tgt[i]));
  return pairs;
}

std::vector<std::pair<std::string, std::string>> read_parallel_tsv(
    const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      std::ostringstream msg;
      msg << path << " line " << (i + 1) << ": expected exactly one tab";
      throw InvalidCorpusError(msg.str());
    }
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return pairs;
}

WmtFileSet WmtFileSet::at(const std::string& out_dir, const std::string& prefix) {
  const fs::path base = fs::path(out_dir) / prefix;
  WmtFileSet set;
  set.src = base.string() + ".src";
  set.mt = base.string() + ".mt";
  set.pe = base.string() + ".pe";
  set.hter = base.string() + ".hter";
  set.tags = base.string() + ".tags";
  set.source_tags = base.string() + ".source_tags";
  return set;
}

std::vector<std::string> WmtFileSet::all() const {
  return {src, mt, pe, hter, tags, source_tags};
}

std::string format_hter(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

void write_wmt(const std::vector<QeRecord>& records, const std::string& out_dir,
               const std::string& prefix, bool overwrite) {
  if (!fs::is_directory(out_dir))
    throw IoError("output directory does not exist: " + out_dir);
  const WmtFileSet set = WmtFileSet::at(out_dir, prefix);
  if (!overwrite)
    for (const std::string& path : set.all())
      if (fs::exists(path))
        throw IoError("refusing to overwrite " + path + " (use --overwrite)");

  std::ofstream src = open_out(set.src), mt = open_out(set.mt),
                pe = open_out(set.pe), hter = open_out(set.hter),
                tags = open_out(set.tags), source = open_out(set.source_tags);
  for (const QeRecord& rec : records) {
    src << join(rec.src) << '\n';
    mt << join(rec.mt) << '\n';
    pe << join(rec.pe) << '\n';
    hter << format_hter(rec.hter) << '\n';
    // sentence-level records carry no tags and produce empty lines
    if (rec.mt_word_tags.empty() && rec.gap_tags.empty())
      tags << '\n';
    else
      tags << tags_to_line(interleave(rec.mt_word_tags, rec.gap_tags)) << '\n';
    source << tags_to_line(rec.src_tags) << '\n';
  }
}

std::vector<QeRecord> read_wmt(const std::string& out_dir,
                               const std::string& prefix) {
  const WmtFileSet set = WmtFileSet::at(out_dir, prefix);
  std::vector<std::vector<std::string>> columns;
  for (const std::string& path : set.all()) columns.push_back(read_lines(path));
  for (std::size_t c = 1; c < columns.size(); ++c)
    if (columns[c].size() != columns[0].size()) {
      std::ostringstream msg;
      msg << "files are not line-parallel: " << set.all()[c] << " has "
          << columns[c].size() << " lines, expected " << columns[0].size();
      throw InvalidCorpusError(msg.str());
    }

  std::vector<QeRecord> records;
  records.reserve(columns[0].size());
  for (std::size_t i = 0; i < columns[0].size(); ++i) {
    QeRecord rec;
    rec.src = split_ws(columns[0][i]);
    rec.mt = split_ws(columns[1][i]);
    rec.pe = split_ws(columns[2][i]);
    char* end = nullptr;
    rec.hter = std::strtod(columns[3][i].c_str(), &end);
    if (end == columns[3][i].c_str()) {
      std::ostringstream msg;
      msg << set.hter << " line " << (i + 1) << ": bad score '"
          << columns[3][i] << "'";
      throw InvalidCorpusError(msg.str());
    }
    const TagSeq inter = tags_from_line(columns[4][i], set.tags, i + 1);
    if (!inter.empty()) {
      if (inter.size() != 2 * rec.mt.size() + 1) {
        std::ostringstream msg;
        msg << set.tags << " line " << (i + 1) << ": expected "
            << 2 * rec.mt.size() + 1 << " tags, found " << inter.size();
        throw InvalidCorpusError(msg.str());
      }
      for (std::size_t k = 0; k < inter.size(); ++k)
        (k % 2 == 0 ? rec.gap_tags : rec.mt_word_tags).push_back(inter[k]);
    }
    rec.src_tags = tags_from_line(columns[5][i], set.source_tags, i + 1);
    records.push_back(std::move(rec));
  }
  return records;
}

void write_jsonl(const std::vector<QeRecord>& records, const std::string& path,
                 bool overwrite) {
  if (!overwrite && fs::exists(path))
    throw IoError("refusing to overwrite " + path + " (use --overwrite)");
  std::ofstream out = open_out(path);
  for (const QeRecord& rec : records) {
    ordered_json obj;
    obj["src"] = rec.src;
    obj["mt"] = rec.mt;
    obj["pe"] = rec.pe;
    obj["hter"] = rec.hter;
    obj["src_tags"] = tags_to_json(rec.src_tags);
    obj["mt_word_tags"] = tags_to_json(rec.mt_word_tags);
    obj["gap_tags"] = tags_to_json(rec.gap_tags);
    obj["meta"] = ordered_json{{"mode", mode_name(rec.meta.mode)},
                               {"src_lang", rec.meta.src_lang},
                               {"tgt_lang", rec.meta.tgt_lang},
                               {"engine", rec.meta.engine},
                               {"line_no", rec.meta.line_no}};
    out << obj.dump() << '\n';
  }
}

std::vector<QeRecord> read_jsonl(const std::string& path) {
  std::vector<QeRecord> records;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json obj = json::parse(lines[i], nullptr, false);
    if (obj.is_discarded()) {
      std::ostringstream msg;
      msg << path << " line " << (i + 1) << ": invalid JSON";
      throw InvalidCorpusError(msg.str());
    }
    QeRecord rec;
    rec.src = obj.at("src").get<TokenSeq>();
    rec.mt = obj.at("mt").get<TokenSeq>();
    rec.pe = obj.at("pe").get<TokenSeq>();
    rec.hter = obj.at("hter").get<double>();
    rec.src_tags = tags_from_json(obj.at("src_tags"));
    rec.mt_word_tags = tags_from_json(obj.at("mt_word_tags"));
    rec.gap_tags = tags_from_json(obj.at("gap_tags"));
    if (obj.contains("meta")) {
      const json& meta = obj["meta"];
      rec.meta.mode = mode_from_string(meta.value("mode", "mono"));
      rec.meta.src_lang = meta.value("src_lang", "");
      rec.meta.tgt_lang = meta.value("tgt_lang", "");
      rec.meta.engine = meta.value("engine", "");
      rec.meta.line_no = meta.value("line_no", std::size_t{0});
    }
    records.push_back(std::move(rec));
  }
  return records;
}

nlohmann::ordered_json manifest_json(const PipelineConfig& config,
                                     const TranslatorConfig& translator,
                                     const RunStats& stats,
                                     const std::string& prefix,
                                     const std::string& format) {
  ordered_json cfg;
  cfg["mode"] = mode_name(config.mode);
  cfg["level"] = level_name(config.level);
  cfg["src-lang"] = config.src_lang;
  cfg["tgt-lang"] = config.tgt_lang;
  cfg["prefix"] = prefix;
  cfg["format"] = format;
  cfg["lowercase"] = config.norm.lowercase;
  cfg["split-punct"] = config.norm.split_punct;
  cfg["nfc"] = config.norm.nfc;
  cfg["shifts"] = config.shift.enable;
  cfg["max-shift-size"] = config.shift.max_shift_size;
  cfg["max-shift-dist"] = config.shift.max_shift_dist;
  cfg["iterations"] = config.aligner.iterations;
  cfg["p0"] = config.aligner.p0;
  cfg["tension"] = config.aligner.lambda_init;
  cfg["tension-steps"] = config.aligner.lambda_steps;
  cfg["tension-rate"] = config.aligner.lambda_rate;
  cfg["alpha"] = config.aligner.alpha;
  cfg["heuristic"] = sym_heuristic_name(config.sym);
  cfg["clip-hter"] = config.clip_hter;
  cfg["max-tokens"] = config.max_tokens;
  cfg["strict"] = config.strict;
  cfg["engine"] = engine_name(translator.engine);
  cfg["endpoint"] = translator.endpoint;
  cfg["api-key-env"] = translator.api_key_env;
  cfg["batch-size"] = translator.batch_size;
  cfg["max-retries"] = translator.max_retries;
  cfg["timeout"] = translator.timeout_s;
  cfg["noise-rate"] = translator.noise_rate;
  cfg["seed"] = translator.noise_seed;
  cfg["noise-ops"] = translator.noise_ops;
  cfg["max-inflight"] = translator.max_inflight;

  ordered_json st;
  st["input_lines"] = stats.input_lines;
  st["records_emitted"] = stats.records_emitted;
  st["skipped"] = stats.skipped;
  st["backend_calls"] = stats.backend_calls;
  st["cache_hits"] = stats.cache_hits;
  st["mean_hter"] = stats.mean_hter;
  st["tag_counts"] = ordered_json{
      {"mt_word", {{"ok", stats.mt_word_tags.ok}, {"bad", stats.mt_word_tags.bad}}},
      {"gap", {{"ok", stats.gap_tags.ok}, {"bad", stats.gap_tags.bad}}},
      {"source", {{"ok", stats.source_tags.ok}, {"bad", stats.source_tags.bad}}}};

  ordered_json manifest;
  manifest["tool"] = "pseudoqe";
  manifest["version"] = kVersion;
  manifest["config"] = std::move(cfg);
  manifest["stats"] = std::move(st);
  return manifest;
}

void write_manifest(const nlohmann::ordered_json& manifest,
                    const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw IoError("output directory does not exist: " + parent.string());
  std::ofstream out = open_out(path);
  out << manifest.dump(2) << '\n';
}

}  // namespace pseudoqe
