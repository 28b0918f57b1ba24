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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pseudoqe/aligner.hpp"
#include "pseudoqe/error.hpp"
#include "pseudoqe/ioformats.hpp"
#include "pseudoqe/mtbackend.hpp"
#include "pseudoqe/pipeline.hpp"
#include "pseudoqe/tags.hpp"
#include "pseudoqe/ter.hpp"
#include "pseudoqe/textnorm.hpp"
#include "pseudoqe/version.hpp"

namespace py = pybind11;
using namespace pseudoqe;

namespace {

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::Match: return "match";
    case OpKind::Sub: return "sub";
    case OpKind::Ins: return "ins";
    case OpKind::Del: return "del";
    case OpKind::Shift: return "shift";
  }
  return "?";
}

py::list script_to_py(const EditScript& script) {
  py::list out;
  for (const EditOp& op : script) {
    py::dict d;
    d["op"] = op_name(op.kind);
    d["hyp"] = op.hyp;
    d["ref"] = op.ref;
    if (op.kind == OpKind::Shift) d["len"] = op.len;
    out.append(d);
  }
  return out;
}

py::list tags_to_py(const TagSeq& tags) {
  py::list out;
  for (Tag t : tags) out.append(tag_name(t));
  return out;
}

py::dict record_to_py(const QeRecord& rec) {
  py::dict d;
  d["src"] = rec.src;
  d["mt"] = rec.mt;
  d["pe"] = rec.pe;
  d["hter"] = rec.hter;
  d["src_tags"] = tags_to_py(rec.src_tags);
  d["mt_word_tags"] = tags_to_py(rec.mt_word_tags);
  d["gap_tags"] = tags_to_py(rec.gap_tags);
  py::dict meta;
  meta["mode"] = mode_name(rec.meta.mode);
  meta["src_lang"] = rec.meta.src_lang;
  meta["tgt_lang"] = rec.meta.tgt_lang;
  meta["engine"] = rec.meta.engine;
  meta["line_no"] = rec.meta.line_no;
  d["meta"] = meta;
  return d;
}

py::dict stats_to_py(const RunStats& stats) {
  py::dict d;
  d["input_lines"] = stats.input_lines;
  d["records_emitted"] = stats.records_emitted;
  d["skipped"] = stats.skipped;
  d["backend_calls"] = stats.backend_calls;
  d["cache_hits"] = stats.cache_hits;
  d["mean_hter"] = stats.mean_hter;
  auto counts = [](const TagCounts& c) {
    py::dict t;
    t["ok"] = c.ok;
    t["bad"] = c.bad;
    return t;
  };
  d["mt_word_tags"] = counts(stats.mt_word_tags);
  d["gap_tags"] = counts(stats.gap_tags);
  d["source_tags"] = counts(stats.source_tags);
  return d;
}

struct BuildSettings {
  PipelineConfig pipeline;
  TranslatorConfig translator;
  std::string cache_path;
};

BuildSettings settings_from_kwargs(const py::dict& kwargs) {
  BuildSettings s;
  for (const auto& item : kwargs) {
    const std::string key = py::cast<std::string>(item.first);
    const py::handle v = item.second;
    if (key == "src_lang") s.pipeline.src_lang = py::cast<std::string>(v);
    else if (key == "tgt_lang") s.pipeline.tgt_lang = py::cast<std::string>(v);
    else if (key == "level") s.pipeline.level = level_from_string(py::cast<std::string>(v));
    else if (key == "lowercase") s.pipeline.norm.lowercase = py::cast<bool>(v);
    else if (key == "split_punct") s.pipeline.norm.split_punct = py::cast<bool>(v);
    else if (key == "nfc") s.pipeline.norm.nfc = py::cast<bool>(v);
    else if (key == "shifts") s.pipeline.shift.enable = py::cast<bool>(v);
    else if (key == "max_shift_size") s.pipeline.shift.max_shift_size = py::cast<int>(v);
    else if (key == "max_shift_dist") s.pipeline.shift.max_shift_dist = py::cast<int>(v);
    else if (key == "iterations") s.pipeline.aligner.iterations = py::cast<int>(v);
    else if (key == "p0") s.pipeline.aligner.p0 = py::cast<double>(v);
    else if (key == "tension") s.pipeline.aligner.lambda_init = py::cast<double>(v);
    else if (key == "tension_steps") s.pipeline.aligner.lambda_steps = py::cast<int>(v);
    else if (key == "tension_rate") s.pipeline.aligner.lambda_rate = py::cast<double>(v);
    else if (key == "alpha") s.pipeline.aligner.alpha = py::cast<double>(v);
    else if (key == "workers") s.pipeline.aligner.workers = py::cast<int>(v);
    else if (key == "heuristic") s.pipeline.sym = sym_heuristic_from_string(py::cast<std::string>(v));
    else if (key == "clip_hter") s.pipeline.clip_hter = py::cast<bool>(v);
    else if (key == "max_tokens") s.pipeline.max_tokens = py::cast<int>(v);
    else if (key == "strict") s.pipeline.strict = py::cast<bool>(v);
    else if (key == "engine") s.translator.engine = engine_from_string(py::cast<std::string>(v));
    else if (key == "endpoint") s.translator.endpoint = py::cast<std::string>(v);
    else if (key == "api_key_env") s.translator.api_key_env = py::cast<std::string>(v);
    else if (key == "batch_size") s.translator.batch_size = py::cast<int>(v);
    else if (key == "max_retries") s.translator.max_retries = py::cast<int>(v);
    else if (key == "timeout") s.translator.timeout_s = py::cast<double>(v);
    else if (key == "noise_rate") s.translator.noise_rate = py::cast<double>(v);
    else if (key == "seed") s.translator.noise_seed = py::cast<std::uint64_t>(v);
    else if (key == "noise_ops") s.translator.noise_ops = py::cast<std::string>(v);
    else if (key == "max_inflight") s.translator.max_inflight = py::cast<int>(v);
    else if (key == "cache") s.cache_path = py::cast<std::string>(v);
    else throw ConfigError("unknown build setting '" + key + "'");
  }
  if (s.pipeline.src_lang.empty() || s.pipeline.tgt_lang.empty())
    throw ConfigError("src_lang and tgt_lang are required");
  return s;
}

py::dict run_build(BuildSettings s, CorpusMode mode,
                   const std::function<BuildResult(Translator&)>& run) {
  s.pipeline.mode = mode;
  std::shared_ptr<TranslationCache> cache;
  if (!s.cache_path.empty())
    cache = std::make_shared<TranslationCache>(s.cache_path);
  auto translator = make_translator(s.translator, cache);
  const BuildResult result = run(*translator);
  py::list records;
  for (const QeRecord& rec : result.records) records.append(record_to_py(rec));
  py::dict out;
  out["records"] = records;
  out["stats"] = stats_to_py(result.stats);
  return out;
}

Alignment links_to_alignment(const std::vector<std::pair<int, int>>& links,
                             int src_len, int tgt_len) {
  Alignment a;
  a.src_len = src_len;
  a.tgt_len = tgt_len;
  for (const auto& [i, j] : links) a.links.push_back({i, j});
  std::sort(a.links.begin(), a.links.end());
  return a;
}

std::vector<std::pair<int, int>> alignment_to_links(const Alignment& a) {
  std::vector<std::pair<int, int>> out;
  for (const Link& l : a.links) out.emplace_back(l.src, l.tgt);
  return out;
}

}  // namespace

PYBIND11_MODULE(_pseudoqe, m) {
  m.doc() = "pseudo quality-estimation dataset builder";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "PseudoqeError");

  m.def(
      "normalize",
      [](const std::string& text, bool lowercase, bool split_punct, bool nfc) {
        return normalize(text, {lowercase, split_punct, nfc});
      },
      py::arg("text"), py::arg("lowercase") = true,
      py::arg("split_punct") = true, py::arg("nfc") = true,
      "Canonical normalization: NFC, lowercasing, punctuation splitting.");

  m.def(
      "tokenize",
      [](const std::string& text, bool lowercase, bool split_punct, bool nfc) {
        return tokenize(text, {lowercase, split_punct, nfc});
      },
      py::arg("text"), py::arg("lowercase") = true,
      py::arg("split_punct") = true, py::arg("nfc") = true);

  m.def(
      "levenshtein_align",
      [](const TokenSeq& hyp, const TokenSeq& ref) {
        const LevResult res = levenshtein_align(hyp, ref);
        py::dict out;
        out["cost"] = res.cost;
        out["script"] = script_to_py(res.script);
        return out;
      },
      py::arg("hyp"), py::arg("ref"),
      "Monotone minimal edit script (match/sub/ins/del).");

  m.def(
      "ter_score",
      [](const TokenSeq& hyp, const TokenSeq& ref, bool shifts,
         int max_shift_size, int max_shift_dist, bool clip) {
        const TerResult res =
            ter_score(hyp, ref, {shifts, max_shift_size, max_shift_dist});
        py::dict out;
        out["num_sub"] = res.num_sub;
        out["num_ins"] = res.num_ins;
        out["num_del"] = res.num_del;
        out["num_shift"] = res.num_shift;
        out["ref_len"] = res.ref_len;
        out["total_edits"] = res.total_edits();
        out["hter"] = hter(res, clip);
        out["script"] = script_to_py(res.script);
        out["hyp_order"] = res.hyp_order;
        return out;
      },
      py::arg("hyp"), py::arg("ref"), py::arg("shifts") = true,
      py::arg("max_shift_size") = 10, py::arg("max_shift_dist") = 50,
      py::arg("clip") = false,
      "Greedy-shift translation edit rate of hyp against ref.");

  m.def(
      "word_tags",
      [](const TokenSeq& mt, const TokenSeq& pe) {
        const LevResult lev = levenshtein_align(mt, pe);
        const MtTags tags = mt_tags(lev.script, static_cast<int>(mt.size()));
        py::dict out;
        out["word"] = tags_to_py(tags.word);
        out["gap"] = tags_to_py(tags.gap);
        out["interleaved"] = tags_to_py(interleave(tags.word, tags.gap));
        return out;
      },
      py::arg("mt"), py::arg("pe"),
      "OK/BAD word and gap tags from the shift-free edit script.");

  m.def(
      "source_tags",
      [](const std::vector<std::pair<int, int>>& links, const TokenSeq& mt,
         const TokenSeq& pe, int src_len) {
        const LevResult lev = levenshtein_align(mt, pe);
        return tags_to_py(source_tags(
            links_to_alignment(links, src_len, static_cast<int>(pe.size())),
            lev.script, src_len));
      },
      py::arg("links"), py::arg("mt"), py::arg("pe"), py::arg("src_len"),
      "OK/BAD source tags from source->reference links and the edit script.");

  py::class_<AlignmentModel>(m, "Aligner")
      .def_property_readonly("tension", &AlignmentModel::tension)
      .def(
          "viterbi",
          [](const AlignmentModel& model, const TokenSeq& src, const TokenSeq& tgt) {
            return alignment_to_links(viterbi_align(model, src, tgt));
          },
          py::arg("src"), py::arg("tgt"))
      .def(
          "ttable_row",
          [](const AlignmentModel& model, const std::string& token) {
            return model.ttable_row(token);
          },
          py::arg("src_token"));

  m.def(
      "train_aligner",
      [](const std::vector<std::pair<TokenSeq, TokenSeq>>& bitext,
         int iterations, double p0, double tension, int tension_steps,
         double tension_rate, double alpha) {
        AlignerConfig cfg;
        cfg.iterations = iterations;
        cfg.p0 = p0;
        cfg.lambda_init = tension;
        cfg.lambda_steps = tension_steps;
        cfg.lambda_rate = tension_rate;
        cfg.alpha = alpha;
        TrainStats stats;
        AlignmentModel model = em_train(bitext, cfg, &stats);
        return py::make_tuple(std::move(model), stats.iteration_loglik);
      },
      py::arg("bitext"), py::arg("iterations") = 5, py::arg("p0") = 0.08,
      py::arg("tension") = 4.0, py::arg("tension_steps") = 8,
      py::arg("tension_rate") = 1.0, py::arg("alpha") = 0.01,
      "EM-train the diagonal-tension aligner; returns (model, loglik per "
      "iteration).");

  m.def(
      "symmetrize",
      [](const std::vector<std::pair<int, int>>& forward,
         const std::vector<std::pair<int, int>>& reverse, int src_len,
         int tgt_len, const std::string& heuristic) {
        return alignment_to_links(
            symmetrize(links_to_alignment(forward, src_len, tgt_len),
                       links_to_alignment(reverse, src_len, tgt_len),
                       sym_heuristic_from_string(heuristic)));
      },
      py::arg("forward"), py::arg("reverse"), py::arg("src_len"),
      py::arg("tgt_len"), py::arg("heuristic") = "gdfa",
      "Combine forward and (already transposed) reverse alignments.");

  m.def(
      "mock_noise_apply",
      [](const TokenSeq& tokens, double rate, std::uint64_t seed,
         std::uint64_t sentence_id, const std::string& ops) {
        const auto [out, log] = mock_noise_apply(tokens, rate, seed, sentence_id, ops);
        py::list edits;
        for (const NoiseEdit& e : log) {
          py::dict d;
          d["kind"] = e.kind == NoiseEdit::Kind::Sub   ? "sub"
                      : e.kind == NoiseEdit::Kind::Del ? "del"
                                                       : "ins";
          d["pos"] = e.pos;
          d["before"] = e.before;
          d["after"] = e.after;
          edits.append(d);
        }
        return py::make_tuple(out, edits);
      },
      py::arg("tokens"), py::arg("rate"), py::arg("seed"),
      py::arg("sentence_id"), py::arg("ops") = "sdi",
      "Deterministic seeded corruption pass; returns (tokens, edit log).");

  m.def("mock_sentence_id", &mock_sentence_id, py::arg("src_lang"),
        py::arg("tgt_lang"), py::arg("text"));

  m.def(
      "build_mono",
      [](const std::vector<std::string>& corpus, const py::kwargs& kwargs) {
        BuildSettings s = settings_from_kwargs(kwargs);
        return run_build(std::move(s), CorpusMode::Mono, [&](Translator& tr) {
          BuildSettings local = settings_from_kwargs(kwargs);
          local.pipeline.mode = CorpusMode::Mono;
          return build_mono(corpus, tr, local.pipeline);
        });
      },
      py::arg("corpus"),
      "Round-trip a monolingual corpus into QE records. Keyword settings "
      "mirror the CLI flags (src_lang, tgt_lang, engine, noise_rate, ...).");

  m.def(
      "build_parallel",
      [](const std::vector<std::pair<std::string, std::string>>& corpus,
         const py::kwargs& kwargs) {
        BuildSettings s = settings_from_kwargs(kwargs);
        return run_build(std::move(s), CorpusMode::Parallel, [&](Translator& tr) {
          BuildSettings local = settings_from_kwargs(kwargs);
          local.pipeline.mode = CorpusMode::Parallel;
          return build_parallel(corpus, tr, local.pipeline);
        });
      },
      py::arg("corpus"),
      "Forward-translate a parallel corpus into QE records.");
}
