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

#include <CLI11.hpp>
#include <algorithm>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "pseudoqe/error.hpp"
#include "pseudoqe/ioformats.hpp"
#include "pseudoqe/pipeline.hpp"
#include "pseudoqe/version.hpp"

namespace fs = std::filesystem;
using namespace pseudoqe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitBackend = 3;
constexpr int kExitCorpus = 4;

void log_line(const std::string& msg) {
  std::fprintf(stderr, "pseudoqe: %s\n", msg.c_str());
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Loads a config file as a list of --key=value arguments. Two formats:
// plain key=value lines, or a manifest.json from a previous run (its
// "config" object feeds back as flags).
std::vector<std::string> load_config_args(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::vector<std::string> args;

  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    nlohmann::json doc = nlohmann::json::parse(content, nullptr, false);
    if (doc.is_discarded())
      throw ConfigError(path + ": neither key=value lines nor valid JSON");
    const nlohmann::json& cfg = doc.contains("config") ? doc["config"] : doc;
    if (!cfg.is_object())
      throw ConfigError(path + ": expected a JSON object of settings");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      const nlohmann::json& v = it.value();
      const std::string value = v.is_string() ? v.get<std::string>() : v.dump();
      if (value.empty()) continue;  // empty restates the default
      args.push_back("--" + it.key() + "=" + value);
    }
    return args;
  }

  std::istringstream lines(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + " line " + std::to_string(line_no) +
                        ": expected key=value");
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (value.empty()) continue;  // empty restates the default
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Expands `--config FILE` in a subcommand's arguments: file-provided values
// are injected before the explicit flags, and take-last resolution makes
// the command line win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  if (rest.empty() || rest[0] != "build")
    throw ConfigError("--config only applies to the build subcommand");
  std::vector<std::string> expanded{"build"};
  for (std::string& arg : load_config_args(config_path)) expanded.push_back(std::move(arg));
  expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
  return expanded;
}

struct BuildArgs {
  std::string mode = "mono";
  std::string level = "both";
  std::string src_lang, tgt_lang;
  std::string input, input_tgt, out_dir;
  std::string config_file;
  std::string format = "wmt";
  std::string prefix = "corpus";
  std::string engine = "mock-identity";
  std::string endpoint;
  std::string cache_path;
  std::string api_key_env = "PSEUDOQE_API_KEY";
  std::string noise_ops = "sdi";
  std::string heuristic = "gdfa";
  std::uint64_t seed = 0;
  double noise_rate = 0.0;
  bool clip_hter = false;
  bool strict = false;
  bool overwrite = false;
  bool lowercase = true;
  bool split_punct = true;
  bool nfc = true;
  bool shifts = true;
  int max_shift_size = 10;
  int max_shift_dist = 50;
  int max_tokens = 200;
  int iterations = 5;
  double p0 = 0.08;
  double tension = 4.0;
  int tension_steps = 8;
  double tension_rate = 1.0;
  double alpha = 0.01;
  int workers = 0;
  int batch_size = 32;
  int max_retries = 3;
  double timeout = 30.0;
  int max_inflight = 4;
};

void add_build_options(CLI::App* build, BuildArgs& args) {
  build->add_option("--mode", args.mode, "Corpus type: mono or parallel")
      ->check(CLI::IsMember({"mono", "parallel"}))
      ->required();
  build->add_option("--src-lang", args.src_lang, "Source language code")->required();
  build->add_option("--tgt-lang", args.tgt_lang, "Target language code")->required();
  build->add_option("--level", args.level, "Annotation granularity")
      ->check(CLI::IsMember({"word", "sentence", "both"}));
  build->add_option("--input", args.input,
                    "Input corpus (mono: one sentence per line; parallel: "
                    "source file or one-tab TSV)")
      ->required();
  build->add_option("--input-tgt", args.input_tgt,
                    "Target side of a two-file parallel corpus");
  build->add_option("--out", args.out_dir, "Output directory")->required();
  build->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"wmt", "jsonl", "both"}));
  build->add_option("--prefix", args.prefix, "Dataset file prefix");
  build->add_option("--engine", args.engine, "Translation backend")
      ->check(CLI::IsMember({"http", "mock-identity", "mock-noise"}));
  build->add_option("--endpoint", args.endpoint, "HTTP translation endpoint URL");
  build->add_option("--cache", args.cache_path, "Persistent translation cache file");
  build->add_option("--seed", args.seed, "Mock-noise seed");
  build->add_option("--noise-rate", args.noise_rate, "Mock-noise edit probability")
      ->check(CLI::Range(0.0, 1.0));
  build->add_option("--noise-ops", args.noise_ops,
                    "Allowed mock edits, subset of \"sdi\"");
  build->add_flag("--clip-hter", args.clip_hter, "Clip sentence scores to 1.0");
  build->add_flag("--strict", args.strict, "Fail on degenerate lines instead of skipping");
  build->add_flag("--overwrite", args.overwrite, "Replace existing output files");
  build->add_flag("--lowercase,!--no-lowercase", args.lowercase, "Lowercase during normalization");
  build->add_flag("--split-punct,!--no-split-punct", args.split_punct, "Isolate punctuation");
  build->add_flag("--nfc,!--no-nfc", args.nfc, "Apply canonical composition");
  build->add_flag("--shifts,!--no-shifts", args.shifts, "Enable block shifts in sentence scoring");
  build->add_option("--max-shift-size", args.max_shift_size)->check(CLI::PositiveNumber);
  build->add_option("--max-shift-dist", args.max_shift_dist)->check(CLI::NonNegativeNumber);
  build->add_option("--max-tokens", args.max_tokens, "Skip lines longer than this")
      ->check(CLI::PositiveNumber);
  build->add_option("--iterations", args.iterations, "Aligner EM iterations")
      ->check(CLI::NonNegativeNumber);
  build->add_option("--p0", args.p0, "Aligner null-alignment mass");
  build->add_option("--tension", args.tension, "Aligner diagonal tension");
  build->add_option("--tension-steps", args.tension_steps,
                    "Tension gradient steps per iteration (0 = fixed)")
      ->check(CLI::NonNegativeNumber);
  build->add_option("--tension-rate", args.tension_rate, "Tension step size");
  build->add_option("--alpha", args.alpha, "Aligner add-alpha smoothing");
  build->add_option("--workers", args.workers, "Aligner E-step threads (0 = auto)");
  build->add_option("--heuristic", args.heuristic, "Alignment symmetrization")
      ->check(CLI::IsMember({"gdfa", "grow-diag-final-and", "intersection", "union"}));
  build->add_option("--batch-size", args.batch_size)->check(CLI::PositiveNumber);
  build->add_option("--max-retries", args.max_retries)->check(CLI::NonNegativeNumber);
  build->add_option("--timeout", args.timeout, "Backend timeout in seconds");
  build->add_option("--max-inflight", args.max_inflight,
                    "Concurrent in-flight backend batches")
      ->check(CLI::PositiveNumber);
  build->add_option("--api-key-env", args.api_key_env,
                    "Environment variable holding the bearer token");
  // handled by expand_config before parsing; registered for help only
  build->add_option("--config", args.config_file,
                    "key=value file or a manifest.json from a previous run");
  // config-injected values first, explicit flags last
  for (CLI::Option* opt : build->get_options())
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

int run_build(const BuildArgs& args) {
  PipelineConfig cfg;
  cfg.mode = mode_from_string(args.mode);
  cfg.level = level_from_string(args.level);
  cfg.src_lang = args.src_lang;
  cfg.tgt_lang = args.tgt_lang;
  cfg.norm = {args.lowercase, args.split_punct, args.nfc};
  cfg.shift = {args.shifts, args.max_shift_size, args.max_shift_dist};
  cfg.aligner = {args.iterations, args.p0,           args.tension,
                 args.tension_steps, args.tension_rate, args.alpha,
                 args.workers};
  cfg.sym = sym_heuristic_from_string(args.heuristic);
  cfg.clip_hter = args.clip_hter;
  cfg.max_tokens = args.max_tokens;
  cfg.strict = args.strict;

  TranslatorConfig tcfg;
  tcfg.engine = engine_from_string(args.engine);
  tcfg.endpoint = args.endpoint;
  tcfg.api_key_env = args.api_key_env;
  tcfg.batch_size = args.batch_size;
  tcfg.max_retries = args.max_retries;
  tcfg.timeout_s = args.timeout;
  tcfg.noise_rate = args.noise_rate;
  tcfg.noise_seed = args.seed;
  tcfg.noise_ops = args.noise_ops;
  tcfg.max_inflight = args.max_inflight;

  const bool is_tsv = args.input_tgt.empty() && cfg.mode == CorpusMode::Parallel;
  if (cfg.mode == CorpusMode::Parallel && args.input_tgt.empty() &&
      fs::path(args.input).extension() != ".tsv")
    throw ConfigError(
        "parallel mode needs --input-tgt (or a single .tsv --input)");
  if (cfg.mode == CorpusMode::Mono && !args.input_tgt.empty())
    throw ConfigError("--input-tgt only applies to --mode parallel");

  fs::create_directories(args.out_dir);
  OutputLock lock(args.out_dir);

  std::shared_ptr<TranslationCache> cache;
  if (!args.cache_path.empty())
    cache = std::make_shared<TranslationCache>(args.cache_path);
  auto translator = make_translator(tcfg, cache);

  RunHooks hooks;
  hooks.log = log_line;
  hooks.cancelled = [] { return cancel_requested(); };
  hooks.checkpoint_path = (fs::path(args.out_dir) / "checkpoint.jsonl").string();

  BuildResult result;
  if (cfg.mode == CorpusMode::Mono) {
    result = build_mono(read_mono(args.input), *translator, cfg, hooks);
  } else {
    auto pairs = is_tsv ? read_parallel_tsv(args.input)
                        : read_parallel(args.input, args.input_tgt);
    result = build_parallel(pairs, *translator, cfg, hooks);
  }

  if (args.format == "wmt" || args.format == "both")
    write_wmt(result.records, args.out_dir, args.prefix, args.overwrite);
  if (args.format == "jsonl" || args.format == "both")
    write_jsonl(result.records,
                (fs::path(args.out_dir) / (args.prefix + ".jsonl")).string(),
                args.overwrite);
  write_manifest(
      manifest_json(cfg, tcfg, result.stats, args.prefix, args.format),
      (fs::path(args.out_dir) / "manifest.json").string());

  std::error_code ec;
  fs::remove(hooks.checkpoint_path, ec);  // resume artifact, gone on success

  std::ostringstream summary;
  summary << "wrote " << result.stats.records_emitted << " records to "
          << args.out_dir << " (skipped " << result.stats.skipped
          << ", backend calls " << result.stats.backend_calls
          << ", cache hits " << result.stats.cache_hits << ", mean HTER "
          << format_hter(result.stats.mean_hter) << ")";
  log_line(summary.str());
  return kExitOk;
}

int run_ter(const std::string& hyp_path, const std::string& ref_path,
            bool shifts) {
  const auto hyp_lines = read_mono(hyp_path);
  const auto ref_lines = read_mono(ref_path);
  if (hyp_lines.size() != ref_lines.size()) {
    std::ostringstream msg;
    msg << "line count mismatch: " << hyp_path << " has " << hyp_lines.size()
        << " lines, " << ref_path << " has " << ref_lines.size();
    throw InvalidCorpusError(msg.str());
  }
  ShiftParams params;
  params.enable = shifts;
  for (std::size_t i = 0; i < hyp_lines.size(); ++i) {
    const TerResult res =
        ter_score(split_ws(hyp_lines[i]), split_ws(ref_lines[i]), params);
    std::printf("%d\t%d\t%s\n", res.total_edits(), res.ref_len,
                format_hter(hter(res)).c_str());
  }
  return kExitOk;
}

int run_align(const std::string& bitext_path, int iters,
              const std::string& heuristic) {
  const auto pairs = read_parallel_tsv(bitext_path);
  std::vector<std::pair<TokenSeq, TokenSeq>> bitext, reversed;
  for (const auto& [src, tgt] : pairs) {
    bitext.emplace_back(tokenize(src), tokenize(tgt));
    reversed.emplace_back(bitext.back().second, bitext.back().first);
  }
  AlignerConfig acfg;
  acfg.iterations = iters;
  const SymHeuristic sym = sym_heuristic_from_string(heuristic);
  const AlignmentModel fwd = em_train(bitext, acfg);
  const AlignmentModel rev = em_train(reversed, acfg);
  for (const auto& [src, tgt] : bitext) {
    const Alignment a_f = viterbi_align(fwd, src, tgt);
    const Alignment a_r = viterbi_align(rev, tgt, src);
    std::printf("%s\n", to_pharaoh(symmetrize(a_f, transpose(a_r), sym)).c_str());
  }
  return kExitOk;
}

int run_cache(const std::string& path, const std::string& action) {
  if (action == "stats") {
    std::uintmax_t bytes = 0;
    std::size_t entries = 0;
    if (fs::exists(path)) {
      bytes = fs::file_size(path);
      TranslationCache cache(path);
      entries = cache.size();
    }
    std::printf("entries\t%zu\nbytes\t%ju\n", entries, bytes);
    return kExitOk;
  }
  // clear
  std::error_code ec;
  fs::remove(path, ec);
  if (ec) throw IoError("cannot remove cache file: " + path);
  log_line("cleared " + path);
  return kExitOk;
}

void handle_sigint(int) { request_cancel(); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);

  CLI::App app{"pseudo quality-estimation dataset builder"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  BuildArgs build_args;
  CLI::App* build = app.add_subcommand(
      "build", "Generate a QE dataset from a monolingual or parallel corpus");
  add_build_options(build, build_args);

  std::string ter_hyp, ter_ref;
  bool ter_no_shifts = false;
  CLI::App* ter_cmd = app.add_subcommand("ter", "Score two token-aligned files");
  ter_cmd->add_option("--hyp", ter_hyp, "Hypothesis file")->required();
  ter_cmd->add_option("--ref", ter_ref, "Reference file")->required();
  ter_cmd->add_flag("--no-shifts", ter_no_shifts, "Plain edit distance, no block moves");

  std::string align_bitext, align_heuristic = "gdfa";
  int align_iters = 5;
  CLI::App* align_cmd =
      app.add_subcommand("align", "Train and print word alignments for a TSV bitext");
  align_cmd->add_option("--bitext", align_bitext, "Two-column TSV")->required();
  align_cmd->add_option("--iters", align_iters, "EM iterations")
      ->check(CLI::NonNegativeNumber);
  align_cmd->add_option("--heuristic", align_heuristic, "Symmetrization")
      ->check(CLI::IsMember({"gdfa", "grow-diag-final-and", "intersection", "union"}));

  std::string cache_path, cache_action;
  CLI::App* cache_cmd = app.add_subcommand("cache", "Inspect or clear a translation cache");
  cache_cmd->add_option("--path", cache_path, "Cache file")->required();
  cache_cmd->add_option("action", cache_action, "stats or clear")
      ->check(CLI::IsMember({"stats", "clear"}))
      ->required();

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 vector parse order
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "pseudoqe: %s\n", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    std::fprintf(stderr, "pseudoqe: %s\n", e.what());
    return kExitIo;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "pseudoqe: %s\n", e.what());
    return kExitUsage;
  }

  try {
    if (*build) return run_build(build_args);
    if (*ter_cmd) return run_ter(ter_hyp, ter_ref, !ter_no_shifts);
    if (*align_cmd) return run_align(align_bitext, align_iters, align_heuristic);
    if (*cache_cmd) return run_cache(cache_path, cache_action);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "pseudoqe: %s\n", e.what());
    return kExitUsage;
  } catch (const BackendError& e) {
    std::fprintf(stderr, "pseudoqe: backend failure: %s\n", e.what());
    return kExitBackend;
  } catch (const InvalidCorpusError& e) {
    std::fprintf(stderr, "pseudoqe: invalid corpus: %s\n", e.what());
    return kExitCorpus;
  } catch (const EncodingError& e) {
    std::fprintf(stderr, "pseudoqe: invalid corpus: %s\n", e.what());
    return kExitCorpus;
  } catch (const NoTrainableDataError& e) {
    std::fprintf(stderr, "pseudoqe: invalid corpus: %s\n", e.what());
    return kExitCorpus;
  } catch (const CacheCorruptError& e) {
    std::fprintf(stderr, "pseudoqe: %s\n", e.what());
    return kExitIo;
  } catch (const IoError& e) {
    std::fprintf(stderr, "pseudoqe: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pseudoqe: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
