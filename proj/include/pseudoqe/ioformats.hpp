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

#ifndef PSEUDOQE_IOFORMATS_HPP
#define PSEUDOQE_IOFORMATS_HPP

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "pseudoqe/pipeline.hpp"

namespace pseudoqe {

// One sentence per line, UTF-8, CRLF tolerated, no phantom sentence for a
// trailing newline.
std::vector<std::string> read_mono(const std::string& path);

// Two line-parallel files; counts must match.
std::vector<std::pair<std::string, std::string>> read_parallel(
    const std::string& src_path, const std::string& tgt_path);

// One file, exactly one tab per line.
std::vector<std::pair<std::string, std::string>> read_parallel_tsv(
    const std::string& path);

struct WmtFileSet {
  std::string src, mt, pe, hter, tags, source_tags;
  static WmtFileSet at(const std::string& out_dir, const std::string& prefix);
  std::vector<std::string> all() const;
};

// The six line-parallel dataset files: <prefix>.src/.mt/.pe/.hter/.tags/
// .source_tags. Refuses to clobber existing files unless overwrite is set.
void write_wmt(const std::vector<QeRecord>& records, const std::string& out_dir,
               const std::string& prefix, bool overwrite = false);

// Inverse of write_wmt (meta is not stored in the WMT files).
std::vector<QeRecord> read_wmt(const std::string& out_dir,
                               const std::string& prefix);

void write_jsonl(const std::vector<QeRecord>& records, const std::string& path,
                 bool overwrite = false);
std::vector<QeRecord> read_jsonl(const std::string& path);

// Fixed six-fractional-digit rendering used by the .hter file.
std::string format_hter(double value);

// Everything needed to reproduce a run: tool version, full configuration
// (flag-named keys, so the manifest feeds back through `build --config`),
// and the run statistics.
nlohmann::ordered_json manifest_json(const PipelineConfig& config,
                                     const TranslatorConfig& translator,
                                     const RunStats& stats,
                                     const std::string& prefix,
                                     const std::string& format);
void write_manifest(const nlohmann::ordered_json& manifest,
                    const std::string& path);

}  // namespace pseudoqe

#endif  // PSEUDOQE_IOFORMATS_HPP
