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

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "pseudoqe/error.hpp"
#include "pseudoqe/mtbackend.hpp"

namespace pseudoqe {

namespace fs = std::filesystem;
using nlohmann::json;

TranslationCache::TranslationCache() = default;

TranslationCache::TranslationCache(std::string path) : path_(std::move(path)) {
  load();
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw IoError("cannot open cache file for append: " + path_);
}

TranslationCache::~TranslationCache() = default;

void TranslationCache::load() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) {
    if (fs::exists(path_)) throw IoError("cannot read cache file: " + path_);
    return;  // fresh cache
  }
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::size_t offset = 0;
  std::size_t good_end = 0;
  while (offset < content.size()) {
    const std::size_t nl = content.find('\n', offset);
    const bool complete = nl != std::string::npos;
    const std::string_view line(content.data() + offset,
                                (complete ? nl : content.size()) - offset);
    if (line.empty() && complete) {  // tolerate stray blank lines
      offset = nl + 1;
      good_end = offset;
      continue;
    }
    bool ok = complete;
    if (ok) {
      json rec = json::parse(line, nullptr, false);
      ok = !rec.is_discarded() && rec.is_object() && rec.contains("key") &&
           rec.contains("value") && rec["key"].is_string() &&
           rec["value"].is_string();
      if (ok) entries_[rec["key"].get<std::string>()] = rec["value"].get<std::string>();
    }
    if (!ok) {
      const bool trailing = !complete || nl + 1 >= content.size();
      if (trailing) {
        std::fprintf(stderr,
                     "pseudoqe: truncating corrupt trailing cache record at "
                     "byte %zu of %s\n",
                     offset, path_.c_str());
        fs::resize_file(path_, offset);
        return;
      }
      throw CacheCorruptError(
          "corrupt cache record at byte " + std::to_string(offset) + " of " + path_,
          offset);
    }
    offset = nl + 1;
    good_end = offset;
  }
  (void)good_end;
}

std::optional<std::string> TranslationCache::get(const std::string& key) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  hits_.fetch_add(1);
  return it->second;
}

void TranslationCache::put(const std::string& key, const std::string& value) {
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = entries_.emplace(key, value);
  if (!inserted) {
    if (it->second == value) return;  // nothing new to record
    it->second = value;
  }
  if (out_.is_open()) {
    json rec;
    rec["key"] = key;
    rec["value"] = value;
    rec["created_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
    out_ << rec.dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("cache append failed: " + path_);
  }
}

std::size_t TranslationCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::string cache_key(std::string_view engine_id, std::string_view src_lang,
                      std::string_view tgt_lang,
                      std::string_view normalized_text) {
  std::string material;
  material.reserve(engine_id.size() + src_lang.size() + tgt_lang.size() +
                   normalized_text.size() + 3);
  material.append(engine_id).push_back('\x1f');
  material.append(src_lang).push_back('\x1f');
  material.append(tgt_lang).push_back('\x1f');
  material.append(normalized_text);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  if (EVP_Digest(material.data(), material.size(), digest, &digest_len,
                 EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");

  static const char* hex = "0123456789abcdef";
  std::string out(digest_len * 2, '0');
  for (unsigned int i = 0; i < digest_len; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace pseudoqe
