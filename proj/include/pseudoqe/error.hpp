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

#ifndef PSEUDOQE_ERROR_HPP
#define PSEUDOQE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pseudoqe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text is not valid UTF-8.
class EncodingError : public Error {
 public:
  using Error::Error;
};

// File system problem: unreadable input, unwritable output, lock conflicts.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed corpus: line-count mismatch, bad TSV, degenerate line in strict mode.
class InvalidCorpusError : public Error {
 public:
  using Error::Error;
};

// Translation backend failure. retryable() distinguishes transient transport /
// throttling errors from rejected requests (4xx other than 429).
class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool retryable)
      : Error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

// Cache file is unreadable past the given byte offset (non-trailing damage).
class CacheCorruptError : public Error {
 public:
  CacheCorruptError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Every training pair was filtered out.
class NoTrainableDataError : public Error {
 public:
  using Error::Error;
};

// An edit script violates its contract (unexpected shift, coverage gap,
// tag length mismatch).
class ScriptError : public Error {
 public:
  using Error::Error;
};

// Alignment links out of range or alignments over mismatched sentence pairs.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Bad configuration value (unknown engine, bad key=value file, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pseudoqe

#endif  // PSEUDOQE_ERROR_HPP
