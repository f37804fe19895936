// Copyright 2026  EIV Toolkit Authors
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

#ifndef EIV_IO_HPP
#define EIV_IO_HPP

#include "eiv/common.hpp"

#include <string>
#include <vector>

namespace eiv {

// On-disk container for every binary artifact the toolkit produces.
//
//   magic   "EIVB" (4 bytes)
//   version u32 little-endian (current: 1)
//   kind    4 bytes, NUL-padded ("UBM", "TV", "LDA", "WCCN", "EINV" for
//           models; "MAT" for plain matrices; "STAT" for Baum-Welch stats)
//   nblocks u32
//   per block: u64 rows, u64 cols, rows*cols doubles (little-endian,
//              row-major)
//
// Readers validate magic, version, kind, and that the payload length matches
// the shape headers exactly; any mismatch raises FormatError.

inline constexpr uint32_t kFormatVersion = 1;

struct Blob {
  std::string kind;
  std::vector<Matrix> blocks;
};

void write_blob(const std::string& path, const Blob& blob);

/// Reads a blob, checking magic and version.  If expected_kind is non-empty
/// the kind tag must match.
Blob read_blob(const std::string& path, const std::string& expected_kind = "");

/// Single-matrix convenience wrappers over kind "MAT".
void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(const std::string& path);

/// Text sidecars (one entry per line, e.g. utterance id lists).
void write_lines(const std::string& path, const std::vector<std::string>& lines);
std::vector<std::string> read_lines(const std::string& path);

}  // namespace eiv

#endif  // EIV_IO_HPP
