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

#include "eiv/io.hpp"

#include <cstring>
#include <fstream>

namespace eiv {

namespace {

constexpr char kMagic[4] = {'E', 'I', 'V', 'B'};

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(b), 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(b), 8);
}

uint32_t get_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw FormatError("truncated header in " + path);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t get_u64(std::istream& is, const std::string& path) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8))
    throw FormatError("truncated header in " + path);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_blob(const std::string& path, const Blob& blob) {
  if (blob.kind.empty() || blob.kind.size() > 4)
    throw InputError("blob kind must be 1..4 characters, got '" + blob.kind + "'");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kMagic, 4);
  put_u32(os, kFormatVersion);
  char kind[4] = {0, 0, 0, 0};
  std::memcpy(kind, blob.kind.data(), blob.kind.size());
  os.write(kind, 4);
  put_u32(os, static_cast<uint32_t>(blob.blocks.size()));
  for (const Matrix& m : blob.blocks) {
    put_u64(os, static_cast<uint64_t>(m.rows()));
    put_u64(os, static_cast<uint64_t>(m.cols()));
    // Row-major payload; Eigen stores column-major, so stage through a
    // row-major copy.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    os.write(reinterpret_cast<const char*>(rm.data()),
             static_cast<std::streamsize>(sizeof(double) * rm.size()));
  }
  if (!os) throw IoError("write failed: " + path);
}

Blob read_blob(const std::string& path, const std::string& expected_kind) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic in " + path);
  uint32_t version = get_u32(is, path);
  if (version != kFormatVersion)
    throw FormatError("unsupported format version " + std::to_string(version) +
                      " in " + path);
  char kind[5] = {0, 0, 0, 0, 0};
  if (!is.read(kind, 4)) throw FormatError("truncated header in " + path);
  Blob blob;
  blob.kind = kind;
  if (!expected_kind.empty() && blob.kind != expected_kind)
    throw FormatError("expected kind '" + expected_kind + "' but found '" +
                      blob.kind + "' in " + path);
  uint32_t nblocks = get_u32(is, path);
  blob.blocks.reserve(nblocks);
  for (uint32_t b = 0; b < nblocks; ++b) {
    uint64_t rows = get_u64(is, path);
    uint64_t cols = get_u64(is, path);
    if (rows > (1ULL << 32) || cols > (1ULL << 32))
      throw FormatError("implausible shape in " + path);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
        static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (!is.read(reinterpret_cast<char*>(rm.data()),
                 static_cast<std::streamsize>(sizeof(double) * rm.size())))
      throw FormatError("payload shorter than shape header in " + path);
    blob.blocks.emplace_back(rm);
  }
  // Payload must match the shape headers exactly: no trailing bytes.
  char extra;
  if (is.read(&extra, 1))
    throw FormatError("payload longer than shape header in " + path);
  return blob;
}

void write_matrix(const std::string& path, const Matrix& m) {
  write_blob(path, Blob{"MAT", {m}});
}

Matrix read_matrix(const std::string& path) {
  Blob blob = read_blob(path, "MAT");
  if (blob.blocks.size() != 1)
    throw FormatError("expected a single matrix block in " + path);
  return blob.blocks[0];
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  for (const auto& line : lines) os << line << "\n";
  if (!os) throw IoError("write failed: " + path);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace eiv
