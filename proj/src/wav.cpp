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

#include "eiv/wav.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace eiv {

namespace {

uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<char*>(b), 4);
}

void wr_u16(std::ostream& os, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 44 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t data_off = 0, data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char* hdr = data.data() + pos;
    uint32_t chunk_len = rd_u32(hdr + 4);
    if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_len >= 16) {
      const unsigned char* f = hdr + 8;
      format = rd_u16(f);
      channels = rd_u16(f + 2);
      sample_rate = rd_u32(f + 4);
      bits = rd_u16(f + 14);
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data_off = pos + 8;
      data_len = std::min<size_t>(chunk_len, data.size() - data_off);
    }
    pos += 8 + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }
  if (sample_rate == 0 || data_off == 0)
    throw FormatError("missing fmt/data chunk: " + path);
  if (channels != 1)
    throw FormatError("only mono WAV is supported (" + std::to_string(channels) +
                      " channels): " + path);

  AudioClip clip;
  clip.sample_rate = static_cast<int>(sample_rate);
  clip.id = std::filesystem::path(path).stem().string();
  const unsigned char* d = data.data() + data_off;
  if (format == 1 && bits == 16) {
    size_t n = data_len / 2;
    clip.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t s = static_cast<int16_t>(d[2 * i] | (d[2 * i + 1] << 8));
      clip.samples[i] = s / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    size_t n = data_len / 4;
    clip.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = rd_u32(d + 4 * i);
      float v;
      std::memcpy(&v, &u, 4);
      clip.samples[i] = v;
    }
  } else {
    throw FormatError("unsupported WAV encoding (format " + std::to_string(format) +
                      ", " + std::to_string(bits) + " bits): " + path);
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  uint32_t n = static_cast<uint32_t>(clip.samples.size());
  uint32_t data_len = 2 * n;
  os.write("RIFF", 4);
  wr_u32(os, 36 + data_len);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  wr_u32(os, 16);
  wr_u16(os, 1);  // PCM
  wr_u16(os, 1);  // mono
  wr_u32(os, static_cast<uint32_t>(clip.sample_rate));
  wr_u32(os, static_cast<uint32_t>(clip.sample_rate) * 2);
  wr_u16(os, 2);
  wr_u16(os, 16);
  os.write("data", 4);
  wr_u32(os, data_len);
  for (double s : clip.samples) {
    double c = std::clamp(s, -1.0, 1.0);
    int16_t v = static_cast<int16_t>(std::lround(c * 32767.0));
    wr_u16(os, static_cast<uint16_t>(v));
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace eiv
