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

#include "eiv/common.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

namespace eiv {

void log_info(const std::string& msg) { std::cerr << "INFO: " << msg << "\n"; }

void log_warn(const std::string& msg) { std::cerr << "WARN: " << msg << "\n"; }

uint64_t Rng::next_u64() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int64_t>(next_u64() % span);
}

double Rng::gaussian() {
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;  // keep log() finite
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  // Partial Fisher-Yates over an index array.
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) {
    int j = static_cast<int>(uniform_int(i, n - 1));
    std::swap(idx[i], idx[j]);
    out[i] = idx[i];
  }
  return out;
}

uint64_t derive_seed(uint64_t root, std::string_view tag) {
  // FNV-1a over the tag, then mixed with the root through splitmix64.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  Rng mixer(root ^ h);
  return mixer.next_u64();
}

double round_decimals(double x, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::floor(x * scale + 0.5) / scale;
}

std::string format_accuracy(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", round_decimals(percent, 1));
  return buf;
}

}  // namespace eiv
