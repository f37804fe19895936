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

#ifndef EIV_COMMON_HPP
#define EIV_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eiv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for all toolkit errors.  Subclasses map to distinct CLI exit
/// codes (see tools/).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid data fed to an operation (wrong shape, non-finite values, too few
/// frames, ...).
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

/// Bad configuration: unknown key, value of the wrong type, out-of-range
/// setting.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// A file could not be opened or read/written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// A file exists but its contents violate the on-disk format (bad magic,
/// unknown version, shape/payload mismatch, malformed manifest row).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

void log_info(const std::string& msg);
void log_warn(const std::string& msg);

/// Deterministic random source.  All transforms are implemented here rather
/// than with std:: distributions so that a given seed produces the same
/// stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {
    // splitmix64 warm-up so that nearby seeds decorrelate
    next_u64();
    next_u64();
  }

  uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi);

  /// Standard normal via Box-Muller (stateless variant, two uniforms per
  /// draw).
  double gaussian();

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices drawn from [0, n), in draw order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  uint64_t state_;
};

/// Stable per-stage seed derivation: mixes a root seed with a stage tag so
/// every pipeline stage gets an independent stream from one root seed.
uint64_t derive_seed(uint64_t root, std::string_view tag);

/// Round half-up at `decimals` places.  round_decimals(87.85, 1) == 87.9.
double round_decimals(double x, int decimals);

/// Formats a double the way reports print accuracies (one decimal, half-up).
std::string format_accuracy(double percent);

}  // namespace eiv

#endif  // EIV_COMMON_HPP
