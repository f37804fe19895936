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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "eiv/common.hpp"
#include "eiv/io.hpp"
#include "eiv/wav.hpp"
#include "test_util.hpp"

using namespace eiv;
using eivtest::TempDir;

TEST_CASE("rng: same seed gives identical streams") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("rng: different seeds give different streams") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("rng: uniform stays in [0,1) and has the right mean") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  // mean 0.5, stderr = 1/sqrt(12 n) ~ 9e-4; allow 5 sigma
  CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("rng: uniform_int covers the whole inclusive range") {
  Rng rng(11);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    const int v = rng.uniform_int(3, 7);
    CHECK(v >= 3);
    CHECK(v <= 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("rng: gaussian moments") {
  Rng rng(42);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  // var of sample variance of a Gaussian ~ 2/n
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("rng: shuffle is a permutation and is seed-deterministic") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  std::vector<int> w = v;

  Rng a(99);
  a.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);

  Rng b(99);
  b.shuffle(w);
  CHECK(v == w);
}

TEST_CASE("rng: sample_without_replacement gives k distinct in-range values") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto picks = rng.sample_without_replacement(10, 4);
    CHECK(picks.size() == 4);
    std::set<int> uniq(picks.begin(), picks.end());
    CHECK(uniq.size() == 4);
    for (int p : picks) {
      CHECK(p >= 0);
      CHECK(p < 10);
    }
  }
  // k = n must enumerate everything
  const auto all = rng.sample_without_replacement(6, 6);
  std::set<int> uniq(all.begin(), all.end());
  CHECK(uniq.size() == 6);
}

TEST_CASE("derive_seed: distinct tags and roots decorrelate") {
  const uint64_t a = derive_seed(1, "ubm");
  const uint64_t b = derive_seed(1, "tv");
  const uint64_t c = derive_seed(2, "ubm");
  CHECK(a != b);
  CHECK(a != c);
  CHECK(derive_seed(1, "ubm") == a);
}

TEST_CASE("round_decimals: half-up at one decimal") {
  // The two corpus-average cases the reports must reproduce.
  const double avg1 = (93.8 + 85.8 + 85.2 + 86.6) / 4.0;
  CHECK(round_decimals(avg1, 1) == doctest::Approx(87.9).epsilon(1e-12));
  const double avg2 = (92.9 + 82.6 + 69.2 + 82.2) / 4.0;
  CHECK(round_decimals(avg2, 1) == doctest::Approx(81.7).epsilon(1e-12));

  CHECK(round_decimals(0.05, 1) == doctest::Approx(0.1));
  CHECK(round_decimals(2.349, 2) == doctest::Approx(2.35));
  CHECK(round_decimals(100.0, 1) == doctest::Approx(100.0));
}

TEST_CASE("format_accuracy: one decimal strings") {
  CHECK(format_accuracy((93.8 + 85.8 + 85.2 + 86.6) / 4.0) == "87.9");
  CHECK(format_accuracy((92.9 + 82.6 + 69.2 + 82.2) / 4.0) == "81.7");
  CHECK(format_accuracy(100.0) == "100.0");
  CHECK(format_accuracy(0.0) == "0.0");
  CHECK(format_accuracy(50.0) == "50.0");
}

TEST_CASE("io: blob round trip preserves kind, shapes, and bytes") {
  TempDir tmp("io");
  Blob blob;
  blob.kind = "TV";
  Rng rng(3);
  Matrix m1(4, 7), m2(1, 3);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 7; ++c) m1(r, c) = rng.gaussian();
  for (int c = 0; c < 3; ++c) m2(0, c) = rng.gaussian();
  blob.blocks = {m1, m2};

  const std::string path = tmp.file("x.eivb");
  write_blob(path, blob);
  const Blob back = read_blob(path, "TV");
  REQUIRE(back.blocks.size() == 2);
  CHECK(back.kind == "TV");
  CHECK((back.blocks[0] - m1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.blocks[1] - m2).cwiseAbs().maxCoeff() == 0.0);

  // identical input -> identical bytes (determinism of the writer)
  const std::string path2 = tmp.file("y.eivb");
  write_blob(path2, blob);
  CHECK(eivtest::slurp(path) == eivtest::slurp(path2));
}

TEST_CASE("io: wrong kind, bad magic, bad version, truncation all rejected") {
  TempDir tmp("io_bad");
  Blob blob;
  blob.kind = "UBM";
  blob.blocks = {Matrix::Ones(2, 2)};
  const std::string path = tmp.file("m.eivb");
  write_blob(path, blob);

  CHECK_THROWS_AS(read_blob(path, "TV"), FormatError);

  std::string bytes = eivtest::slurp(path);
  {
    std::string bad = bytes;
    bad[0] = 'X';  // magic
    std::ofstream(tmp.file("bad1.eivb"), std::ios::binary) << bad;
    CHECK_THROWS_AS(read_blob(tmp.file("bad1.eivb"), "UBM"), FormatError);
  }
  {
    std::string bad = bytes;
    bad[4] = static_cast<char>(99);  // version little-endian low byte
    std::ofstream(tmp.file("bad2.eivb"), std::ios::binary) << bad;
    CHECK_THROWS_AS(read_blob(tmp.file("bad2.eivb"), "UBM"), FormatError);
  }
  {
    std::string bad = bytes.substr(0, bytes.size() - 5);  // truncated payload
    std::ofstream(tmp.file("bad3.eivb"), std::ios::binary) << bad;
    CHECK_THROWS_AS(read_blob(tmp.file("bad3.eivb"), "UBM"), FormatError);
  }
  {
    std::string bad = bytes + "zz";  // trailing junk
    std::ofstream(tmp.file("bad4.eivb"), std::ios::binary) << bad;
    CHECK_THROWS_AS(read_blob(tmp.file("bad4.eivb"), "UBM"), FormatError);
  }
  CHECK_THROWS_AS(read_blob(tmp.file("missing.eivb"), "UBM"), IoError);
}

TEST_CASE("io: matrix helper round trip") {
  TempDir tmp("io_mat");
  Matrix m(3, 2);
  m << 1.5, -2.25, 0.0, 1e-300, 3e15, -0.125;
  write_matrix(tmp.file("m.eivb"), m);
  const Matrix back = read_matrix(tmp.file("m.eivb"));
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("wav: 16-bit round trip within quantization error") {
  TempDir tmp("wav");
  AudioClip clip;
  clip.sample_rate = 8000;
  clip.id = "tone";
  clip.samples.resize(800);
  for (size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = 0.5 * std::sin(2.0 * M_PI * 440.0 * i / 8000.0);
  }
  const std::string path = tmp.file("tone.wav");
  write_wav(path, clip);
  const AudioClip back = read_wav(path);
  CHECK(back.sample_rate == 8000);
  CHECK(back.id == "tone");
  REQUIRE(back.samples.size() == clip.samples.size());
  double max_err = 0.0;
  for (size_t i = 0; i < clip.samples.size(); ++i) {
    max_err = std::max(max_err, std::abs(back.samples[i] - clip.samples[i]));
  }
  CHECK(max_err <= 1.0 / 32768.0 + 1e-12);
}

TEST_CASE("wav: garbage rejected") {
  TempDir tmp("wav_bad");
  std::ofstream(tmp.file("junk.wav"), std::ios::binary) << "not a wav at all";
  CHECK_THROWS_AS(read_wav(tmp.file("junk.wav")), FormatError);
  CHECK_THROWS_AS(read_wav(tmp.file("absent.wav")), IoError);
}
