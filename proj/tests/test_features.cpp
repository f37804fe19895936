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

#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "eiv/common.hpp"
#include "eiv/features.hpp"
#include "test_util.hpp"

using namespace eiv;
using eivtest::TempDir;

namespace {

AudioClip sine_clip(double freq_hz, double amp, double seconds, int rate,
                    const std::string& id) {
  AudioClip clip;
  clip.sample_rate = rate;
  clip.id = id;
  const int n = static_cast<int>(seconds * rate);
  clip.samples.resize(n);
  for (int t = 0; t < n; ++t)
    clip.samples[t] = amp * std::sin(2.0 * M_PI * freq_hz * t / rate);
  return clip;
}

AudioClip noise_clip(double amp, int n, int rate, uint64_t seed,
                     const std::string& id) {
  AudioClip clip;
  clip.sample_rate = rate;
  clip.id = id;
  Rng rng(seed);
  clip.samples.resize(n);
  for (int t = 0; t < n; ++t) clip.samples[t] = amp * rng.gaussian();
  return clip;
}

double test_hz_to_mel(double hz) {
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double test_mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// O(n^2) reference: mel filterbank energies for one frame, computed from
// scratch (pre-emphasis, Hamming window, direct DFT, triangular filters).
std::vector<double> oracle_fbank_frame(const AudioClip& clip,
                                       const FeatureConfig& cfg,
                                       int64_t frame_index) {
  const int rate = clip.sample_rate;
  const int64_t flen =
      static_cast<int64_t>(cfg.frame_len_ms * rate / 1000.0 + 0.5);
  const int64_t fshift =
      static_cast<int64_t>(cfg.frame_shift_ms * rate / 1000.0 + 0.5);
  int n_fft = 1;
  while (n_fft < flen) n_fft <<= 1;
  const int n_bins = n_fft / 2 + 1;

  std::vector<double> emph(clip.samples.size());
  emph[0] = clip.samples[0];
  for (size_t t = 1; t < clip.samples.size(); ++t)
    emph[t] = clip.samples[t] - cfg.preemphasis * clip.samples[t - 1];

  const int64_t start = frame_index * fshift;
  std::vector<double> buf(n_fft, 0.0);
  for (int64_t i = 0; i < flen; ++i) {
    const double w = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (flen - 1));
    buf[i] = emph[start + i] * w;
  }

  std::vector<double> power(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < n_fft; ++i) {
      const double phase = -2.0 * M_PI * b * i / n_fft;
      acc += buf[i] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    power[b] = std::norm(acc);
  }

  const double mel_hi = test_hz_to_mel(rate / 2.0);
  const int M = cfg.n_mel_filters;
  std::vector<double> energies(M, 0.0);
  for (int b = 0; b < n_bins; ++b) {
    const double mel = test_hz_to_mel(static_cast<double>(b) * rate / n_fft);
    for (int i = 1; i <= M; ++i) {
      const double left = (i - 1) * mel_hi / (M + 1);
      const double center = i * mel_hi / (M + 1);
      const double right = (i + 1) * mel_hi / (M + 1);
      double w = 0.0;
      if (mel >= left && mel <= center)
        w = (mel - left) / (center - left);
      else if (mel > center && mel <= right)
        w = (right - mel) / (right - center);
      energies[i - 1] += w * power[b];
    }
  }
  return energies;
}

}  // namespace

TEST_CASE("frame_count: closed form matches a counting loop") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int64_t flen = rng.uniform_int(1, 500);
    const int64_t fshift = rng.uniform_int(1, flen);
    const int64_t n = rng.uniform_int(0, 5000);
    int64_t expected = 0;
    while (expected * fshift + flen <= n) ++expected;
    CHECK(frame_count(n, flen, fshift) == expected);
  }
}

TEST_CASE("frame_count: one second at 16 kHz with 20/10 ms frames gives 99") {
  CHECK(frame_count(16000, 320, 160) == 99);
  // one sample short of the last full frame
  CHECK(frame_count(16000 - 161, 320, 160) == 97);
  CHECK(frame_count(319, 320, 160) == 0);
}

TEST_CASE("compute_fbank: silence hits the energy floor with zero filter output") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.id = "silence";
  clip.samples.assign(16000, 0.0);
  FeatureConfig cfg;
  FbankResult fbank = compute_fbank(clip, cfg);
  REQUIRE(fbank.energies.rows() == 99);
  CHECK(fbank.energies.cols() == cfg.n_mel_filters);
  for (Eigen::Index t = 0; t < fbank.energies.rows(); ++t) {
    CHECK(fbank.log_energy[static_cast<size_t>(t)] ==
          doctest::Approx(std::log(kLogFloorEnergy)).epsilon(1e-12));
    CHECK(fbank.energies.row(t).cwiseAbs().maxCoeff() == 0.0);
  }
  FeatureMatrix f = compute_mfcc(clip, cfg);
  // c0 carries the floored frame log energy
  CHECK(f.frames(0, 0) == doctest::Approx(std::log(kLogFloorEnergy)).epsilon(1e-12));
}

TEST_CASE("compute_fbank: matches a direct-DFT reference on a 1 kHz tone") {
  AudioClip clip = sine_clip(1000.0, 0.6, 1.0, 16000, "sine1k");
  FeatureConfig cfg;
  FbankResult fbank = compute_fbank(clip, cfg);
  REQUIRE(fbank.energies.rows() == 99);

  for (int64_t t : {int64_t{0}, int64_t{7}, int64_t{50}, int64_t{98}}) {
    std::vector<double> expected = oracle_fbank_frame(clip, cfg, t);
    for (int m = 0; m < cfg.n_mel_filters; ++m) {
      const double got = fbank.energies(t, m);
      const double want = expected[static_cast<size_t>(m)];
      CHECK(std::abs(got - want) <=
            1e-9 * std::max({1.0, std::abs(got), std::abs(want)}));
    }
  }

  // raw (un-pre-emphasized) frame energy drives log_energy
  for (int64_t t : {int64_t{0}, int64_t{50}}) {
    double raw = 0.0;
    for (int64_t i = 0; i < 320; ++i) {
      const double s = clip.samples[static_cast<size_t>(t * 160 + i)];
      raw += s * s;
    }
    CHECK(fbank.log_energy[static_cast<size_t>(t)] ==
          doctest::Approx(std::log(raw)).epsilon(1e-12));
  }
}

TEST_CASE("compute_fbank: energy concentrates in the filter nearest the tone") {
  FeatureConfig cfg;
  AudioClip clip = sine_clip(1000.0, 0.5, 0.5, 16000, "sine1k-peak");
  FbankResult fbank = compute_fbank(clip, cfg);
  std::vector<double> centers = mel_filter_centers_hz(cfg, clip.sample_rate);

  int nearest = 0;
  for (int m = 1; m < cfg.n_mel_filters; ++m)
    if (std::abs(centers[static_cast<size_t>(m)] - 1000.0) <
        std::abs(centers[static_cast<size_t>(nearest)] - 1000.0))
      nearest = m;

  Eigen::Index argmax = 0;
  fbank.energies.colwise().sum().maxCoeff(&argmax);
  CHECK(std::abs(static_cast<int>(argmax) - nearest) <= 1);
}

TEST_CASE("mel_filter_centers_hz: evenly spaced on the mel scale") {
  FeatureConfig cfg;
  std::vector<double> centers = mel_filter_centers_hz(cfg, 16000);
  REQUIRE(static_cast<int>(centers.size()) == cfg.n_mel_filters);
  const double mel_hi = test_hz_to_mel(8000.0);
  const double step = mel_hi / (cfg.n_mel_filters + 1);
  for (int i = 0; i < cfg.n_mel_filters; ++i) {
    const double c = centers[static_cast<size_t>(i)];
    CHECK(c > 0.0);
    CHECK(c < 8000.0);
    CHECK(test_hz_to_mel(c) == doctest::Approx((i + 1) * step).epsilon(1e-10));
    CHECK(c == doctest::Approx(test_mel_to_hz((i + 1) * step)).epsilon(1e-10));
  }
}

TEST_CASE("compute_mfcc: cepstra equal an orthonormal DCT-II of log energies") {
  AudioClip clip = sine_clip(440.0, 0.4, 0.3, 16000, "sine440");
  FeatureConfig cfg;
  FbankResult fbank = compute_fbank(clip, cfg);
  FeatureMatrix f = compute_mfcc(clip, cfg);
  REQUIRE(f.num_frames() == fbank.energies.rows());
  REQUIRE(f.dim() == 3 * cfg.n_cepstra);

  const int M = cfg.n_mel_filters;
  for (int64_t t : {int64_t{0}, int64_t{13}}) {
    for (int k = 1; k < cfg.n_cepstra; ++k) {
      double acc = 0.0;
      for (int m = 0; m < M; ++m) {
        const double e = std::max(fbank.energies(t, m), kLogFloorEnergy);
        acc += std::sqrt(2.0 / M) *
               std::cos(M_PI * k * (2.0 * m + 1.0) / (2.0 * M)) * std::log(e);
      }
      CHECK(f.frames(t, k) == doctest::Approx(acc).epsilon(1e-10));
    }
    CHECK(f.frames(t, 0) ==
          doctest::Approx(fbank.log_energy[static_cast<size_t>(t)]).epsilon(1e-12));
  }
  // delta/delta-delta slots start zero-filled, mask starts all voiced
  CHECK(f.frames.rightCols(2 * cfg.n_cepstra).cwiseAbs().maxCoeff() == 0.0);
  for (uint8_t v : f.vad_mask) CHECK(v == 1);
}

TEST_CASE("append_deltas: linear ramp has slope deltas and zero delta-deltas") {
  FeatureConfig cfg;
  const int K = cfg.n_cepstra;
  const int W = cfg.delta_window;
  const Eigen::Index T = 40;

  FeatureMatrix f;
  f.utterance_id = "ramp";
  f.frames = Matrix::Zero(T, cfg.feature_dim());
  f.vad_mask.assign(static_cast<size_t>(T), 1);
  const double slope3 = 0.7, slope5 = -1.3;
  for (Eigen::Index t = 0; t < T; ++t) {
    f.frames(t, 3) = slope3 * static_cast<double>(t) + 2.0;
    f.frames(t, 5) = slope5 * static_cast<double>(t) - 4.0;
  }

  FeatureMatrix g = append_deltas(f, cfg);
  for (Eigen::Index t = W; t < T - W; ++t) {
    CHECK(g.frames(t, K + 3) == doctest::Approx(slope3).epsilon(1e-12));
    CHECK(g.frames(t, K + 5) == doctest::Approx(slope5).epsilon(1e-12));
  }
  for (Eigen::Index t = 2 * W; t < T - 2 * W; ++t) {
    CHECK(std::abs(g.frames(t, 2 * K + 3)) < 1e-12);
    CHECK(std::abs(g.frames(t, 2 * K + 5)) < 1e-12);
  }
  // edge replication halves the regression at the first frame:
  // sum n*(x_n - x_0) / sum 2n^2 = slope * sum n^2 / sum 2n^2
  CHECK(g.frames(0, K + 3) == doctest::Approx(slope3 / 2.0).epsilon(1e-12));
  CHECK(g.frames(T - 1, K + 5) == doctest::Approx(slope5 / 2.0).epsilon(1e-12));
  // base columns untouched
  CHECK(g.frames.leftCols(K) == f.frames.leftCols(K));
}

TEST_CASE("append_deltas: constant signal has zero deltas everywhere") {
  FeatureConfig cfg;
  FeatureMatrix f;
  f.utterance_id = "const";
  f.frames = Matrix::Zero(12, cfg.feature_dim());
  f.frames.leftCols(cfg.n_cepstra).setConstant(3.25);
  f.vad_mask.assign(12, 1);
  FeatureMatrix g = append_deltas(f, cfg);
  CHECK(g.frames.rightCols(2 * cfg.n_cepstra).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("append_deltas: rejects a dim mismatch") {
  FeatureConfig cfg;
  FeatureMatrix f;
  f.frames = Matrix::Zero(5, 7);
  f.vad_mask.assign(5, 1);
  CHECK_THROWS_AS(append_deltas(f, cfg), InputError);
}

TEST_CASE("energy_vad: threshold sits exactly dynamic_range_db below the max") {
  FeatureConfig cfg;
  cfg.vad_dynamic_range_db = 30.0;
  const double drop = 30.0 * std::log(10.0) / 10.0;  // 30 dB in log-power units

  FeatureMatrix f;
  f.utterance_id = "vad";
  f.frames = Matrix::Zero(4, cfg.feature_dim());
  f.frames(0, 0) = 1.0;              // the max
  f.frames(1, 0) = 1.0 - drop;       // exactly at threshold: voiced
  f.frames(2, 0) = 1.0 - drop - 1e-9;  // just below: unvoiced
  f.frames(3, 0) = 1.0 - drop + 1e-9;  // just above: voiced
  f.vad_mask.assign(4, 1);

  FeatureMatrix g = energy_vad(f, cfg);
  CHECK(g.vad_mask == std::vector<uint8_t>{1, 1, 0, 1});
}

TEST_CASE("energy_vad: separates a tone from near-silence in a real clip") {
  // 0.5 s of a loud tone followed by 0.5 s of -80 dB noise
  AudioClip clip = sine_clip(500.0, 0.5, 1.0, 16000, "half");
  for (size_t t = 8000; t < clip.samples.size(); ++t)
    clip.samples[t] = 1e-4 * std::sin(0.001 * static_cast<double>(t));
  FeatureConfig cfg;  // 30 dB dynamic range
  FeatureMatrix f = energy_vad(append_deltas(compute_mfcc(clip, cfg), cfg), cfg);

  // frames fully inside the loud half are voiced, fully inside the quiet half not
  int64_t voiced_early = 0, voiced_late = 0;
  for (int64_t t = 0; t < 48; ++t) voiced_early += f.vad_mask[static_cast<size_t>(t)];
  for (int64_t t = 51; t < 99; ++t) voiced_late += f.vad_mask[static_cast<size_t>(t)];
  CHECK(voiced_early == 48);
  CHECK(voiced_late == 0);

  FeatureMatrix c = cmvn(f);
  int64_t voiced_total = 0;
  for (uint8_t v : f.vad_mask) voiced_total += v;
  CHECK(c.num_frames() == voiced_total);
}

TEST_CASE("cmvn: output is zero-mean unit-variance and idempotent") {
  AudioClip clip = noise_clip(0.1, 8000, 16000, 99, "noise");
  FeatureConfig cfg;
  FeatureMatrix f = append_deltas(compute_mfcc(clip, cfg), cfg);
  f = energy_vad(f, cfg);
  FeatureMatrix c = cmvn(f);

  Vector mean = c.frames.colwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-10);
  Vector var = (c.frames.rowwise() - mean.transpose()).array().square().colwise().mean();
  for (Eigen::Index j = 0; j < var.size(); ++j)
    CHECK(var(j) == doctest::Approx(1.0).epsilon(1e-8));

  FeatureMatrix c2 = cmvn(c);
  CHECK((c2.frames - c.frames).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("cmvn: drops unvoiced frames in order") {
  FeatureMatrix f;
  f.utterance_id = "drop";
  f.frames = Matrix::Zero(5, 2);
  for (Eigen::Index t = 0; t < 5; ++t) {
    f.frames(t, 0) = static_cast<double>(t);
    f.frames(t, 1) = 10.0 - static_cast<double>(t);
  }
  f.vad_mask = {1, 0, 1, 0, 1};
  FeatureMatrix c = cmvn(f);
  REQUIRE(c.num_frames() == 3);
  // voiced rows 0,2,4 have col0 values 0,2,4 -> normalized to -sqrt(3/2),0,+sqrt(3/2)
  const double s = std::sqrt(1.5);
  CHECK(c.frames(0, 0) == doctest::Approx(-s).epsilon(1e-12));
  CHECK(c.frames(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.frames(2, 0) == doctest::Approx(s).epsilon(1e-12));
  // col1 is anti-correlated: +s, 0, -s
  CHECK(c.frames(0, 1) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("cmvn: floors a zero-variance column to zeros instead of dividing by 0") {
  FeatureMatrix f;
  f.utterance_id = "flat";
  f.frames = Matrix::Zero(6, 2);
  f.frames.col(0).setConstant(5.0);  // zero variance
  for (Eigen::Index t = 0; t < 6; ++t) f.frames(t, 1) = static_cast<double>(t);
  f.vad_mask.assign(6, 1);
  FeatureMatrix c = cmvn(f);
  CHECK(c.frames.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::isfinite(c.frames.col(1).sum()));
}

TEST_CASE("cmvn: needs at least two voiced frames") {
  FeatureMatrix f;
  f.utterance_id = "one-voiced";
  f.frames = Matrix::Zero(4, 3);
  f.vad_mask = {0, 1, 0, 0};
  CHECK_THROWS_AS(cmvn(f), InputError);
}

TEST_CASE("feature_chain: produces finite 39-dim voiced features") {
  AudioClip clip = noise_clip(0.2, 16000, 16000, 7, "chain");
  FeatureConfig cfg;
  FeatureMatrix f = feature_chain(clip, cfg);
  CHECK(f.dim() == 39);
  CHECK(f.num_frames() >= 1);
  CHECK(f.num_frames() <= 99);
  CHECK(f.frames.allFinite());
  for (uint8_t v : f.vad_mask) CHECK(v == 1);
  CHECK(f.utterance_id == "chain");
}

TEST_CASE("feature config and clip validation") {
  FeatureConfig cfg;
  cfg.frame_shift_ms = 25.0;  // larger than frame_len_ms
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  FeatureConfig cfg2;
  cfg2.n_cepstra = 30;  // exceeds n_mel_filters = 26
  CHECK_THROWS_AS(cfg2.validate(), ConfigError);

  FeatureConfig ok;
  AudioClip empty;
  empty.id = "empty";
  CHECK_THROWS_AS(compute_fbank(empty, ok), InputError);

  AudioClip tiny = sine_clip(100.0, 0.1, 0.01, 16000, "tiny");  // 160 < 320
  CHECK_THROWS_AS(compute_fbank(tiny, ok), InputError);

  AudioClip bad = sine_clip(100.0, 0.1, 0.1, 16000, "nan");
  bad.samples[5] = std::nan("");
  CHECK_THROWS_AS(compute_fbank(bad, ok), InputError);
}

TEST_CASE("feature files: write/read round trip") {
  TempDir tmp("features_io");
  AudioClip clip = noise_clip(0.3, 6400, 16000, 3, "rt");
  FeatureConfig cfg;
  FeatureMatrix f = feature_chain(clip, cfg);
  const std::string path = tmp.file("rt.eivb");
  write_features(path, f);
  FeatureMatrix g = read_features(path, "rt");
  CHECK(g.utterance_id == "rt");
  REQUIRE(g.num_frames() == f.num_frames());
  CHECK((g.frames - f.frames).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.vad_mask.size() == static_cast<size_t>(f.num_frames()));
}
