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

#include "eiv/features.hpp"

#include "eiv/io.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>

namespace eiv {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

int64_t frame_length_samples(const FeatureConfig& cfg, int sample_rate) {
  return static_cast<int64_t>(cfg.frame_len_ms * sample_rate / 1000.0 + 0.5);
}

int64_t frame_shift_samples(const FeatureConfig& cfg, int sample_rate) {
  return static_cast<int64_t>(cfg.frame_shift_ms * sample_rate / 1000.0 + 0.5);
}

// Triangular filters with vertices equally spaced on the mel scale from
// 0 Hz to Nyquist; weights evaluated at FFT bin centers.
Matrix build_mel_filterbank(const FeatureConfig& cfg, int sample_rate, int n_fft) {
  const int n_bins = n_fft / 2 + 1;
  const int M = cfg.n_mel_filters;
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  Matrix fb = Matrix::Zero(M, n_bins);
  for (int b = 0; b < n_bins; ++b) {
    double mel = hz_to_mel(static_cast<double>(b) * sample_rate / n_fft);
    for (int i = 1; i <= M; ++i) {
      double left = (i - 1) * mel_hi / (M + 1);
      double center = i * mel_hi / (M + 1);
      double right = (i + 1) * mel_hi / (M + 1);
      double w = 0.0;
      if (mel >= left && mel <= center)
        w = (mel - left) / (center - left);
      else if (mel > center && mel <= right)
        w = (right - mel) / (right - center);
      fb(i - 1, b) = w;
    }
  }
  return fb;
}

void validate_clip(const AudioClip& clip) {
  if (clip.sample_rate <= 0)
    throw InputError("clip '" + clip.id + "': sample_rate must be positive");
  if (clip.samples.empty())
    throw InputError("clip '" + clip.id + "': no samples");
  for (double s : clip.samples)
    if (!std::isfinite(s))
      throw InputError("clip '" + clip.id + "': non-finite sample");
}

}  // namespace

void FeatureConfig::validate() const {
  if (frame_shift_ms <= 0 || frame_len_ms <= 0)
    throw ConfigError("frame lengths must be positive");
  if (frame_shift_ms > frame_len_ms)
    throw ConfigError("frame_shift_ms must not exceed frame_len_ms");
  if (n_cepstra < 1 || n_mel_filters < 1)
    throw ConfigError("n_cepstra and n_mel_filters must be positive");
  if (n_cepstra > n_mel_filters)
    throw ConfigError("n_cepstra must not exceed n_mel_filters");
  if (preemphasis < 0.0 || preemphasis >= 1.0)
    throw ConfigError("preemphasis must be in [0, 1)");
  if (delta_window < 1) throw ConfigError("delta_window must be >= 1");
  if (!(vad_dynamic_range_db > 0))
    throw ConfigError("vad_dynamic_range_db must be positive");
}

int64_t frame_count(int64_t n_samples, int64_t frame_len, int64_t frame_shift) {
  if (n_samples < frame_len) return 0;
  return (n_samples - frame_len) / frame_shift + 1;
}

std::vector<double> mel_filter_centers_hz(const FeatureConfig& cfg, int sample_rate) {
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> centers(cfg.n_mel_filters);
  for (int i = 1; i <= cfg.n_mel_filters; ++i)
    centers[i - 1] = mel_to_hz(i * mel_hi / (cfg.n_mel_filters + 1));
  return centers;
}

FbankResult compute_fbank(const AudioClip& clip, const FeatureConfig& cfg) {
  cfg.validate();
  validate_clip(clip);

  const int64_t flen = frame_length_samples(cfg, clip.sample_rate);
  const int64_t fshift = frame_shift_samples(cfg, clip.sample_rate);
  const int64_t n = static_cast<int64_t>(clip.samples.size());
  const int64_t T = frame_count(n, flen, fshift);
  if (T == 0)
    throw InputError("clip '" + clip.id + "' too short: " + std::to_string(n) +
                     " samples < one " + std::to_string(flen) + "-sample frame");

  // Pre-emphasis over the whole signal, y[t] = x[t] - a*x[t-1].
  std::vector<double> emph(clip.samples.size());
  emph[0] = clip.samples[0];
  for (size_t t = 1; t < clip.samples.size(); ++t)
    emph[t] = clip.samples[t] - cfg.preemphasis * clip.samples[t - 1];

  const int n_fft = next_pow2(static_cast<int>(flen));
  const int n_bins = n_fft / 2 + 1;
  Matrix fb = build_mel_filterbank(cfg, clip.sample_rate, n_fft);

  std::vector<double> window(flen);
  for (int64_t i = 0; i < flen; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (flen - 1));

  Eigen::FFT<double> fft;
  std::vector<double> buf(n_fft, 0.0);
  std::vector<std::complex<double>> spec;

  FbankResult out;
  out.energies.resize(T, cfg.n_mel_filters);
  out.log_energy.resize(T);

  Vector power(n_bins);
  for (int64_t t = 0; t < T; ++t) {
    const int64_t start = t * fshift;
    double raw_energy = 0.0;
    for (int64_t i = 0; i < flen; ++i) {
      double s = clip.samples[start + i];
      raw_energy += s * s;
    }
    out.log_energy[t] = std::log(std::max(raw_energy, kLogFloorEnergy));

    for (int64_t i = 0; i < flen; ++i) buf[i] = emph[start + i] * window[i];
    for (int64_t i = flen; i < n_fft; ++i) buf[i] = 0.0;
    fft.fwd(spec, buf);
    for (int b = 0; b < n_bins; ++b) power(b) = std::norm(spec[b]);
    out.energies.row(t) = (fb * power).transpose();
  }
  return out;
}

FeatureMatrix compute_mfcc(const AudioClip& clip, const FeatureConfig& cfg) {
  FbankResult fbank = compute_fbank(clip, cfg);
  const Eigen::Index T = fbank.energies.rows();
  const int M = cfg.n_mel_filters;
  const int K = cfg.n_cepstra;

  // Orthonormal DCT-II, rows 0..K-1.
  Matrix dct(K, M);
  for (int k = 0; k < K; ++k) {
    double scale = (k == 0) ? std::sqrt(1.0 / M) : std::sqrt(2.0 / M);
    for (int m = 0; m < M; ++m)
      dct(k, m) = scale * std::cos(M_PI * k * (2.0 * m + 1.0) / (2.0 * M));
  }

  Matrix log_energies =
      fbank.energies.array().max(kLogFloorEnergy).log().matrix();

  FeatureMatrix f;
  f.utterance_id = clip.id;
  f.frames = Matrix::Zero(T, cfg.feature_dim());
  f.frames.leftCols(K) = log_energies * dct.transpose();
  for (Eigen::Index t = 0; t < T; ++t) f.frames(t, 0) = fbank.log_energy[t];
  f.vad_mask.assign(static_cast<size_t>(T), 1);
  return f;
}

FeatureMatrix append_deltas(FeatureMatrix f, const FeatureConfig& cfg) {
  cfg.validate();
  const Eigen::Index T = f.num_frames();
  const int K = cfg.n_cepstra;
  if (f.dim() != cfg.feature_dim())
    throw InputError("append_deltas: feature dim " + std::to_string(f.dim()) +
                     " does not match config");
  const int W = cfg.delta_window;
  double denom = 0.0;
  for (int n = 1; n <= W; ++n) denom += 2.0 * n * n;

  auto regress = [&](Eigen::Index src_col, Eigen::Index dst_col) {
    for (Eigen::Index t = 0; t < T; ++t) {
      for (int c = 0; c < K; ++c) {
        double acc = 0.0;
        for (int n = 1; n <= W; ++n) {
          Eigen::Index hi = std::min<Eigen::Index>(t + n, T - 1);
          Eigen::Index lo = std::max<Eigen::Index>(t - n, 0);
          acc += n * (f.frames(hi, src_col + c) - f.frames(lo, src_col + c));
        }
        f.frames(t, dst_col + c) = acc / denom;
      }
    }
  };
  regress(0, K);       // delta from base
  regress(K, 2 * K);   // delta-delta from delta
  return f;
}

FeatureMatrix energy_vad(FeatureMatrix f, const FeatureConfig& cfg) {
  const Eigen::Index T = f.num_frames();
  if (T == 0) return f;
  double max_e = f.frames.col(0).maxCoeff();
  // dynamic range in dB converted to log-energy (power) units
  double threshold = max_e - cfg.vad_dynamic_range_db * std::log(10.0) / 10.0;
  f.vad_mask.assign(static_cast<size_t>(T), 0);
  for (Eigen::Index t = 0; t < T; ++t)
    if (f.frames(t, 0) >= threshold) f.vad_mask[static_cast<size_t>(t)] = 1;
  return f;
}

FeatureMatrix cmvn(const FeatureMatrix& f) {
  const Eigen::Index T = f.num_frames();
  if (f.vad_mask.size() != static_cast<size_t>(T))
    throw InputError("cmvn: vad_mask length mismatch for '" + f.utterance_id + "'");
  Eigen::Index voiced = 0;
  for (uint8_t v : f.vad_mask) voiced += (v != 0);
  if (voiced < 2)
    throw InputError("cmvn: fewer than 2 voiced frames in '" + f.utterance_id + "'");

  FeatureMatrix out;
  out.utterance_id = f.utterance_id;
  out.frames.resize(voiced, f.dim());
  Eigen::Index r = 0;
  for (Eigen::Index t = 0; t < T; ++t)
    if (f.vad_mask[static_cast<size_t>(t)]) out.frames.row(r++) = f.frames.row(t);

  Vector mean = out.frames.colwise().mean();
  Vector var = (out.frames.rowwise() - mean.transpose())
                   .array()
                   .square()
                   .colwise()
                   .mean();
  bool floored = false;
  for (Eigen::Index c = 0; c < var.size(); ++c) {
    if (var(c) < 1e-10) {
      var(c) = 1e-10;
      floored = true;
    }
  }
  if (floored)
    log_warn("cmvn: zero-variance column floored in '" + f.utterance_id + "'");
  Vector inv_std = var.array().sqrt().inverse();
  out.frames = (out.frames.rowwise() - mean.transpose()) * inv_std.asDiagonal();
  out.vad_mask.assign(static_cast<size_t>(voiced), 1);
  return out;
}

FeatureMatrix feature_chain(const AudioClip& clip, const FeatureConfig& cfg) {
  return cmvn(energy_vad(append_deltas(compute_mfcc(clip, cfg), cfg), cfg));
}

void write_features(const std::string& path, const FeatureMatrix& f) {
  write_matrix(path, f.frames);
}

FeatureMatrix read_features(const std::string& path, const std::string& utterance_id) {
  FeatureMatrix f;
  f.frames = read_matrix(path);
  f.vad_mask.assign(static_cast<size_t>(f.frames.rows()), 1);
  f.utterance_id = utterance_id;
  return f;
}

}  // namespace eiv
