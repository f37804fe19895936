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

#ifndef EIV_FEATURES_HPP
#define EIV_FEATURES_HPP

#include "eiv/common.hpp"

#include <string>
#include <vector>

namespace eiv {

/// Mono audio, amplitudes nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;
  std::string id;
};

struct FeatureConfig {
  double frame_len_ms = 20.0;
  double frame_shift_ms = 10.0;
  int n_cepstra = 13;
  int n_mel_filters = 26;
  double preemphasis = 0.97;
  int delta_window = 2;
  double vad_dynamic_range_db = 30.0;

  int feature_dim() const { return 3 * n_cepstra; }
  void validate() const;
};

/// Per-utterance feature sequence: T x (3 * n_cepstra) rows of
/// base + delta + delta-delta cepstra, with a per-frame voicing mask.
struct FeatureMatrix {
  Matrix frames;                  // T x 39
  std::vector<uint8_t> vad_mask;  // length T, 1 = voiced
  std::string utterance_id;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index dim() const { return frames.cols(); }
};

// Filterbank energies are floored at this value before taking logs, and the
// same floor is used for frame energies, so silence stays finite.
inline constexpr double kLogFloorEnergy = 1e-10;

/// floor((n_samples - frame_len) / frame_shift) + 1, or 0 if the clip is
/// shorter than one frame.
int64_t frame_count(int64_t n_samples, int64_t frame_len, int64_t frame_shift);

/// Linear (pre-log) mel filterbank energies, T x n_mel_filters, plus the raw
/// per-frame log energies in the last column convention used by compute_mfcc.
struct FbankResult {
  Matrix energies;                  // T x M, linear
  std::vector<double> log_energy;   // length T, ln of raw frame energy
};

FbankResult compute_fbank(const AudioClip& clip, const FeatureConfig& cfg);

/// Triangular mel filter center frequencies in Hz (length n_mel_filters).
std::vector<double> mel_filter_centers_hz(const FeatureConfig& cfg, int sample_rate);

/// MFCC base coefficients: DCT-II of log mel energies, c0 replaced by the
/// frame log energy.  Delta columns are zero-filled and vad_mask is all true.
FeatureMatrix compute_mfcc(const AudioClip& clip, const FeatureConfig& cfg);

/// Appends delta and delta-delta columns computed by the regression formula
/// over +-delta_window frames with edge replication.
FeatureMatrix append_deltas(FeatureMatrix f, const FeatureConfig& cfg);

/// Marks frame t voiced iff log-energy(t) >= max - dynamic_range_db * ln10/10.
FeatureMatrix energy_vad(FeatureMatrix f, const FeatureConfig& cfg);

/// Per-utterance mean/variance normalization over voiced frames; unvoiced
/// frames are dropped from the output.
FeatureMatrix cmvn(const FeatureMatrix& f);

/// compute_mfcc + append_deltas + energy_vad + cmvn.
FeatureMatrix feature_chain(const AudioClip& clip, const FeatureConfig& cfg);

/// Feature file helpers (kind "MAT", single block, one row per frame).
void write_features(const std::string& path, const FeatureMatrix& f);
FeatureMatrix read_features(const std::string& path, const std::string& utterance_id);

}  // namespace eiv

#endif  // EIV_FEATURES_HPP
