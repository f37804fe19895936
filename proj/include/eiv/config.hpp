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

#ifndef EIV_CONFIG_HPP
#define EIV_CONFIG_HPP

#include <string>
#include <vector>

#include "eiv/einv.hpp"
#include "eiv/features.hpp"
#include "eiv/synth.hpp"

namespace eiv {

/// Every tunable in one flat struct.  Defaults are the full-scale recipe
/// (1024-component UBM, rank-400 total variability, 150-dim LDA,
/// 150-64-32-64-150 invariance net); experiments override via key=value
/// config files.
struct ExperimentConfig {
  FeatureConfig feature;

  int ubm_components = 1024;
  int ubm_iterations = 10;

  int tv_rank = 400;
  int tv_iterations = 5;

  int lda_dim = 150;

  EinvTrainConfig einv;  // hidden 64-32-64, 20 epochs, batch 256, lr 1e-3
  int einv_num_pairs = 20000;
  int einv_k_min = 2;
  int einv_k_max = 5;
  double segment_window_s = 30.0;
  double segment_hop_s = 10.0;

  std::vector<std::string> emotions = {"N", "H", "A", "S"};
  std::string baseline_emotion = "N";

  SynthConfig synth;

  void validate() const;

  /// Segment geometry in frames, derived from the feature frame shift.
  int segment_window_frames() const;
  int segment_hop_frames() const;
};

/// Parses "key = value" lines ('#' starts a comment; blank lines ignored)
/// over the defaults.  Unknown keys and ill-typed values raise ConfigError
/// naming the key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// All recognized keys, for --help output and error messages.
std::vector<std::string> config_key_names();

}  // namespace eiv

#endif  // EIV_CONFIG_HPP
