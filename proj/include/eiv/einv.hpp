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

#ifndef EIV_EINV_HPP
#define EIV_EINV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "eiv/common.hpp"
#include "eiv/compensate.hpp"

namespace eiv {

/// Half-open frame range [start, start + length) inside one utterance.
struct SegmentSpec {
  int start = 0;
  int length = 0;
};

/// Sliding-window segmentation: windows of `window_frames` placed every
/// `hop_frames`, yielding floor((T - window)/hop) + 1 segments.  Throws
/// InputError when the utterance is shorter than one window.
std::vector<SegmentSpec> split_segments(int num_frames, int window_frames,
                                        int hop_frames);

/// One training pair for the invariance network: `input` averages segment
/// embeddings drawn from a single (speaker, emotion) cell, `target` averages
/// neutral-emotion segment embeddings of the same speaker.
struct AugPair {
  Vector input;
  Vector target;
};

struct AugmentConfig {
  int num_pairs = 20000;
  int k_min = 2;  // segments averaged per side, drawn uniformly in
  int k_max = 5;  // [k_min, min(k_max, cell size)] without replacement
  std::string neutral_label = "N";
  uint64_t seed = 0;
};

/// Builds the averaged-embedding training pairs.  Every (speaker, emotion)
/// cell and every speaker's neutral cell must hold at least k_min segments.
std::vector<AugPair> augment(const std::vector<CompEmbedding>& segments,
                             const AugmentConfig& cfg);

/// Fully connected net, ReLU hidden layers, linear output.
/// weights[l] maps dims[l] -> dims[l+1]; samples are matrix columns.
struct EinvNet {
  std::vector<int> dims;
  std::vector<Matrix> weights;  // weights[l]: dims[l+1] x dims[l]
  std::vector<Vector> biases;   // biases[l]:  dims[l+1]

  int num_layers() const { return static_cast<int>(weights.size()); }
  int in_dim() const { return dims.empty() ? 0 : dims.front(); }
  int out_dim() const { return dims.empty() ? 0 : dims.back(); }

  Vector forward(const Vector& x) const;
  Matrix forward_batch(const Matrix& x) const;
};

/// Fan-in-scaled uniform init, U(-sqrt(6/fan_in), sqrt(6/fan_in)); zero biases.
EinvNet make_einv_net(const std::vector<int>& dims, uint64_t seed);

/// MSE averaged over batch and output dimensions; gradients are written into
/// *gw / *gb (resized to match the net).  Returns the loss.
double batch_loss_and_grads(const EinvNet& net, const Matrix& x,
                            const Matrix& y, std::vector<Matrix>* gw,
                            std::vector<Vector>* gb);

struct EinvTrainConfig {
  std::vector<int> hidden_dims = {64, 32, 64};
  int epochs = 20;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double valid_fraction = 0.2;
  uint64_t seed = 0;

  void validate() const;
};

struct EinvTrainResult {
  EinvNet net;
  std::vector<double> train_loss;  // per epoch, sample-weighted mean
  std::vector<double> valid_loss;  // per epoch, over the held-out split
  int adam_steps = 0;
};

/// Trains the invariance net with Adam on a seeded 80/20 split of the pairs.
EinvTrainResult train_einv(const std::vector<AugPair>& pairs,
                           const EinvTrainConfig& cfg);

/// Maps a compensated embedding through the net (labels pass through).
CompEmbedding extract_einv(const EinvNet& net, const CompEmbedding& e);

/// Model file round-trip (kind "EINV"; per layer one weight and one bias
/// block, in order).
void write_einv(const std::string& path, const EinvNet& net);
EinvNet read_einv(const std::string& path);

/// Writes "epoch,train_loss,valid_loss" rows for inspection/plotting.
void write_loss_csv(const std::string& path,
                    const std::vector<double>& train_loss,
                    const std::vector<double>& valid_loss);

}  // namespace eiv

#endif  // EIV_EINV_HPP
