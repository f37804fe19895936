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

#include "eiv/einv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "eiv/io.hpp"

namespace eiv {

std::vector<SegmentSpec> split_segments(int num_frames, int window_frames,
                                        int hop_frames) {
  if (window_frames < 1 || hop_frames < 1) {
    throw InputError("split_segments: window and hop must be positive");
  }
  if (num_frames < window_frames) {
    std::ostringstream os;
    os << "split_segments: utterance has " << num_frames
       << " frames, shorter than one window of " << window_frames;
    throw InputError(os.str());
  }
  const int count = (num_frames - window_frames) / hop_frames + 1;
  std::vector<SegmentSpec> segs(count);
  for (int i = 0; i < count; ++i) {
    segs[i].start = i * hop_frames;
    segs[i].length = window_frames;
  }
  return segs;
}

namespace {

// speaker -> emotion -> indices into the segment list; std::map keeps both
// levels lexicographically ordered so sampling is platform-independent.
using CellIndex = std::map<std::string, std::map<std::string, std::vector<int>>>;

CellIndex index_cells(const std::vector<CompEmbedding>& segments) {
  CellIndex cells;
  for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
    cells[segments[i].speaker][segments[i].emotion].push_back(i);
  }
  return cells;
}

Vector average_subset(const std::vector<CompEmbedding>& segments,
                      const std::vector<int>& cell, const std::vector<int>& pick) {
  Vector avg = Vector::Zero(segments[cell[pick[0]]].e.size());
  for (int p : pick) avg += segments[cell[p]].e;
  avg /= static_cast<double>(pick.size());
  return avg;
}

}  // namespace

std::vector<AugPair> augment(const std::vector<CompEmbedding>& segments,
                             const AugmentConfig& cfg) {
  if (cfg.num_pairs < 1) throw ConfigError("augment: num_pairs must be >= 1");
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min) {
    throw ConfigError("augment: need 1 <= k_min <= k_max");
  }
  if (segments.empty()) throw InputError("augment: no segments supplied");
  const int dim = static_cast<int>(segments[0].e.size());
  for (const auto& s : segments) {
    if (s.e.size() != dim) {
      throw InputError("augment: inconsistent embedding dimensions");
    }
    if (s.speaker.empty()) {
      throw InputError("augment: segment " + s.utterance_id +
                       " is missing a speaker label");
    }
  }

  const CellIndex cells = index_cells(segments);

  // Every cell we may draw from must support a k_min-subset, and every
  // speaker needs a neutral cell for the target side.
  std::vector<std::string> speakers;
  std::vector<std::vector<std::string>> emotions_of;  // parallel to speakers
  for (const auto& [spk, by_emo] : cells) {
    auto it = by_emo.find(cfg.neutral_label);
    if (it == by_emo.end()) {
      throw InputError("augment: speaker " + spk + " has no '" +
                       cfg.neutral_label + "' segments for the target side");
    }
    for (const auto& [emo, idx] : by_emo) {
      if (static_cast<int>(idx.size()) < cfg.k_min) {
        std::ostringstream os;
        os << "augment: cell (" << spk << ", " << emo << ") has only "
           << idx.size() << " segments; need at least " << cfg.k_min;
        throw InputError(os.str());
      }
    }
    speakers.push_back(spk);
    emotions_of.emplace_back();
    for (const auto& [emo, idx] : by_emo) emotions_of.back().push_back(emo);
  }

  Rng rng(cfg.seed);
  std::vector<AugPair> pairs;
  pairs.reserve(cfg.num_pairs);
  for (int p = 0; p < cfg.num_pairs; ++p) {
    const int si = rng.uniform_int(0, static_cast<int>(speakers.size()) - 1);
    const auto& spk = speakers[si];
    const auto& emos = emotions_of[si];
    const auto& emo = emos[rng.uniform_int(0, static_cast<int>(emos.size()) - 1)];

    const auto& in_cell = cells.at(spk).at(emo);
    const auto& tgt_cell = cells.at(spk).at(cfg.neutral_label);

    const int k_in = rng.uniform_int(
        cfg.k_min, std::min(cfg.k_max, static_cast<int>(in_cell.size())));
    const std::vector<int> in_pick =
        rng.sample_without_replacement(static_cast<int>(in_cell.size()), k_in);

    const int k_tgt = rng.uniform_int(
        cfg.k_min, std::min(cfg.k_max, static_cast<int>(tgt_cell.size())));
    const std::vector<int> tgt_pick =
        rng.sample_without_replacement(static_cast<int>(tgt_cell.size()), k_tgt);

    AugPair pair;
    pair.input = average_subset(segments, in_cell, in_pick);
    pair.target = average_subset(segments, tgt_cell, tgt_pick);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

Vector EinvNet::forward(const Vector& x) const {
  Matrix out = forward_batch(x);
  return out.col(0);
}

Matrix EinvNet::forward_batch(const Matrix& x) const {
  if (x.rows() != in_dim()) {
    throw InputError("EinvNet: input dimension " + std::to_string(x.rows()) +
                     " does not match net input " + std::to_string(in_dim()));
  }
  Matrix a = x;
  for (int l = 0; l < num_layers(); ++l) {
    Matrix z = (weights[l] * a).colwise() + biases[l];
    if (l + 1 < num_layers()) {
      a = z.cwiseMax(0.0);  // ReLU on hidden layers only
    } else {
      a = std::move(z);
    }
  }
  return a;
}

EinvNet make_einv_net(const std::vector<int>& dims, uint64_t seed) {
  if (dims.size() < 2) {
    throw ConfigError("make_einv_net: need at least input and output dims");
  }
  for (int d : dims) {
    if (d < 1) throw ConfigError("make_einv_net: layer dims must be positive");
  }
  EinvNet net;
  net.dims = dims;
  Rng rng(seed);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        w(r, c) = rng.uniform(-limit, limit);
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(fan_out));
  }
  return net;
}

double batch_loss_and_grads(const EinvNet& net, const Matrix& x,
                            const Matrix& y, std::vector<Matrix>* gw,
                            std::vector<Vector>* gb) {
  const int nl = net.num_layers();
  if (x.cols() != y.cols() || y.rows() != net.out_dim()) {
    throw InputError("batch_loss_and_grads: batch shape mismatch");
  }
  const int batch = static_cast<int>(x.cols());
  if (batch == 0) throw InputError("batch_loss_and_grads: empty batch");

  // Forward, keeping activations; activ[0] is the input.
  std::vector<Matrix> activ(nl + 1);
  activ[0] = x;
  for (int l = 0; l < nl; ++l) {
    Matrix z = (net.weights[l] * activ[l]).colwise() + net.biases[l];
    activ[l + 1] = (l + 1 < nl) ? z.cwiseMax(0.0).eval() : std::move(z);
  }

  const double denom = static_cast<double>(batch) * net.out_dim();
  Matrix diff = activ[nl] - y;
  const double loss = diff.squaredNorm() / denom;

  gw->assign(nl, Matrix());
  gb->assign(nl, Vector());
  // dL/d(yhat) for MSE averaged over batch and dims.
  Matrix delta = (2.0 / denom) * diff;
  for (int l = nl - 1; l >= 0; --l) {
    (*gw)[l].noalias() = delta * activ[l].transpose();
    (*gb)[l] = delta.rowwise().sum();
    if (l > 0) {
      // ReLU subgradient: 0 where the (post-activation) output was clamped.
      delta = (net.weights[l].transpose() * delta).cwiseProduct(
          (activ[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

void EinvTrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("einv: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("einv: batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("einv: learning_rate must be > 0");
  if (!(valid_fraction > 0.0 && valid_fraction < 1.0)) {
    throw ConfigError("einv: valid_fraction must lie in (0, 1)");
  }
  if (hidden_dims.empty()) throw ConfigError("einv: need at least one hidden layer");
  for (int d : hidden_dims) {
    if (d < 1) throw ConfigError("einv: hidden dims must be positive");
  }
  if (!(adam_beta1 >= 0 && adam_beta1 < 1) ||
      !(adam_beta2 >= 0 && adam_beta2 < 1) || !(adam_eps > 0)) {
    throw ConfigError("einv: invalid Adam hyperparameters");
  }
}

EinvTrainResult train_einv(const std::vector<AugPair>& pairs,
                           const EinvTrainConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(pairs.size());
  if (n < 2) throw InputError("train_einv: need at least two pairs");
  const int in_dim = static_cast<int>(pairs[0].input.size());
  const int out_dim = static_cast<int>(pairs[0].target.size());
  for (const auto& p : pairs) {
    if (p.input.size() != in_dim || p.target.size() != out_dim) {
      throw InputError("train_einv: inconsistent pair dimensions");
    }
  }

  // Seeded split: shuffle once, then carve off the tail as validation.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  {
    Rng split_rng(derive_seed(cfg.seed, "einv-split"));
    split_rng.shuffle(order);
  }
  const int n_valid = static_cast<int>(std::floor(cfg.valid_fraction * n));
  const int n_train = n - n_valid;
  if (n_train < 1 || n_valid < 1) {
    throw InputError("train_einv: split leaves an empty train or valid set");
  }

  Matrix x_train(in_dim, n_train), y_train(out_dim, n_train);
  for (int i = 0; i < n_train; ++i) {
    x_train.col(i) = pairs[order[i]].input;
    y_train.col(i) = pairs[order[i]].target;
  }
  Matrix x_valid(in_dim, n_valid), y_valid(out_dim, n_valid);
  for (int i = 0; i < n_valid; ++i) {
    x_valid.col(i) = pairs[order[n_train + i]].input;
    y_valid.col(i) = pairs[order[n_train + i]].target;
  }

  std::vector<int> dims;
  dims.push_back(in_dim);
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(out_dim);

  EinvTrainResult res;
  res.net = make_einv_net(dims, derive_seed(cfg.seed, "einv-init"));
  EinvNet& net = res.net;
  const int nl = net.num_layers();

  // Adam moment buffers, one pair per parameter tensor.
  std::vector<Matrix> mw(nl), vw(nl);
  std::vector<Vector> mb(nl), vb(nl);
  for (int l = 0; l < nl; ++l) {
    mw[l] = Matrix::Zero(net.weights[l].rows(), net.weights[l].cols());
    vw[l] = mw[l];
    mb[l] = Vector::Zero(net.biases[l].size());
    vb[l] = mb[l];
  }

  Rng shuffle_rng(derive_seed(cfg.seed, "einv-shuffle"));
  std::vector<int> train_idx(n_train);
  std::iota(train_idx.begin(), train_idx.end(), 0);

  std::vector<Matrix> gw;
  std::vector<Vector> gb;
  int t = 0;  // global Adam step
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(train_idx);
    double loss_sum = 0.0;
    int batch_index = 0;
    for (int begin = 0; begin < n_train; begin += cfg.batch_size, ++batch_index) {
      const int count = std::min(cfg.batch_size, n_train - begin);
      Matrix xb(in_dim, count), yb(out_dim, count);
      for (int i = 0; i < count; ++i) {
        xb.col(i) = x_train.col(train_idx[begin + i]);
        yb.col(i) = y_train.col(train_idx[begin + i]);
      }
      const double loss = batch_loss_and_grads(net, xb, yb, &gw, &gb);
      if (!std::isfinite(loss)) {
        std::ostringstream os;
        os << "train_einv: non-finite loss at epoch " << epoch << ", batch "
           << batch_index;
        throw InputError(os.str());
      }
      loss_sum += loss * count;

      ++t;
      const double bc1 = 1.0 - std::pow(cfg.adam_beta1, t);
      const double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);
      for (int l = 0; l < nl; ++l) {
        mw[l] = cfg.adam_beta1 * mw[l] + (1.0 - cfg.adam_beta1) * gw[l];
        vw[l] = cfg.adam_beta2 * vw[l] +
                (1.0 - cfg.adam_beta2) * gw[l].array().square().matrix();
        net.weights[l].array() -=
            cfg.learning_rate * (mw[l].array() / bc1) /
            ((vw[l].array() / bc2).sqrt() + cfg.adam_eps);

        mb[l] = cfg.adam_beta1 * mb[l] + (1.0 - cfg.adam_beta1) * gb[l];
        vb[l] = cfg.adam_beta2 * vb[l] +
                (1.0 - cfg.adam_beta2) * gb[l].array().square().matrix();
        net.biases[l].array() -=
            cfg.learning_rate * (mb[l].array() / bc1) /
            ((vb[l].array() / bc2).sqrt() + cfg.adam_eps);
      }
    }
    res.train_loss.push_back(loss_sum / n_train);

    const Matrix pred = net.forward_batch(x_valid);
    const double vloss =
        (pred - y_valid).squaredNorm() / (static_cast<double>(n_valid) * out_dim);
    res.valid_loss.push_back(vloss);
  }
  res.adam_steps = t;
  return res;
}

CompEmbedding extract_einv(const EinvNet& net, const CompEmbedding& e) {
  if (e.e.size() != net.in_dim()) {
    throw InputError("extract_einv: embedding dimension " +
                     std::to_string(e.e.size()) + " does not match net input " +
                     std::to_string(net.in_dim()));
  }
  CompEmbedding out = e;
  out.e = net.forward(e.e);
  return out;
}

void write_einv(const std::string& path, const EinvNet& net) {
  if (net.num_layers() == 0) throw InputError("write_einv: empty network");
  Blob blob;
  blob.kind = "EINV";
  for (int l = 0; l < net.num_layers(); ++l) {
    blob.blocks.push_back(net.weights[l]);
    blob.blocks.push_back(net.biases[l]);
  }
  write_blob(path, blob);
}

EinvNet read_einv(const std::string& path) {
  Blob blob = read_blob(path, "EINV");
  if (blob.blocks.empty() || blob.blocks.size() % 2 != 0) {
    throw FormatError("read_einv: expected an even, nonzero block count in " +
                      path);
  }
  EinvNet net;
  const int nl = static_cast<int>(blob.blocks.size()) / 2;
  for (int l = 0; l < nl; ++l) {
    const Matrix& w = blob.blocks[2 * l];
    const Matrix& b = blob.blocks[2 * l + 1];
    if (b.cols() != 1 || b.rows() != w.rows()) {
      throw FormatError("read_einv: bias shape mismatch at layer " +
                        std::to_string(l) + " in " + path);
    }
    if (l > 0 && w.cols() != net.weights.back().rows()) {
      throw FormatError("read_einv: layer dimension chain broken at layer " +
                        std::to_string(l) + " in " + path);
    }
    net.weights.push_back(w);
    net.biases.push_back(b.col(0));
  }
  net.dims.push_back(static_cast<int>(net.weights.front().cols()));
  for (const auto& w : net.weights) {
    net.dims.push_back(static_cast<int>(w.rows()));
  }
  return net;
}

void write_loss_csv(const std::string& path,
                    const std::vector<double>& train_loss,
                    const std::vector<double>& valid_loss) {
  if (train_loss.size() != valid_loss.size()) {
    throw InputError("write_loss_csv: loss traces differ in length");
  }
  std::ofstream out(path);
  if (!out) throw IoError("write_loss_csv: cannot open " + path);
  out << "epoch,train_loss,valid_loss\n";
  out.precision(12);
  for (size_t i = 0; i < train_loss.size(); ++i) {
    out << (i + 1) << ',' << train_loss[i] << ',' << valid_loss[i] << '\n';
  }
  if (!out) throw IoError("write_loss_csv: write failed for " + path);
}

}  // namespace eiv
