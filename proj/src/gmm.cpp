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

#include "eiv/gmm.hpp"

#include "eiv/io.hpp"

#include <cmath>

namespace eiv {

namespace {

constexpr double kVarianceFloorFactor = 1e-4;
constexpr double kStarvationThreshold = 1e-3;

Matrix voiced_rows(const FeatureMatrix& f) {
  Eigen::Index voiced = 0;
  for (uint8_t v : f.vad_mask) voiced += (v != 0);
  if (voiced == static_cast<Eigen::Index>(f.vad_mask.size())) return f.frames;
  Matrix out(voiced, f.dim());
  Eigen::Index r = 0;
  for (Eigen::Index t = 0; t < f.num_frames(); ++t)
    if (f.vad_mask[static_cast<size_t>(t)]) out.row(r++) = f.frames.row(t);
  return out;
}

// Cached per-component terms of log w_c + log N(x | m_c, v_c) so the
// likelihood of T frames is two GEMMs.
struct LogLikCache {
  Matrix inv_var;   // C x D, 1/v
  Matrix mean_iv;   // C x D, m/v
  Vector constant;  // C

  explicit LogLikCache(const DiagGmm& g) {
    inv_var = g.vars.array().inverse();
    mean_iv = g.means.array() * inv_var.array();
    const double d_log2pi = g.dim() * std::log(2.0 * M_PI);
    constant =
        (g.weights.array().log() -
         0.5 * (d_log2pi + g.vars.array().log().rowwise().sum() +
                (g.means.array().square() * inv_var.array()).rowwise().sum()))
            .matrix();
  }

  Matrix log_liks(const Matrix& frames) const {
    Matrix ll = -0.5 * (frames.array().square().matrix() * inv_var.transpose()) +
                frames * mean_iv.transpose();
    ll.rowwise() += constant.transpose();
    return ll;
  }
};

Vector row_logsumexp(const Matrix& ll) {
  Vector mx = ll.rowwise().maxCoeff();
  return mx.array() +
         (ll.colwise() - mx).array().exp().rowwise().sum().log();
}

}  // namespace

void DiagGmm::validate() const {
  if (means.rows() != weights.size() || vars.rows() != weights.size() ||
      vars.cols() != means.cols())
    throw InputError("DiagGmm: inconsistent shapes");
  if (std::abs(weights.sum() - 1.0) > 1e-10)
    throw InputError("DiagGmm: weights do not sum to 1");
  if ((weights.array() < 0).any()) throw InputError("DiagGmm: negative weight");
  if (!weights.allFinite() || !means.allFinite() || !vars.allFinite())
    throw InputError("DiagGmm: non-finite parameter");
  if ((vars.array() <= 0).any()) throw InputError("DiagGmm: non-positive variance");
}

Matrix component_log_likelihoods(const DiagGmm& g, const Matrix& frames) {
  return LogLikCache(g).log_liks(frames);
}

Vector frame_log_likelihoods(const DiagGmm& g, const Matrix& frames) {
  return row_logsumexp(component_log_likelihoods(g, frames));
}

Vector posteriors(const DiagGmm& g, const Vector& frame) {
  if (!frame.allFinite()) throw InputError("posteriors: non-finite frame");
  Matrix ll = component_log_likelihoods(g, frame.transpose());
  Vector shifted = (ll.row(0).array() - ll.row(0).maxCoeff()).exp();
  return shifted / shifted.sum();
}

EmResult em_fit(const std::vector<FeatureMatrix>& features, int num_components,
                int iters, uint64_t seed) {
  if (num_components < 1) throw InputError("em_fit: num_components must be >= 1");
  if (iters < 1) throw InputError("em_fit: iters must be >= 1");

  std::vector<Matrix> data;
  data.reserve(features.size());
  int64_t total_frames = 0;
  int dim = -1;
  for (const auto& f : features) {
    Matrix x = voiced_rows(f);
    if (x.rows() == 0) continue;
    if (dim < 0) dim = static_cast<int>(x.cols());
    if (x.cols() != dim) throw InputError("em_fit: inconsistent feature dims");
    total_frames += x.rows();
    data.push_back(std::move(x));
  }
  const int C = num_components;
  if (total_frames < 10LL * C)
    throw InputError("em_fit: need at least " + std::to_string(10LL * C) +
                     " frames for C=" + std::to_string(C) + ", got " +
                     std::to_string(total_frames));

  // Global mean and (population) variance for initialization and flooring.
  Vector gsum = Vector::Zero(dim), gsq = Vector::Zero(dim);
  for (const auto& x : data) {
    gsum += x.colwise().sum().transpose();
    gsq += x.array().square().colwise().sum().matrix().transpose();
  }
  Vector gmean = gsum / static_cast<double>(total_frames);
  Vector gvar =
      (gsq / static_cast<double>(total_frames) - gmean.array().square().matrix())
          .cwiseMax(0.0);
  Vector floor = (kVarianceFloorFactor * gvar.array()).max(1e-12).matrix();

  DiagGmm g;
  g.weights = Vector::Constant(C, 1.0 / C);
  g.means.resize(C, dim);
  g.vars = gvar.cwiseMax(floor).transpose().replicate(C, 1);

  Rng rng(derive_seed(seed, "gmm-init"));
  std::vector<int> pick = rng.sample_without_replacement(
      static_cast<int>(total_frames), C);
  for (int c = 0; c < C; ++c) {
    int64_t idx = pick[c];
    for (const auto& x : data) {
      if (idx < x.rows()) {
        g.means.row(c) = x.row(idx);
        break;
      }
      idx -= x.rows();
    }
  }

  Rng reinit_rng(derive_seed(seed, "gmm-reinit"));
  EmResult result;
  for (int iter = 0; iter < iters; ++iter) {
    LogLikCache cache(g);
    Vector occ = Vector::Zero(C);
    Matrix first = Matrix::Zero(C, dim);
    Matrix second = Matrix::Zero(C, dim);
    double loglik_sum = 0.0;
    for (const auto& x : data) {
      Matrix ll = cache.log_liks(x);
      Vector lse = row_logsumexp(ll);
      loglik_sum += lse.sum();
      Matrix gamma = ((ll.colwise() - lse).array().exp()).matrix();
      occ += gamma.colwise().sum().transpose();
      first.noalias() += gamma.transpose() * x;
      second.noalias() += gamma.transpose() * x.array().square().matrix();
    }
    result.avg_loglik.push_back(loglik_sum / static_cast<double>(total_frames));

    int heaviest = 0;
    occ.maxCoeff(&heaviest);
    for (int c = 0; c < C; ++c) {
      if (occ(c) < kStarvationThreshold) {
        log_warn("em_fit: component " + std::to_string(c) +
                 " starved (occupancy " + std::to_string(occ(c)) +
                 "), reinitializing from component " + std::to_string(heaviest));
        for (int d = 0; d < dim; ++d)
          g.means(c, d) = g.means(heaviest, d) +
                          0.1 * std::sqrt(g.vars(heaviest, d)) * reinit_rng.gaussian();
        g.vars.row(c) = g.vars.row(heaviest);
        g.weights(c) = g.weights(heaviest) / 2.0;
        g.weights(heaviest) /= 2.0;
        continue;
      }
      g.weights(c) = occ(c) / static_cast<double>(total_frames);
      g.means.row(c) = first.row(c) / occ(c);
      Vector v = (second.row(c) / occ(c)).transpose().array().matrix() -
                 g.means.row(c).transpose().array().square().matrix();
      g.vars.row(c) = v.cwiseMax(floor).transpose();
    }
    g.weights /= g.weights.sum();
  }
  g.validate();
  result.gmm = std::move(g);
  return result;
}

BwStats accumulate_stats(const DiagGmm& g, const FeatureMatrix& f) {
  Matrix x = voiced_rows(f);
  if (x.rows() == 0)
    throw InputError("accumulate_stats: no voiced frames in '" + f.utterance_id + "'");
  if (x.cols() != g.dim())
    throw InputError("accumulate_stats: feature dim " + std::to_string(x.cols()) +
                     " does not match UBM dim " + std::to_string(g.dim()));
  LogLikCache cache(g);
  Matrix ll = cache.log_liks(x);
  Vector lse = row_logsumexp(ll);
  Matrix gamma = ((ll.colwise() - lse).array().exp()).matrix();

  BwStats s;
  s.utterance_id = f.utterance_id;
  s.n = gamma.colwise().sum().transpose();
  s.f.noalias() = gamma.transpose() * x;
  s.f -= s.n.asDiagonal() * g.means;  // center first-order stats on the UBM means
  return s;
}

void write_gmm(const std::string& path, const DiagGmm& g) {
  write_blob(path, Blob{"UBM", {g.weights.transpose(), g.means, g.vars}});
}

DiagGmm read_gmm(const std::string& path) {
  Blob blob = read_blob(path, "UBM");
  if (blob.blocks.size() != 3)
    throw FormatError("UBM file must hold 3 blocks: " + path);
  DiagGmm g;
  g.weights = blob.blocks[0].row(0).transpose();
  g.means = blob.blocks[1];
  g.vars = blob.blocks[2];
  g.validate();
  return g;
}

}  // namespace eiv
