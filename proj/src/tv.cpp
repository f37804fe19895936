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

#include "eiv/tv.hpp"

#include "eiv/io.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace eiv {

namespace {

constexpr double kRidge = 1e-8;

void check_stats(const BwStats& s, int C, int D) {
  if (s.n.size() != C || s.f.rows() != C || s.f.cols() != D)
    throw InputError("stats '" + s.utterance_id + "' do not match model: n=" +
                     std::to_string(s.n.size()) + " f=" +
                     std::to_string(s.f.rows()) + "x" + std::to_string(s.f.cols()) +
                     " vs C=" + std::to_string(C) + " D=" + std::to_string(D));
}

// Solves A x = b for symmetric positive definite A, falling back to a ridge
// term when the factorization fails.
Matrix spd_solve(const Matrix& a, const Matrix& b, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  log_warn(std::string(what) + ": singular system, solving with ridge " +
           std::to_string(kRidge));
  Matrix reg = a + kRidge * Matrix::Identity(a.rows(), a.cols());
  Eigen::LLT<Matrix> llt2(reg);
  if (llt2.info() == Eigen::Success) return llt2.solve(b);
  return reg.ldlt().solve(b);
}

}  // namespace

IvectorExtractor::IvectorExtractor(const TvModel& model) : model_(model) {
  const int C = model_.num_components();
  const int D = model_.dim();
  if (model_.t.rows() != static_cast<Eigen::Index>(C) * D)
    throw InputError("TvModel: T has " + std::to_string(model_.t.rows()) +
                     " rows, expected C*D = " + std::to_string(C * D));
  inv_sqrt_sig_ = model_.sigma.array().sqrt().inverse();
  scaled_t_ = model_.t;
  for (int c = 0; c < C; ++c)
    scaled_t_.middleRows(static_cast<Eigen::Index>(c) * D, D).array().colwise() *=
        inv_sqrt_sig_.row(c).transpose().array();
}

Matrix IvectorExtractor::precision(const BwStats& stats) const {
  const int C = model_.num_components();
  const int D = model_.dim();
  const int R = model_.rank();
  check_stats(stats, C, D);
  Matrix p = Matrix::Identity(R, R);
  // P = I + sum_c n_c * U_c' U_c with U = Sigma^{-1/2} T, accumulated as one
  // rank update over sqrt(n)-scaled rows.
  Matrix scaled = scaled_t_;
  for (int c = 0; c < C; ++c)
    scaled.middleRows(static_cast<Eigen::Index>(c) * D, D) *=
        std::sqrt(std::max(stats.n(c), 0.0));
  p.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
  return p.selfadjointView<Eigen::Lower>();
}

IVector IvectorExtractor::extract(const BwStats& stats) const {
  const int C = model_.num_components();
  const int D = model_.dim();
  check_stats(stats, C, D);
  Matrix p = precision(stats);
  // rhs = T' Sigma^-1 f = U' (Sigma^-1/2 f)
  Vector scaled_f(static_cast<Eigen::Index>(C) * D);
  for (int c = 0; c < C; ++c)
    scaled_f.segment(static_cast<Eigen::Index>(c) * D, D) =
        (stats.f.row(c).array() * inv_sqrt_sig_.row(c).array()).transpose();
  Vector rhs = scaled_t_.transpose() * scaled_f;
  IVector iv;
  iv.utterance_id = stats.utterance_id;
  iv.w = spd_solve(p, rhs, "extract_ivector");
  return iv;
}

IVector extract_ivector(const TvModel& model, const BwStats& stats) {
  return IvectorExtractor(model).extract(stats);
}

TvModel train_tv(const std::vector<BwStats>& stats, const DiagGmm& ubm, int rank,
                 int iters, uint64_t seed) {
  if (stats.empty()) throw InputError("train_tv: no statistics");
  if (rank < 1) throw InputError("train_tv: rank must be >= 1");
  const int C = ubm.num_components();
  const int D = ubm.dim();
  if (rank > C * D)
    throw InputError("train_tv: rank " + std::to_string(rank) +
                     " exceeds supervector dimension " + std::to_string(C * D));
  for (const auto& s : stats) check_stats(s, C, D);
  if (static_cast<int>(stats.size()) < rank)
    log_warn("train_tv: only " + std::to_string(stats.size()) +
             " utterances for rank " + std::to_string(rank));

  TvModel model;
  model.sigma = ubm.vars;
  model.ubm_means = ubm.means;
  model.t.resize(static_cast<Eigen::Index>(C) * D, rank);
  Rng rng(derive_seed(seed, "tv-init"));
  for (Eigen::Index i = 0; i < model.t.rows(); ++i)
    for (Eigen::Index j = 0; j < model.t.cols(); ++j)
      model.t(i, j) = 1e-3 * rng.gaussian();

  for (int iter = 0; iter < iters; ++iter) {
    IvectorExtractor extractor(model);
    // Per-component accumulators: A_c = sum_u n_uc E[w w'], B_c = sum_u f_uc w'.
    std::vector<Matrix> acc_a(C, Matrix::Zero(rank, rank));
    std::vector<Matrix> acc_b(C, Matrix::Zero(D, rank));
    for (const auto& s : stats) {
      Matrix p = extractor.precision(s);
      Eigen::LLT<Matrix> llt(p);
      Matrix cov;
      Vector w;
      Vector scaled_f(static_cast<Eigen::Index>(C) * D);
      for (int c = 0; c < C; ++c)
        scaled_f.segment(static_cast<Eigen::Index>(c) * D, D) =
            (s.f.row(c).array() / model.sigma.row(c).array()).transpose();
      Vector rhs = model.t.transpose() * scaled_f;
      if (llt.info() == Eigen::Success) {
        cov = llt.solve(Matrix::Identity(rank, rank));
        w = llt.solve(rhs);
      } else {
        Matrix reg = p + kRidge * Matrix::Identity(rank, rank);
        cov = reg.ldlt().solve(Matrix::Identity(rank, rank));
        w = reg.ldlt().solve(rhs);
      }
      Matrix second_moment = cov + w * w.transpose();
      for (int c = 0; c < C; ++c) {
        acc_a[c].noalias() += s.n(c) * second_moment;
        acc_b[c].noalias() += s.f.row(c).transpose() * w.transpose();
      }
    }
    // M-step: T_c = B_c A_c^-1, solved as A_c X = B_c' for X = T_c'.
    for (int c = 0; c < C; ++c) {
      Matrix tc_t = spd_solve(acc_a[c], acc_b[c].transpose(), "train_tv M-step");
      model.t.middleRows(static_cast<Eigen::Index>(c) * D, D) = tc_t.transpose();
    }
  }
  return model;
}

void write_tv(const std::string& path, const TvModel& model) {
  write_blob(path, Blob{"TV", {model.t, model.sigma, model.ubm_means}});
}

TvModel read_tv(const std::string& path) {
  Blob blob = read_blob(path, "TV");
  if (blob.blocks.size() != 3)
    throw FormatError("TV file must hold 3 blocks: " + path);
  TvModel model;
  model.t = blob.blocks[0];
  model.sigma = blob.blocks[1];
  model.ubm_means = blob.blocks[2];
  if (model.t.rows() != model.sigma.rows() * model.sigma.cols())
    throw FormatError("TV file has inconsistent shapes: " + path);
  return model;
}

void write_stats(const std::string& path, const BwStats& stats) {
  write_blob(path, Blob{"STAT", {stats.n.transpose(), stats.f}});
}

BwStats read_stats(const std::string& path, const std::string& utterance_id) {
  Blob blob = read_blob(path, "STAT");
  if (blob.blocks.size() != 2)
    throw FormatError("stats file must hold 2 blocks: " + path);
  BwStats s;
  s.n = blob.blocks[0].row(0).transpose();
  s.f = blob.blocks[1];
  s.utterance_id = utterance_id;
  if (s.f.rows() != s.n.size())
    throw FormatError("stats file has inconsistent shapes: " + path);
  return s;
}

}  // namespace eiv
