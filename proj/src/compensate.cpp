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

#include "eiv/compensate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "eiv/io.hpp"

namespace eiv {

namespace {

// Groups vectors by class label; preserves first-appearance class order.
std::map<std::string, std::vector<int>> group_by_class(
    const std::vector<std::string>& labels) {
  std::map<std::string, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    groups[labels[i]].push_back(i);
  }
  return groups;
}

}  // namespace

LdaTransform fit_lda(const std::vector<IVector>& ivectors,
                     const std::vector<std::string>& speakers, int out_dim) {
  if (ivectors.empty()) throw InputError("fit_lda: no i-vectors supplied");
  if (ivectors.size() != speakers.size()) {
    throw InputError("fit_lda: i-vector/label count mismatch");
  }
  const int dim = static_cast<int>(ivectors[0].w.size());
  if (out_dim < 1 || out_dim > dim) {
    std::ostringstream os;
    os << "fit_lda: out_dim " << out_dim << " must lie in [1, " << dim << "]";
    throw InputError(os.str());
  }
  for (const auto& iv : ivectors) {
    if (iv.w.size() != dim) {
      throw InputError("fit_lda: inconsistent i-vector dimensions");
    }
  }

  const auto groups = group_by_class(speakers);
  if (groups.size() < 2) {
    throw InputError("fit_lda: need at least two classes");
  }

  const double n_total = static_cast<double>(ivectors.size());
  Vector global_mean = Vector::Zero(dim);
  for (const auto& iv : ivectors) global_mean += iv.w;
  global_mean /= n_total;

  // S_w = (1/N) sum_k sum_{i in k} (w_i - mu_k)(w_i - mu_k)'
  // S_b = (1/N) sum_k N_k (mu_k - mu)(mu_k - mu)'
  Matrix sw = Matrix::Zero(dim, dim);
  Matrix sb = Matrix::Zero(dim, dim);
  for (const auto& [label, idx] : groups) {
    Vector mu_k = Vector::Zero(dim);
    for (int i : idx) mu_k += ivectors[i].w;
    mu_k /= static_cast<double>(idx.size());
    for (int i : idx) {
      Vector d = ivectors[i].w - mu_k;
      sw.noalias() += d * d.transpose();
    }
    Vector b = mu_k - global_mean;
    sb.noalias() += static_cast<double>(idx.size()) * b * b.transpose();
  }
  sw /= n_total;
  sb /= n_total;

  // Ridge keeps the within-class factor invertible when classes have few
  // members relative to the dimension.
  const double ridge = 1e-8 * sw.trace() / static_cast<double>(dim);
  sw.diagonal().array() += ridge;

  // Solve S_b v = lambda S_w v by whitening with S_w = L L':
  // with u = L' v the problem becomes (L^-1 S_b L^-T) u = lambda u.
  Eigen::LLT<Matrix> llt(sw);
  if (llt.info() != Eigen::Success) {
    throw InputError("fit_lda: within-class scatter is not positive definite");
  }
  Matrix l = llt.matrixL();
  Matrix sb_w = l.triangularView<Eigen::Lower>().solve(sb);
  sb_w = l.triangularView<Eigen::Lower>().solve(sb_w.transpose()).transpose();
  sb_w = 0.5 * (sb_w + sb_w.transpose());  // clean symmetry for the solver

  Eigen::SelfAdjointEigenSolver<Matrix> es(sb_w);
  if (es.info() != Eigen::Success) {
    throw InputError("fit_lda: eigen decomposition failed");
  }

  // Eigenvalues ascend; take the top out_dim columns in descending order.
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()(a) > es.eigenvalues()(b);
  });

  int n_informative = 0;
  for (int i = 0; i < dim; ++i) {
    if (es.eigenvalues()(order[i]) > 1e-12) ++n_informative;
  }

  Matrix u_cols(dim, out_dim);
  const int n_take = std::min(out_dim, n_informative);
  for (int j = 0; j < n_take; ++j) {
    u_cols.col(j) = es.eigenvectors().col(order[j]);
  }
  if (n_take < out_dim) {
    // Rank of S_b tops out at (#classes - 1); pad the basis with whitened
    // directions carrying no between-class energy so out_dim is honored.
    log_warn("fit_lda: only " + std::to_string(n_take) +
             " informative directions; filling remainder from the whitened "
             "complement");
    for (int j = n_take; j < out_dim; ++j) {
      u_cols.col(j) = es.eigenvectors().col(order[j]);
    }
  }

  // Back-substitute to the raw space: v = L^-T u.
  Matrix basis =
      l.transpose().triangularView<Eigen::Upper>().solve(u_cols);

  LdaTransform lda;
  lda.basis = basis;
  lda.mean = global_mean;
  return lda;
}

WccnTransform fit_wccn(const std::vector<Vector>& embeddings,
                       const std::vector<std::string>& speakers) {
  if (embeddings.empty()) throw InputError("fit_wccn: no embeddings supplied");
  if (embeddings.size() != speakers.size()) {
    throw InputError("fit_wccn: embedding/label count mismatch");
  }
  const int dim = static_cast<int>(embeddings[0].size());
  for (const auto& e : embeddings) {
    if (e.size() != dim) {
      throw InputError("fit_wccn: inconsistent embedding dimensions");
    }
  }
  const auto groups = group_by_class(speakers);

  // W = (1/K) sum_k Cov_k, each Cov_k the population covariance of class k.
  Matrix w = Matrix::Zero(dim, dim);
  for (const auto& [label, idx] : groups) {
    Vector mu_k = Vector::Zero(dim);
    for (int i : idx) mu_k += embeddings[i];
    mu_k /= static_cast<double>(idx.size());
    Matrix cov = Matrix::Zero(dim, dim);
    for (int i : idx) {
      Vector d = embeddings[i] - mu_k;
      cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(idx.size());
    w += cov;
  }
  w /= static_cast<double>(groups.size());

  const double ridge = 1e-8 * w.trace() / static_cast<double>(dim);
  w.diagonal().array() += ridge;

  Eigen::LLT<Matrix> llt_w(w);
  if (llt_w.info() != Eigen::Success) {
    throw InputError(
        "fit_wccn: averaged within-class covariance is singular; more "
        "utterances per speaker are required");
  }

  // B B' = W^-1 via the Cholesky of W: if W = L L' then B = L^-T.
  Matrix l = llt_w.matrixL();
  Matrix b = l.transpose()
                 .triangularView<Eigen::Upper>()
                 .solve(Matrix::Identity(dim, dim));
  WccnTransform wccn;
  wccn.chol = b;
  return wccn;
}

CompEmbedding apply_compensation(const IVector& iv, const LdaTransform& lda,
                                 const WccnTransform& wccn) {
  if (iv.w.size() != lda.in_dim()) {
    throw InputError("apply_compensation: i-vector dimension " +
                     std::to_string(iv.w.size()) +
                     " does not match LDA input dimension " +
                     std::to_string(lda.in_dim()));
  }
  if (wccn.chol.rows() != lda.out_dim()) {
    throw InputError("apply_compensation: WCCN dimension mismatch");
  }
  CompEmbedding out;
  out.e = wccn.chol.transpose() * (lda.basis.transpose() * (iv.w - lda.mean));
  out.utterance_id = iv.utterance_id;
  out.speaker = "";
  out.emotion = "";
  return out;
}

void write_lda(const std::string& path, const LdaTransform& lda) {
  Blob blob;
  blob.kind = "LDA";
  blob.blocks.push_back(lda.basis);
  blob.blocks.push_back(lda.mean);
  write_blob(path, blob);
}

LdaTransform read_lda(const std::string& path) {
  Blob blob = read_blob(path, "LDA");
  if (blob.blocks.size() != 2) {
    throw FormatError("read_lda: expected 2 blocks in " + path);
  }
  if (blob.blocks[1].cols() != 1 ||
      blob.blocks[1].rows() != blob.blocks[0].rows()) {
    throw FormatError("read_lda: mean/basis shape mismatch in " + path);
  }
  LdaTransform lda;
  lda.basis = blob.blocks[0];
  lda.mean = blob.blocks[1].col(0);
  return lda;
}

void write_wccn(const std::string& path, const WccnTransform& wccn) {
  Blob blob;
  blob.kind = "WCCN";
  blob.blocks.push_back(wccn.chol);
  write_blob(path, blob);
}

WccnTransform read_wccn(const std::string& path) {
  Blob blob = read_blob(path, "WCCN");
  if (blob.blocks.size() != 1) {
    throw FormatError("read_wccn: expected 1 block in " + path);
  }
  if (blob.blocks[0].rows() != blob.blocks[0].cols()) {
    throw FormatError("read_wccn: matrix must be square in " + path);
  }
  WccnTransform wccn;
  wccn.chol = blob.blocks[0];
  return wccn;
}

}  // namespace eiv
