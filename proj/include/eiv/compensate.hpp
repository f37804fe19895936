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

#ifndef EIV_COMPENSATE_HPP
#define EIV_COMPENSATE_HPP

#include "eiv/common.hpp"
#include "eiv/tv.hpp"

#include <string>
#include <vector>

namespace eiv {

/// LDA projection fitted on background i-vectors; columns of `basis` are
/// generalized eigenvectors of (S_b, S_w) sorted by decreasing eigenvalue.
struct LdaTransform {
  Matrix basis;  // R x out_dim
  Vector mean;   // R, global mean of the training i-vectors

  int in_dim() const { return static_cast<int>(basis.rows()); }
  int out_dim() const { return static_cast<int>(basis.cols()); }
};

/// WCCN whitening: chol is the lower-triangular B with B B' = W^-1 where W is
/// the averaged within-class covariance in LDA space.
struct WccnTransform {
  Matrix chol;
};

/// Channel/session-compensated embedding plus the labels the backend needs.
struct CompEmbedding {
  Vector e;
  std::string utterance_id;
  std::string speaker;
  std::string emotion;  // one of N, H, A, S, or "unknown"
};

/// Fits LDA by solving S_b v = lambda S_w v with S_w ridge-regularized by
/// 1e-6 * trace(S_w)/R.  If fewer than out_dim eigenvalues exceed 1e-12 the
/// remaining directions are filled from the S_w-whitened orthogonal
/// complement.
LdaTransform fit_lda(const std::vector<IVector>& ivectors,
                     const std::vector<std::string>& speakers, int out_dim);

/// Fits WCCN on LDA-space vectors: W = average per-class covariance,
/// regularized by 1e-6 * trace(W)/dim; B = chol(W^-1).
WccnTransform fit_wccn(const std::vector<Vector>& embeddings,
                       const std::vector<std::string>& speakers);

/// e = B' * (basis' * (w - mean))
CompEmbedding apply_compensation(const IVector& iv, const LdaTransform& lda,
                                 const WccnTransform& wccn);

/// Model file round-trips (kinds "LDA" and "WCCN").
void write_lda(const std::string& path, const LdaTransform& lda);
LdaTransform read_lda(const std::string& path);
void write_wccn(const std::string& path, const WccnTransform& wccn);
WccnTransform read_wccn(const std::string& path);

}  // namespace eiv

#endif  // EIV_COMPENSATE_HPP
