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

#ifndef EIV_TV_HPP
#define EIV_TV_HPP

#include "eiv/common.hpp"
#include "eiv/gmm.hpp"

#include <string>
#include <vector>

namespace eiv {

/// Total-variability model: supervector(utterance) = ubm_means + T * w with
/// w ~ N(0, I).  Sigma is copied from the UBM and not re-estimated.
struct TvModel {
  Matrix t;          // (C*D) x R, component blocks stacked row-wise
  Matrix sigma;      // C x D
  Matrix ubm_means;  // C x D

  int rank() const { return static_cast<int>(t.cols()); }
  int num_components() const { return static_cast<int>(sigma.rows()); }
  int dim() const { return static_cast<int>(sigma.cols()); }
};

struct IVector {
  Vector w;
  std::string utterance_id;
};

/// Precomputes Sigma^{-1/2}-scaled factor loadings so extraction is one
/// rank-update and one Cholesky solve per utterance.  Immutable and safe to
/// share across threads.
class IvectorExtractor {
 public:
  explicit IvectorExtractor(const TvModel& model);

  /// Posterior mean of w: (I + T' Sigma^-1 N T)^-1 T' Sigma^-1 f.
  IVector extract(const BwStats& stats) const;

  /// Posterior precision matrix I + T' Sigma^-1 N T (exposed for testing).
  Matrix precision(const BwStats& stats) const;

  const TvModel& model() const { return model_; }

 private:
  TvModel model_;
  Matrix scaled_t_;      // (C*D) x R, rows of T scaled by 1/sqrt(sigma)
  Matrix inv_sqrt_sig_;  // C x D
};

/// EM training of the T-matrix from per-utterance Baum-Welch statistics.
/// T is initialized from a seeded normal with standard deviation 1e-3.
TvModel train_tv(const std::vector<BwStats>& stats, const DiagGmm& ubm, int rank,
                 int iters, uint64_t seed);

/// One-shot extraction; for batches construct an IvectorExtractor once.
IVector extract_ivector(const TvModel& model, const BwStats& stats);

/// Model file round-trip (kind "TV", blocks: t, sigma, ubm_means).
void write_tv(const std::string& path, const TvModel& model);
TvModel read_tv(const std::string& path);

/// Stats file round-trip (kind "STAT", blocks: n 1xC, f CxD).
void write_stats(const std::string& path, const BwStats& stats);
BwStats read_stats(const std::string& path, const std::string& utterance_id);

}  // namespace eiv

#endif  // EIV_TV_HPP
