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

#ifndef EIV_GMM_HPP
#define EIV_GMM_HPP

#include "eiv/common.hpp"
#include "eiv/features.hpp"

#include <string>
#include <vector>

namespace eiv {

/// Diagonal-covariance Gaussian mixture model (the universal background
/// model).  weights sum to one; variances are floored during training.
struct DiagGmm {
  Vector weights;  // C
  Matrix means;    // C x D
  Matrix vars;     // C x D

  int num_components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }

  /// Checks the structural invariants (weights simplex, positive finite
  /// variances); throws InputError on violation.
  void validate() const;
};

/// Zeroth-order occupancies and centered first-order Baum-Welch statistics
/// of one utterance against a UBM.
struct BwStats {
  Vector n;  // C
  Matrix f;  // C x D, sum_t gamma_c(t) * (x_t - m_c)
  std::string utterance_id;
};

struct EmResult {
  DiagGmm gmm;
  // Average per-frame log-likelihood observed at the start of each EM
  // iteration (under the previous iteration's parameters).
  std::vector<double> avg_loglik;
};

/// Full-batch EM for a diagonal GMM.  Means are initialized from `C` distinct
/// frames chosen by a seeded draw, weights uniform, variances set to the
/// global data variance.  Variances are floored at 1e-4 of the global
/// per-dimension variance.  Starved components (occupancy < 1e-3) are
/// reinitialized from the heaviest component with a small perturbation.
EmResult em_fit(const std::vector<FeatureMatrix>& features, int num_components,
                int iters, uint64_t seed);

/// Per-frame log-likelihoods under every component (T x C), computed in the
/// log domain: log w_c + log N(x | m_c, v_c).
Matrix component_log_likelihoods(const DiagGmm& g, const Matrix& frames);

/// Total per-frame log-likelihood, log sum_c exp(llk_c), length T.
Vector frame_log_likelihoods(const DiagGmm& g, const Matrix& frames);

/// Responsibilities for one frame; non-negative and summing to one.
Vector posteriors(const DiagGmm& g, const Vector& frame);

/// Accumulates zeroth- and centered first-order statistics of an utterance.
BwStats accumulate_stats(const DiagGmm& g, const FeatureMatrix& f);

/// Model file round-trip (kind "UBM", blocks: weights 1xC, means CxD, vars CxD).
void write_gmm(const std::string& path, const DiagGmm& g);
DiagGmm read_gmm(const std::string& path);

}  // namespace eiv

#endif  // EIV_GMM_HPP
