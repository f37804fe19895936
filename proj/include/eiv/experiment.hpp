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

#ifndef EIV_EXPERIMENT_HPP
#define EIV_EXPERIMENT_HPP

#include <cstdint>

#include "eiv/config.hpp"
#include "eiv/ident.hpp"

namespace eiv {

/// End-to-end results of one synthetic run: all four identification setups
/// evaluated on the same trials.
struct ExperimentResult {
  EvalReport baseline;  // enrollment restricted to cfg.baseline_emotion
  EvalReport avg_ivec;
  EvalReport einv_test;
  EvalReport einv_pair;
};

/// Runs the whole pipeline in memory on a synthetic corpus: generate,
/// UBM, total-variability, i-vectors, LDA+WCCN, invariance net, evaluate.
/// `seed` is the root seed; every stage derives its own stream from it.
/// Utterances are realized one at a time where possible to bound memory.
ExperimentResult run_experiment(const ExperimentConfig& cfg, uint64_t seed);

}  // namespace eiv

#endif  // EIV_EXPERIMENT_HPP
