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

#ifndef EIV_IDENT_HPP
#define EIV_IDENT_HPP

#include <string>
#include <vector>

#include "eiv/common.hpp"
#include "eiv/compensate.hpp"
#include "eiv/einv.hpp"

namespace eiv {

/// Closed-set identification setups.
///  kBaseline: one enrollment emotion per model set, raw embeddings.
///  kAvgIvec:  per-speaker average across all enrollment emotions.
///  kEinvTest: models as kAvgIvec; only the trial side is mapped through the
///             invariance net.
///  kEinvPair: both sides mapped through the net (enrollment embeddings are
///             mapped before averaging).
enum class Framework { kBaseline, kAvgIvec, kEinvTest, kEinvPair };

Framework framework_from_string(const std::string& name);
std::string framework_to_string(Framework fw);

struct SpeakerModel {
  std::string speaker;
  Vector e;
};

struct Trial {
  Vector e;
  std::string utterance_id;
  std::string speaker;  // ground truth
  std::string emotion;
};

/// cos(a, b); throws InputError when either vector has zero norm.
double cosine(const Vector& a, const Vector& b);

/// Builds one model per speaker, sorted by speaker name.  `baseline_emotion`
/// selects the enrollment emotion for kBaseline (ignored otherwise); `net`
/// is required for kEinvPair and ignored for the other frameworks.
std::vector<SpeakerModel> build_models(const std::vector<CompEmbedding>& enroll,
                                       Framework fw,
                                       const std::string& baseline_emotion,
                                       const EinvNet* net);

/// Applies the framework's trial-side mapping (identity except for kEinvTest
/// and kEinvPair, which require `net`).
Vector trial_embedding(const Vector& e, Framework fw, const EinvNet* net);

/// Argmax cosine over the models; exact score ties go to the
/// lexicographically smallest speaker name.
std::string identify(const Vector& trial_e,
                     const std::vector<SpeakerModel>& models);

struct EvalReport {
  std::vector<std::string> emotions;  // report row order
  std::vector<int> correct;           // per emotion
  std::vector<int> total;             // per emotion
  std::vector<double> accuracy;       // percent, per emotion
  double average = 0.0;               // unweighted mean of per-emotion rows
  std::vector<std::string> speakers;  // confusion row/col order
  Matrix confusion;                   // counts, true x predicted
};

/// Scores every trial against the models under the given framework and
/// aggregates per-emotion accuracy.  Every emotion in `emotion_order` must
/// occur in the trial list.
EvalReport evaluate(const std::vector<Trial>& trials,
                    const std::vector<SpeakerModel>& models, Framework fw,
                    const EinvNet* net,
                    const std::vector<std::string>& emotion_order);

/// Baseline train-emotion x test-emotion accuracy grid plus a column-average
/// row; entry (i, j) trains models on emotion i and scores emotion-j trials.
struct GridReport {
  std::vector<std::string> emotions;
  Matrix accuracy;         // emotions x emotions, percent
  Vector column_average;   // percent, mean over train emotions
};

GridReport grid_evaluate(const std::vector<CompEmbedding>& enroll,
                         const std::vector<Trial>& trials,
                         const std::vector<std::string>& emotion_order);

/// Fixed-width text renderings; all percentages printed with one decimal
/// (half-up).  Layouts are stable so repeated runs diff cleanly.
std::string format_eval_table(const EvalReport& report,
                              const std::string& framework_name);
std::string format_grid_table(const GridReport& report);

/// CSV forms of the same reports.
void write_eval_csv(const std::string& path, const EvalReport& report,
                    const std::string& framework_name);
void write_grid_csv(const std::string& path, const GridReport& report);

}  // namespace eiv

#endif  // EIV_IDENT_HPP
