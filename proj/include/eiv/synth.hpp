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

#ifndef EIV_SYNTH_HPP
#define EIV_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "eiv/common.hpp"
#include "eiv/features.hpp"

namespace eiv {

/// Synthetic corpus: Gaussian speaker clusters in feature space with additive
/// per-emotion offsets shared across speakers, plus a disjoint neutral-only
/// background population for training the session-compensation stack.
struct SynthConfig {
  int n_speakers = 10;
  std::vector<std::string> emotions = {"N", "H", "A", "S"};
  int feature_dim = 39;
  double speaker_spread = 3.0;  // sigma_s: centroid scale
  double emotion_shift = 1.5;   // sigma_e: offset scale; 0 disables shifts
  double within_noise = 1.0;    // sigma_w: per-frame noise
  int frames_per_utterance = 12000;
  int train_utts = 1;  // per (speaker, emotion)
  int test_utts = 8;   // per (speaker, emotion)
  int background_speakers = 200;
  int background_utts = 2;       // per background speaker, neutral only
  int background_frames = 3000;  // background utterances are kept short
  uint64_t seed = 0;

  void validate() const;
};

/// The generating parameters, exposed so oracles can check pipeline output
/// against ground truth.
struct GeneratorTruth {
  std::vector<std::string> speaker_names;  // enrolled, sorted
  Matrix centroids;                        // n_speakers x dim
  std::vector<std::string> background_names;
  Matrix background_centroids;  // background_speakers x dim
  std::vector<std::string> emotion_labels;
  Matrix emotion_offsets;  // one row per label; the "N" row is zero
};

/// Row lookup into truth.emotion_offsets; throws InputError on unknown label.
Vector emotion_offset(const GeneratorTruth& truth, const std::string& emotion);

struct SynthUtterance {
  FeatureMatrix features;
  std::string speaker;
  std::string emotion;
  std::string split;  // "background" | "train" | "test"
};

struct SynthCorpus {
  std::vector<SynthUtterance> utterances;
  GeneratorTruth truth;
};

/// One planned utterance; `realize_utterance` turns it into frames.  Each
/// utterance draws from its own id-derived stream, so corpora can be realized
/// utterance-by-utterance in any order without changing the samples.
struct UttPlan {
  std::string id;
  std::string speaker;
  std::string emotion;
  std::string split;
  int frames = 0;
};

GeneratorTruth build_truth(const SynthConfig& cfg);
std::vector<UttPlan> plan_corpus(const SynthConfig& cfg);
SynthUtterance realize_utterance(const SynthConfig& cfg,
                                 const GeneratorTruth& truth,
                                 const UttPlan& plan);

/// Full corpus in memory (background, then train, then test).
SynthCorpus generate(const SynthConfig& cfg);

/// Ground-truth oracle: nearest enrolled centroid to (frame mean − true
/// emotion offset); ties go to the lexicographically smallest name.
std::string oracle_identify(const GeneratorTruth& truth,
                            const SynthUtterance& utt);

/// Raw-audio mode for exercising the acoustic front end: each (speaker,
/// emotion) pair owns a narrow frequency band and utterances are noise bursts
/// in that band padded with leading/trailing silence.
struct AudioSynthConfig {
  int sample_rate = 16000;
  double utt_seconds = 2.0;
  double silence_seconds = 0.25;  // each side, exercises the VAD
  int n_tones = 24;

  void validate() const;
};

std::vector<AudioClip> generate_audio(const SynthConfig& cfg,
                                      const AudioSynthConfig& acfg,
                                      std::vector<UttPlan>* plans_out);

}  // namespace eiv

#endif  // EIV_SYNTH_HPP
