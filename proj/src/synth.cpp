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

#include "eiv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace eiv {

void SynthConfig::validate() const {
  if (n_speakers < 2) throw ConfigError("synth: n_speakers must be >= 2");
  if (n_speakers > 999 || background_speakers > 999) {
    throw ConfigError("synth: speaker counts above 999 are not supported");
  }
  if (emotions.empty()) throw ConfigError("synth: emotion list is empty");
  std::set<std::string> uniq(emotions.begin(), emotions.end());
  if (uniq.size() != emotions.size()) {
    throw ConfigError("synth: duplicate emotion labels");
  }
  for (const auto& e : emotions) {
    if (e.empty() || e.find(',') != std::string::npos ||
        e.find('_') != std::string::npos) {
      throw ConfigError("synth: emotion labels must be nonempty and free of "
                        "',' and '_'");
    }
  }
  if (feature_dim < 1) throw ConfigError("synth: feature_dim must be >= 1");
  if (!(speaker_spread > 0) || !(within_noise > 0)) {
    throw ConfigError("synth: speaker_spread and within_noise must be > 0");
  }
  if (emotion_shift < 0) throw ConfigError("synth: emotion_shift must be >= 0");
  if (frames_per_utterance < 1) {
    throw ConfigError("synth: frames_per_utterance must be >= 1");
  }
  if (train_utts < 1 || test_utts < 1) {
    throw ConfigError("synth: train_utts and test_utts must be >= 1");
  }
  if (background_speakers < 0) {
    throw ConfigError("synth: background_speakers must be >= 0");
  }
  if (background_speakers > 0 && (background_utts < 1 || background_frames < 1)) {
    throw ConfigError("synth: background_utts and background_frames must be "
                      ">= 1 when a background population is requested");
  }
}

namespace {

std::string speaker_name(const char* prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, index);
  return buf;
}

Matrix draw_matrix(int rows, int cols, double scale, Rng* rng) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = scale * rng->gaussian();
  }
  return m;
}

}  // namespace

Vector emotion_offset(const GeneratorTruth& truth, const std::string& emotion) {
  for (size_t i = 0; i < truth.emotion_labels.size(); ++i) {
    if (truth.emotion_labels[i] == emotion) {
      return truth.emotion_offsets.row(i);
    }
  }
  throw InputError("emotion_offset: unknown emotion label '" + emotion + "'");
}

GeneratorTruth build_truth(const SynthConfig& cfg) {
  cfg.validate();
  GeneratorTruth truth;
  for (int s = 0; s < cfg.n_speakers; ++s) {
    truth.speaker_names.push_back(speaker_name("spk", s));
  }
  for (int s = 0; s < cfg.background_speakers; ++s) {
    truth.background_names.push_back(speaker_name("bg", s));
  }

  {
    Rng rng(derive_seed(cfg.seed, "synth-centroids"));
    truth.centroids =
        draw_matrix(cfg.n_speakers, cfg.feature_dim, cfg.speaker_spread, &rng);
  }
  {
    // Separate stream: the enrolled population is unchanged by the
    // background size and vice versa.
    Rng rng(derive_seed(cfg.seed, "synth-bg-centroids"));
    truth.background_centroids = draw_matrix(
        cfg.background_speakers, cfg.feature_dim, cfg.speaker_spread, &rng);
  }
  {
    Rng rng(derive_seed(cfg.seed, "synth-offsets"));
    truth.emotion_labels = cfg.emotions;
    truth.emotion_offsets =
        Matrix::Zero(static_cast<int>(cfg.emotions.size()), cfg.feature_dim);
    for (size_t e = 0; e < cfg.emotions.size(); ++e) {
      // Neutral is the identity condition: no draws consumed, so the other
      // offsets do not depend on whether "N" appears in the label list.
      if (cfg.emotions[e] == "N") continue;
      for (int d = 0; d < cfg.feature_dim; ++d) {
        truth.emotion_offsets(static_cast<int>(e), d) =
            cfg.emotion_shift * rng.gaussian();
      }
    }
  }
  return truth;
}

std::vector<UttPlan> plan_corpus(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<UttPlan> plans;
  for (int s = 0; s < cfg.background_speakers; ++s) {
    for (int u = 0; u < cfg.background_utts; ++u) {
      UttPlan p;
      p.speaker = speaker_name("bg", s);
      p.emotion = "N";
      p.split = "background";
      p.frames = cfg.background_frames;
      p.id = p.speaker + "_N_b" + std::to_string(u);
      plans.push_back(std::move(p));
    }
  }
  for (int s = 0; s < cfg.n_speakers; ++s) {
    for (const auto& emo : cfg.emotions) {
      for (int u = 0; u < cfg.train_utts; ++u) {
        UttPlan p;
        p.speaker = speaker_name("spk", s);
        p.emotion = emo;
        p.split = "train";
        p.frames = cfg.frames_per_utterance;
        p.id = p.speaker + "_" + emo + "_t" + std::to_string(u);
        plans.push_back(std::move(p));
      }
    }
  }
  for (int s = 0; s < cfg.n_speakers; ++s) {
    for (const auto& emo : cfg.emotions) {
      for (int u = 0; u < cfg.test_utts; ++u) {
        UttPlan p;
        p.speaker = speaker_name("spk", s);
        p.emotion = emo;
        p.split = "test";
        p.frames = cfg.frames_per_utterance;
        p.id = p.speaker + "_" + emo + "_e" + std::to_string(u);
        plans.push_back(std::move(p));
      }
    }
  }
  return plans;
}

SynthUtterance realize_utterance(const SynthConfig& cfg,
                                 const GeneratorTruth& truth,
                                 const UttPlan& plan) {
  Vector mean(cfg.feature_dim);
  if (plan.split == "background") {
    int idx = -1;
    for (size_t i = 0; i < truth.background_names.size(); ++i) {
      if (truth.background_names[i] == plan.speaker) {
        idx = static_cast<int>(i);
        break;
      }
    }
    if (idx < 0) {
      throw InputError("realize_utterance: unknown background speaker " +
                       plan.speaker);
    }
    mean = truth.background_centroids.row(idx);
  } else {
    int idx = -1;
    for (size_t i = 0; i < truth.speaker_names.size(); ++i) {
      if (truth.speaker_names[i] == plan.speaker) {
        idx = static_cast<int>(i);
        break;
      }
    }
    if (idx < 0) {
      throw InputError("realize_utterance: unknown speaker " + plan.speaker);
    }
    mean = truth.centroids.row(idx).transpose() +
           emotion_offset(truth, plan.emotion);
  }

  SynthUtterance utt;
  utt.speaker = plan.speaker;
  utt.emotion = plan.emotion;
  utt.split = plan.split;
  utt.features.utterance_id = plan.id;
  utt.features.frames.resize(plan.frames, cfg.feature_dim);
  utt.features.vad_mask.assign(plan.frames, 1);

  Rng rng(derive_seed(cfg.seed, "synth-utt-" + plan.id));
  for (int t = 0; t < plan.frames; ++t) {
    for (int d = 0; d < cfg.feature_dim; ++d) {
      utt.features.frames(t, d) = mean(d) + cfg.within_noise * rng.gaussian();
    }
  }
  return utt;
}

SynthCorpus generate(const SynthConfig& cfg) {
  SynthCorpus corpus;
  corpus.truth = build_truth(cfg);
  const auto plans = plan_corpus(cfg);
  corpus.utterances.reserve(plans.size());
  for (const auto& p : plans) {
    corpus.utterances.push_back(realize_utterance(cfg, corpus.truth, p));
  }
  return corpus;
}

std::string oracle_identify(const GeneratorTruth& truth,
                            const SynthUtterance& utt) {
  if (truth.speaker_names.empty()) {
    throw InputError("oracle_identify: no enrolled speakers in truth");
  }
  const Vector mean = utt.features.frames.colwise().mean();
  const Vector adjusted = mean - emotion_offset(truth, utt.emotion);

  int best = 0;
  double best_d2 = (truth.centroids.row(0).transpose() - adjusted).squaredNorm();
  for (int s = 1; s < truth.centroids.rows(); ++s) {
    const double d2 =
        (truth.centroids.row(s).transpose() - adjusted).squaredNorm();
    // Names are generated sorted, so "first strictly better" implements the
    // lexicographic tie-break.
    if (d2 < best_d2) {
      best = s;
      best_d2 = d2;
    }
  }
  return truth.speaker_names[best];
}

void AudioSynthConfig::validate() const {
  if (sample_rate < 1000) throw ConfigError("synth audio: sample_rate too low");
  if (!(utt_seconds > 0) || silence_seconds < 0) {
    throw ConfigError("synth audio: invalid durations");
  }
  if (n_tones < 1) throw ConfigError("synth audio: n_tones must be >= 1");
}

std::vector<AudioClip> generate_audio(const SynthConfig& cfg,
                                      const AudioSynthConfig& acfg,
                                      std::vector<UttPlan>* plans_out) {
  cfg.validate();
  acfg.validate();
  const auto plans = plan_corpus(cfg);

  // Band placement: speakers tile [300, 0.8*Nyquist] and emotions nudge the
  // band upward, so every (speaker, emotion) cell is spectrally distinct.
  const double nyquist = acfg.sample_rate / 2.0;
  const double lo = 300.0;
  const double hi = 0.8 * nyquist;
  const int total_speakers = cfg.n_speakers + cfg.background_speakers;
  const double spk_step = (hi - lo) / std::max(1, total_speakers);

  std::vector<AudioClip> clips;
  clips.reserve(plans.size());
  for (const auto& plan : plans) {
    int spk_idx;
    if (plan.split == "background") {
      spk_idx = cfg.n_speakers + std::stoi(plan.speaker.substr(2));
    } else {
      spk_idx = std::stoi(plan.speaker.substr(3));
    }
    int emo_idx = 0;
    for (size_t e = 0; e < cfg.emotions.size(); ++e) {
      if (cfg.emotions[e] == plan.emotion) emo_idx = static_cast<int>(e);
    }
    const double center = lo + (spk_idx + 0.5) * spk_step +
                          emo_idx * 0.2 * spk_step;
    const double half_width = 0.15 * spk_step;

    const int n_sil = static_cast<int>(acfg.silence_seconds * acfg.sample_rate);
    const int n_burst = static_cast<int>(acfg.utt_seconds * acfg.sample_rate);

    AudioClip clip;
    clip.sample_rate = acfg.sample_rate;
    clip.id = plan.id;
    clip.samples.assign(n_burst + 2 * n_sil, 0.0);

    Rng rng(derive_seed(cfg.seed, "synth-wav-" + plan.id));
    std::vector<double> freq(acfg.n_tones), phase(acfg.n_tones), amp(acfg.n_tones);
    for (int i = 0; i < acfg.n_tones; ++i) {
      freq[i] = rng.uniform(center - half_width, center + half_width);
      phase[i] = rng.uniform(0.0, 2.0 * M_PI);
      amp[i] = rng.uniform(0.5, 1.0);
    }
    for (int n = 0; n < n_burst; ++n) {
      const double t = static_cast<double>(n) / acfg.sample_rate;
      double v = 0.0;
      for (int i = 0; i < acfg.n_tones; ++i) {
        v += amp[i] * std::sin(2.0 * M_PI * freq[i] * t + phase[i]);
      }
      clip.samples[n_sil + n] = 0.3 * v / acfg.n_tones;
    }
    clips.push_back(std::move(clip));
  }
  if (plans_out != nullptr) *plans_out = plans;
  return clips;
}

}  // namespace eiv
