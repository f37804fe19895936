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

#include "eiv/experiment.hpp"

#include <chrono>
#include <sstream>
#include <vector>

#include "eiv/gmm.hpp"
#include "eiv/synth.hpp"
#include "eiv/tv.hpp"

namespace eiv {

namespace {

class StageTimer {
 public:
  explicit StageTimer(const std::string& name)
      : name_(name), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    const double s =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() /
        1000.0;
    std::ostringstream os;
    os << name_ << " done in " << s << " s";
    log_info(os.str());
  }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

FeatureMatrix slice_segment(const FeatureMatrix& f, const SegmentSpec& seg,
                            int index) {
  FeatureMatrix out;
  out.frames = f.frames.middleRows(seg.start, seg.length);
  out.vad_mask.assign(seg.length, 1);
  out.utterance_id = f.utterance_id + "_s" + std::to_string(index);
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, uint64_t seed) {
  cfg.validate();
  SynthConfig synth_cfg = cfg.synth;
  synth_cfg.seed = seed;
  if (synth_cfg.background_speakers < 2) {
    throw ConfigError(
        "run_experiment: the compensation stack needs a background "
        "population (synth.background_speakers >= 2)");
  }

  const GeneratorTruth truth = build_truth(synth_cfg);
  const std::vector<UttPlan> plans = plan_corpus(synth_cfg);

  // --- background: UBM, total variability, LDA, WCCN -----------------------
  DiagGmm ubm;
  TvModel tv;
  LdaTransform lda;
  WccnTransform wccn;
  {
    std::vector<FeatureMatrix> bg_features;
    std::vector<std::string> bg_speakers;
    for (const auto& plan : plans) {
      if (plan.split != "background") continue;
      bg_features.push_back(
          realize_utterance(synth_cfg, truth, plan).features);
      bg_speakers.push_back(plan.speaker);
    }
    {
      StageTimer t("ubm");
      ubm = em_fit(bg_features, cfg.ubm_components, cfg.ubm_iterations,
                   derive_seed(seed, "ubm"))
                .gmm;
    }
    std::vector<BwStats> bg_stats;
    bg_stats.reserve(bg_features.size());
    {
      StageTimer t("background stats");
      for (const auto& f : bg_features) {
        bg_stats.push_back(accumulate_stats(ubm, f));
      }
    }
    bg_features.clear();
    bg_features.shrink_to_fit();
    {
      StageTimer t("tv");
      tv = train_tv(bg_stats, ubm, cfg.tv_rank, cfg.tv_iterations,
                    derive_seed(seed, "tv"));
    }
    {
      StageTimer t("backend");
      IvectorExtractor extractor(tv);
      std::vector<IVector> bg_ivecs;
      bg_ivecs.reserve(bg_stats.size());
      for (const auto& s : bg_stats) bg_ivecs.push_back(extractor.extract(s));
      lda = fit_lda(bg_ivecs, bg_speakers, cfg.lda_dim);
      std::vector<Vector> lda_space;
      lda_space.reserve(bg_ivecs.size());
      for (const auto& iv : bg_ivecs) {
        lda_space.push_back(lda.basis.transpose() * (iv.w - lda.mean));
      }
      wccn = fit_wccn(lda_space, bg_speakers);
    }
  }

  IvectorExtractor extractor(tv);
  auto compensate = [&](const FeatureMatrix& f, const std::string& speaker,
                        const std::string& emotion) {
    const BwStats stats = accumulate_stats(ubm, f);
    const IVector iv = extractor.extract(stats);
    CompEmbedding e = apply_compensation(iv, lda, wccn);
    e.speaker = speaker;
    e.emotion = emotion;
    return e;
  };

  // --- enrollment embeddings and invariance-net segments -------------------
  std::vector<CompEmbedding> enroll;
  std::vector<CompEmbedding> segments;
  {
    StageTimer t("enrollment");
    const int win = cfg.segment_window_frames();
    const int hop = cfg.segment_hop_frames();
    for (const auto& plan : plans) {
      if (plan.split != "train") continue;
      const SynthUtterance utt = realize_utterance(synth_cfg, truth, plan);
      enroll.push_back(compensate(utt.features, utt.speaker, utt.emotion));
      const auto segs =
          split_segments(static_cast<int>(utt.features.frames.rows()), win, hop);
      for (size_t k = 0; k < segs.size(); ++k) {
        const FeatureMatrix seg_f =
            slice_segment(utt.features, segs[k], static_cast<int>(k));
        segments.push_back(compensate(seg_f, utt.speaker, utt.emotion));
      }
    }
  }

  // --- invariance net -------------------------------------------------------
  EinvNet net;
  {
    StageTimer t("einv");
    AugmentConfig aug;
    aug.num_pairs = cfg.einv_num_pairs;
    aug.k_min = cfg.einv_k_min;
    aug.k_max = cfg.einv_k_max;
    aug.neutral_label = cfg.baseline_emotion;
    aug.seed = derive_seed(seed, "augment");
    const std::vector<AugPair> pairs = augment(segments, aug);

    EinvTrainConfig einv_cfg = cfg.einv;
    einv_cfg.seed = derive_seed(seed, "einv");
    net = train_einv(pairs, einv_cfg).net;
  }

  // --- trials ----------------------------------------------------------------
  std::vector<Trial> trials;
  {
    StageTimer t("trials");
    for (const auto& plan : plans) {
      if (plan.split != "test") continue;
      const SynthUtterance utt = realize_utterance(synth_cfg, truth, plan);
      const CompEmbedding e =
          compensate(utt.features, utt.speaker, utt.emotion);
      Trial trial;
      trial.e = e.e;
      trial.utterance_id = utt.features.utterance_id;
      trial.speaker = utt.speaker;
      trial.emotion = utt.emotion;
      trials.push_back(std::move(trial));
    }
  }

  // --- scoring ----------------------------------------------------------------
  ExperimentResult res;
  {
    StageTimer t("scoring");
    const auto baseline_models = build_models(
        enroll, Framework::kBaseline, cfg.baseline_emotion, nullptr);
    const auto avg_models =
        build_models(enroll, Framework::kAvgIvec, "", nullptr);
    const auto pair_models =
        build_models(enroll, Framework::kEinvPair, "", &net);

    res.baseline = evaluate(trials, baseline_models, Framework::kBaseline,
                            nullptr, cfg.emotions);
    res.avg_ivec =
        evaluate(trials, avg_models, Framework::kAvgIvec, nullptr, cfg.emotions);
    res.einv_test =
        evaluate(trials, avg_models, Framework::kEinvTest, &net, cfg.emotions);
    res.einv_pair =
        evaluate(trials, pair_models, Framework::kEinvPair, &net, cfg.emotions);
  }
  return res;
}

}  // namespace eiv
