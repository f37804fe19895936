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

#include "eiv/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eiv/config.hpp"
#include "eiv/experiment.hpp"
#include "eiv/gmm.hpp"
#include "eiv/io.hpp"
#include "eiv/manifest.hpp"
#include "eiv/synth.hpp"
#include "eiv/tv.hpp"
#include "eiv/wav.hpp"

namespace eiv {

namespace fs = std::filesystem;

namespace {

// Relative manifest entries resolve against the manifest's own directory.
std::string resolve(const std::string& base_file, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute()) return rel;
  return (fs::path(base_file).parent_path() / p).string();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig();
  return parse_config_file(path);
}

// Loads the i-vector for every manifest row of `split` ("" = all rows).
struct LabeledIvec {
  IVector iv;
  ManifestRow row;
};

std::vector<LabeledIvec> load_ivectors(const Manifest& manifest,
                                       const std::string& manifest_path,
                                       const std::string& split,
                                       const std::string& ivec_dir) {
  std::vector<LabeledIvec> out;
  for (const auto& row : manifest.rows) {
    if (!split.empty() && row.split != split) continue;
    const std::string id = utterance_id_from_path(row.path_or_id);
    const fs::path path = fs::path(ivec_dir) / (id + ".eivb");
    LabeledIvec li;
    li.iv.w = read_matrix(path.string()).col(0);
    li.iv.utterance_id = id;
    li.row = row;
    out.push_back(std::move(li));
  }
  if (out.empty()) {
    throw InputError("no manifest rows matched split '" + split + "' in " +
                     manifest_path);
  }
  return out;
}

std::vector<CompEmbedding> compensate_all(const std::vector<LabeledIvec>& ivecs,
                                          const LdaTransform& lda,
                                          const WccnTransform& wccn) {
  std::vector<CompEmbedding> out;
  out.reserve(ivecs.size());
  for (const auto& li : ivecs) {
    CompEmbedding e = apply_compensation(li.iv, lda, wccn);
    e.speaker = li.row.speaker;
    e.emotion = li.row.emotion;
    out.push_back(std::move(e));
  }
  return out;
}

void write_models(const std::string& prefix,
                  const std::vector<SpeakerModel>& models) {
  Matrix m(static_cast<int>(models.size()), models[0].e.size());
  std::ofstream names(prefix + ".txt");
  if (!names) throw IoError("cannot open " + prefix + ".txt");
  for (size_t i = 0; i < models.size(); ++i) {
    m.row(static_cast<int>(i)) = models[i].e.transpose();
    names << models[i].speaker << "\n";
  }
  if (!names) throw IoError("write failed for " + prefix + ".txt");
  write_matrix(prefix + ".eivb", m);
}

std::vector<SpeakerModel> load_models(const std::string& prefix) {
  const Matrix m = read_matrix(prefix + ".eivb");
  std::ifstream names(prefix + ".txt");
  if (!names) throw IoError("cannot open " + prefix + ".txt");
  std::vector<SpeakerModel> models;
  std::string line;
  while (std::getline(names, line)) {
    if (line.empty()) continue;
    SpeakerModel sm;
    sm.speaker = line;
    models.push_back(std::move(sm));
  }
  if (static_cast<int>(models.size()) != m.rows()) {
    throw FormatError("model name list " + prefix + ".txt has " +
                      std::to_string(models.size()) + " entries but " + prefix +
                      ".eivb has " + std::to_string(m.rows()) + " rows");
  }
  for (size_t i = 0; i < models.size(); ++i) {
    models[i].e = m.row(static_cast<int>(i)).transpose();
  }
  return models;
}

// ---------------------------------------------------------------------------
// Subcommand implementations.  Each prints a one-line summary on success.
// ---------------------------------------------------------------------------

void cmd_synth_gen(const std::string& config_path, uint64_t seed,
                   const std::string& out_dir, bool audio) {
  ExperimentConfig cfg = load_config(config_path);
  SynthConfig synth_cfg = cfg.synth;
  synth_cfg.seed = seed;

  ensure_dir(out_dir);
  Manifest manifest;

  if (audio) {
    ensure_dir(fs::path(out_dir) / "wavs");
    std::vector<UttPlan> plans;
    AudioSynthConfig acfg;
    const auto clips = generate_audio(synth_cfg, acfg, &plans);
    for (size_t i = 0; i < clips.size(); ++i) {
      const std::string rel = "wavs/" + plans[i].id + ".wav";
      write_wav((fs::path(out_dir) / rel).string(), clips[i]);
      ManifestRow row;
      row.path_or_id = rel;
      row.speaker = plans[i].speaker;
      row.emotion = plans[i].emotion;
      row.split = plans[i].split;
      row.duration_s =
          static_cast<double>(clips[i].samples.size()) / clips[i].sample_rate;
      manifest.rows.push_back(std::move(row));
    }
  } else {
    ensure_dir(fs::path(out_dir) / "feats");
    const GeneratorTruth truth = build_truth(synth_cfg);
    const auto plans = plan_corpus(synth_cfg);
    for (const auto& plan : plans) {
      const SynthUtterance utt = realize_utterance(synth_cfg, truth, plan);
      const std::string rel = "feats/" + plan.id + ".eivb";
      write_features((fs::path(out_dir) / rel).string(), utt.features);
      ManifestRow row;
      row.path_or_id = rel;
      row.speaker = plan.speaker;
      row.emotion = plan.emotion;
      row.split = plan.split;
      row.duration_s = plan.frames * cfg.feature.frame_shift_ms / 1000.0;
      manifest.rows.push_back(std::move(row));
    }
  }
  const std::string manifest_path = (fs::path(out_dir) / "manifest.csv").string();
  write_manifest(manifest_path, manifest);
  std::cout << "synth-gen: wrote " << manifest.rows.size() << " "
            << (audio ? "audio clips" : "feature files") << " and "
            << manifest_path << "\n";
}

void cmd_featurize(const std::string& config_path,
                   const std::string& manifest_path,
                   const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  const Manifest manifest = read_manifest(manifest_path);
  ensure_dir(fs::path(out_dir) / "feats");

  Manifest out_manifest;
  for (const auto& row : manifest.rows) {
    const AudioClip clip = read_wav(resolve(manifest_path, row.path_or_id));
    const FeatureMatrix f = feature_chain(clip, cfg.feature);
    const std::string rel = "feats/" + clip.id + ".eivb";
    write_features((fs::path(out_dir) / rel).string(), f);
    ManifestRow out_row = row;
    out_row.path_or_id = rel;
    out_row.duration_s =
        static_cast<double>(clip.samples.size()) / clip.sample_rate;
    out_manifest.rows.push_back(std::move(out_row));
  }
  const std::string out_path = (fs::path(out_dir) / "manifest.csv").string();
  write_manifest(out_path, out_manifest);
  std::cout << "featurize: processed " << out_manifest.rows.size()
            << " clips into " << out_dir << "/feats\n";
}

void cmd_train_ubm(const std::string& config_path,
                   const std::string& manifest_path, uint64_t seed,
                   const std::string& out_dir, const std::string& split) {
  const ExperimentConfig cfg = load_config(config_path);
  const Manifest manifest = read_manifest(manifest_path);
  std::vector<FeatureMatrix> features;
  long total_frames = 0;
  for (const auto& row : manifest.rows) {
    if (!split.empty() && row.split != split) continue;
    const std::string id = utterance_id_from_path(row.path_or_id);
    features.push_back(
        read_features(resolve(manifest_path, row.path_or_id), id));
    total_frames += features.back().frames.rows();
  }
  if (features.empty()) {
    throw InputError("train-ubm: no rows with split '" + split + "' in " +
                     manifest_path);
  }
  const EmResult res = em_fit(features, cfg.ubm_components, cfg.ubm_iterations,
                              derive_seed(seed, "ubm"));
  ensure_dir(out_dir);
  const std::string ubm_path = (fs::path(out_dir) / "ubm.eivb").string();
  write_gmm(ubm_path, res.gmm);
  std::cout << "train-ubm: " << cfg.ubm_components << " components on "
            << total_frames << " frames, final avg loglik "
            << res.avg_loglik.back() << ", wrote " << ubm_path << "\n";
}

void cmd_accumulate_stats(const std::string& config_path,
                          const std::string& manifest_path,
                          const std::string& ubm_path,
                          const std::string& out_dir, const std::string& split,
                          bool segments) {
  const ExperimentConfig cfg = load_config(config_path);
  const Manifest manifest = read_manifest(manifest_path);
  const DiagGmm ubm = read_gmm(ubm_path);
  ensure_dir(fs::path(out_dir) / "stats");

  Manifest seg_manifest;
  int n_stats = 0;
  for (const auto& row : manifest.rows) {
    if (!split.empty() && row.split != split) continue;
    const std::string id = utterance_id_from_path(row.path_or_id);
    const FeatureMatrix f =
        read_features(resolve(manifest_path, row.path_or_id), id);
    if (segments) {
      const int win = cfg.segment_window_frames();
      const int hop = cfg.segment_hop_frames();
      const auto segs =
          split_segments(static_cast<int>(f.frames.rows()), win, hop);
      for (size_t k = 0; k < segs.size(); ++k) {
        FeatureMatrix seg;
        seg.frames = f.frames.middleRows(segs[k].start, segs[k].length);
        seg.vad_mask.assign(segs[k].length, 1);
        seg.utterance_id = id + "_s" + std::to_string(k);
        const BwStats stats = accumulate_stats(ubm, seg);
        write_stats((fs::path(out_dir) / "stats" /
                     (seg.utterance_id + ".eivb")).string(),
                    stats);
        ManifestRow seg_row = row;
        seg_row.path_or_id = seg.utterance_id;
        seg_row.duration_s =
            segs[k].length * cfg.feature.frame_shift_ms / 1000.0;
        seg_manifest.rows.push_back(std::move(seg_row));
        ++n_stats;
      }
    } else {
      const BwStats stats = accumulate_stats(ubm, f);
      write_stats((fs::path(out_dir) / "stats" / (id + ".eivb")).string(),
                  stats);
      ++n_stats;
    }
  }
  if (n_stats == 0) {
    throw InputError("accumulate-stats: no rows with split '" + split +
                     "' in " + manifest_path);
  }
  if (segments) {
    const std::string seg_path =
        (fs::path(out_dir) / "segments.csv").string();
    write_manifest(seg_path, seg_manifest);
    std::cout << "accumulate-stats: wrote " << n_stats
              << " segment stats and " << seg_path << "\n";
  } else {
    std::cout << "accumulate-stats: wrote " << n_stats << " stats files to "
              << out_dir << "/stats\n";
  }
}

void cmd_train_tv(const std::string& config_path,
                  const std::string& manifest_path,
                  const std::string& stats_dir, const std::string& ubm_path,
                  uint64_t seed, const std::string& out_dir,
                  const std::string& split) {
  const ExperimentConfig cfg = load_config(config_path);
  const Manifest manifest = read_manifest(manifest_path);
  const DiagGmm ubm = read_gmm(ubm_path);
  std::vector<BwStats> stats;
  for (const auto& row : manifest.rows) {
    if (!split.empty() && row.split != split) continue;
    const std::string id = utterance_id_from_path(row.path_or_id);
    stats.push_back(
        read_stats((fs::path(stats_dir) / (id + ".eivb")).string(), id));
  }
  if (stats.empty()) {
    throw InputError("train-tv: no rows with split '" + split + "' in " +
                     manifest_path);
  }
  const TvModel tv = train_tv(stats, ubm, cfg.tv_rank, cfg.tv_iterations,
                              derive_seed(seed, "tv"));
  ensure_dir(out_dir);
  const std::string tv_path = (fs::path(out_dir) / "tv.eivb").string();
  write_tv(tv_path, tv);
  std::cout << "train-tv: rank " << cfg.tv_rank << " from " << stats.size()
            << " utterances, wrote " << tv_path << "\n";
}

void cmd_extract_ivectors(const std::string& manifest_path,
                          const std::string& stats_dir,
                          const std::string& tv_path,
                          const std::string& out_dir,
                          const std::string& split) {
  const Manifest manifest = read_manifest(manifest_path);
  const TvModel tv = read_tv(tv_path);
  const IvectorExtractor extractor(tv);
  ensure_dir(fs::path(out_dir) / "ivecs");
  int n = 0;
  for (const auto& row : manifest.rows) {
    if (!split.empty() && row.split != split) continue;
    const std::string id = utterance_id_from_path(row.path_or_id);
    const BwStats stats =
        read_stats((fs::path(stats_dir) / (id + ".eivb")).string(), id);
    const IVector iv = extractor.extract(stats);
    write_matrix((fs::path(out_dir) / "ivecs" / (id + ".eivb")).string(),
                 iv.w);
    ++n;
  }
  if (n == 0) {
    throw InputError("extract-ivectors: no rows with split '" + split +
                     "' in " + manifest_path);
  }
  std::cout << "extract-ivectors: wrote " << n << " i-vectors to " << out_dir
            << "/ivecs\n";
}

void cmd_train_backend(const std::string& config_path,
                       const std::string& manifest_path,
                       const std::string& ivec_dir,
                       const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  const Manifest manifest = read_manifest(manifest_path);
  const auto labeled =
      load_ivectors(manifest, manifest_path, "background", ivec_dir);

  std::vector<IVector> ivecs;
  std::vector<std::string> speakers;
  for (const auto& li : labeled) {
    ivecs.push_back(li.iv);
    speakers.push_back(li.row.speaker);
  }
  const LdaTransform lda = fit_lda(ivecs, speakers, cfg.lda_dim);
  std::vector<Vector> lda_space;
  lda_space.reserve(ivecs.size());
  for (const auto& iv : ivecs) {
    lda_space.push_back(lda.basis.transpose() * (iv.w - lda.mean));
  }
  const WccnTransform wccn = fit_wccn(lda_space, speakers);

  ensure_dir(out_dir);
  const std::string lda_path = (fs::path(out_dir) / "lda.eivb").string();
  const std::string wccn_path = (fs::path(out_dir) / "wccn.eivb").string();
  write_lda(lda_path, lda);
  write_wccn(wccn_path, wccn);
  std::cout << "train-backend: LDA " << lda.in_dim() << "->" << lda.out_dim()
            << " and WCCN from " << ivecs.size() << " background i-vectors\n";
}

void cmd_train_einv(const std::string& config_path,
                    const std::string& manifest_path,
                    const std::string& ivec_dir, const std::string& lda_path,
                    const std::string& wccn_path, uint64_t seed,
                    const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  const Manifest manifest = read_manifest(manifest_path);
  const LdaTransform lda = read_lda(lda_path);
  const WccnTransform wccn = read_wccn(wccn_path);

  const auto labeled = load_ivectors(manifest, manifest_path, "train", ivec_dir);
  const auto segments = compensate_all(labeled, lda, wccn);

  AugmentConfig aug;
  aug.num_pairs = cfg.einv_num_pairs;
  aug.k_min = cfg.einv_k_min;
  aug.k_max = cfg.einv_k_max;
  aug.neutral_label = cfg.baseline_emotion;
  aug.seed = derive_seed(seed, "augment");
  const auto pairs = augment(segments, aug);

  EinvTrainConfig einv_cfg = cfg.einv;
  einv_cfg.seed = derive_seed(seed, "einv");
  const EinvTrainResult res = train_einv(pairs, einv_cfg);

  ensure_dir(out_dir);
  const std::string net_path = (fs::path(out_dir) / "einv.eivb").string();
  write_einv(net_path, res.net);
  write_loss_csv((fs::path(out_dir) / "einv_loss.csv").string(),
                 res.train_loss, res.valid_loss);
  std::cout << "train-einv: " << pairs.size() << " pairs, " << cfg.einv.epochs
            << " epochs, final valid loss " << res.valid_loss.back()
            << ", wrote " << net_path << "\n";
}

void cmd_enroll(const std::string& config_path,
                const std::string& manifest_path, const std::string& ivec_dir,
                const std::string& lda_path, const std::string& wccn_path,
                const std::string& einv_path, const std::string& framework,
                const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  const Framework fw = framework_from_string(framework);
  const Manifest manifest = read_manifest(manifest_path);
  const LdaTransform lda = read_lda(lda_path);
  const WccnTransform wccn = read_wccn(wccn_path);

  EinvNet net;
  const bool needs_net = (fw == Framework::kEinvPair);
  if (!einv_path.empty()) net = read_einv(einv_path);
  if (needs_net && einv_path.empty()) {
    throw ConfigError("enroll: --einv is required for framework " + framework);
  }

  const auto labeled = load_ivectors(manifest, manifest_path, "train", ivec_dir);
  const auto enroll = compensate_all(labeled, lda, wccn);
  const auto models = build_models(enroll, fw, cfg.baseline_emotion,
                                   einv_path.empty() ? nullptr : &net);

  ensure_dir(out_dir);
  const std::string prefix =
      (fs::path(out_dir) / ("models_" + framework)).string();
  write_models(prefix, models);
  std::cout << "enroll: built " << models.size() << " speaker models ("
            << framework << "), wrote " << prefix << ".eivb\n";
}

void cmd_evaluate(const std::string& config_path,
                  const std::string& manifest_path, const std::string& ivec_dir,
                  const std::string& lda_path, const std::string& wccn_path,
                  const std::string& einv_path, const std::string& models_prefix,
                  const std::string& framework, uint64_t seed,
                  const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  const Framework fw = framework_from_string(framework);
  const Manifest manifest = read_manifest(manifest_path);
  const LdaTransform lda = read_lda(lda_path);
  const WccnTransform wccn = read_wccn(wccn_path);

  EinvNet net;
  const bool needs_net =
      (fw == Framework::kEinvTest || fw == Framework::kEinvPair);
  if (!einv_path.empty()) net = read_einv(einv_path);
  if (needs_net && einv_path.empty()) {
    throw ConfigError("evaluate: --einv is required for framework " +
                      framework);
  }

  const auto labeled = load_ivectors(manifest, manifest_path, "test", ivec_dir);
  std::vector<Trial> trials;
  for (const auto& li : labeled) {
    CompEmbedding e = apply_compensation(li.iv, lda, wccn);
    Trial t;
    t.e = std::move(e.e);
    t.utterance_id = li.iv.utterance_id;
    t.speaker = li.row.speaker;
    t.emotion = li.row.emotion;
    trials.push_back(std::move(t));
  }

  const auto models = load_models(models_prefix);
  const EvalReport report = evaluate(trials, models, fw,
                                     needs_net ? &net : nullptr, cfg.emotions);

  ensure_dir(out_dir);
  const std::string table = format_eval_table(report, framework);
  const std::string txt_path =
      (fs::path(out_dir) / ("report_" + framework + ".txt")).string();
  {
    std::ofstream out(txt_path);
    if (!out) throw IoError("cannot open " + txt_path);
    out << "seed: " << seed << "\n" << table;
    if (!out) throw IoError("write failed for " + txt_path);
  }
  write_eval_csv((fs::path(out_dir) / ("report_" + framework + ".csv")).string(),
                 report, framework);
  std::cout << table;
  std::cout << "evaluate: " << trials.size() << " trials, macro average "
            << format_accuracy(report.average) << ", wrote " << txt_path
            << "\n";
}

void cmd_grid_eval(const std::string& config_path,
                   const std::string& manifest_path,
                   const std::string& ivec_dir, const std::string& lda_path,
                   const std::string& wccn_path, uint64_t seed,
                   const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  const Manifest manifest = read_manifest(manifest_path);
  const LdaTransform lda = read_lda(lda_path);
  const WccnTransform wccn = read_wccn(wccn_path);

  const auto enroll_labeled =
      load_ivectors(manifest, manifest_path, "train", ivec_dir);
  const auto enroll = compensate_all(enroll_labeled, lda, wccn);

  const auto test_labeled =
      load_ivectors(manifest, manifest_path, "test", ivec_dir);
  std::vector<Trial> trials;
  for (const auto& li : test_labeled) {
    CompEmbedding e = apply_compensation(li.iv, lda, wccn);
    Trial t;
    t.e = std::move(e.e);
    t.utterance_id = li.iv.utterance_id;
    t.speaker = li.row.speaker;
    t.emotion = li.row.emotion;
    trials.push_back(std::move(t));
  }

  const GridReport grid = grid_evaluate(enroll, trials, cfg.emotions);

  ensure_dir(out_dir);
  const std::string table = format_grid_table(grid);
  const std::string txt_path = (fs::path(out_dir) / "grid.txt").string();
  {
    std::ofstream out(txt_path);
    if (!out) throw IoError("cannot open " + txt_path);
    out << "seed: " << seed << "\n" << table;
    if (!out) throw IoError("write failed for " + txt_path);
  }
  write_grid_csv((fs::path(out_dir) / "grid.csv").string(), grid);
  std::cout << table;
  std::cout << "grid-eval: " << trials.size() << " trials, wrote " << txt_path
            << "\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"emotion-invariant speaker identification toolkit"};
  app.require_subcommand(1);

  // Shared option storage; each subcommand binds the flags it uses.  Options
  // with per-command defaults get their own variable so one subcommand's
  // default cannot leak into another's.
  std::string config_path, manifest_path, out_dir;
  std::string ubm_path, stats_dir, tv_path, ivec_dir, lda_path, wccn_path;
  std::string einv_path, models_prefix, framework = "avg-ivec";
  std::string ubm_split = "background";
  std::string tv_split = "background";
  std::string stats_split;    // empty = all rows
  std::string extract_split;  // empty = all rows
  uint64_t seed = 0;
  bool audio = false;
  bool segments = false;

  CLI::App* synth_gen =
      app.add_subcommand("synth-gen", "generate a synthetic corpus");
  synth_gen->add_option("--config", config_path, "config file");
  synth_gen->add_option("--seed", seed, "root seed");
  synth_gen->add_option("--out", out_dir, "output directory")->required();
  synth_gen->add_flag("--audio", audio, "emit wav files instead of features");

  CLI::App* featurize =
      app.add_subcommand("featurize", "extract features from wav files");
  featurize->add_option("--config", config_path, "config file");
  featurize->add_option("--manifest", manifest_path, "wav manifest")->required();
  featurize->add_option("--out", out_dir, "output directory")->required();

  CLI::App* train_ubm =
      app.add_subcommand("train-ubm", "train the diagonal UBM");
  train_ubm->add_option("--config", config_path, "config file");
  train_ubm->add_option("--manifest", manifest_path, "feature manifest")
      ->required();
  train_ubm->add_option("--split", ubm_split,
                        "manifest split (default background)");
  train_ubm->add_option("--seed", seed, "root seed");
  train_ubm->add_option("--out", out_dir, "output directory")->required();

  CLI::App* acc_stats = app.add_subcommand(
      "accumulate-stats", "zeroth/first-order statistics per utterance");
  acc_stats->add_option("--config", config_path, "config file");
  acc_stats->add_option("--manifest", manifest_path, "feature manifest")
      ->required();
  acc_stats->add_option("--ubm", ubm_path, "ubm.eivb")->required();
  acc_stats->add_option("--split", stats_split, "manifest split ('' = all)");
  acc_stats->add_flag("--segments", segments,
                      "split utterances into sliding windows first");
  acc_stats->add_option("--out", out_dir, "output directory")->required();

  CLI::App* train_tv_cmd = app.add_subcommand(
      "train-tv", "train the total-variability matrix");
  train_tv_cmd->add_option("--config", config_path, "config file");
  train_tv_cmd->add_option("--manifest", manifest_path, "feature manifest")
      ->required();
  train_tv_cmd->add_option("--split", tv_split,
                           "manifest split (default background)");
  train_tv_cmd->add_option("--stats", stats_dir, "stats directory")->required();
  train_tv_cmd->add_option("--ubm", ubm_path, "ubm.eivb")->required();
  train_tv_cmd->add_option("--seed", seed, "root seed");
  train_tv_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI::App* extract = app.add_subcommand(
      "extract-ivectors", "extract i-vectors from saved statistics");
  extract->add_option("--manifest", manifest_path, "feature manifest")
      ->required();
  extract->add_option("--split", extract_split, "manifest split ('' = all)");
  extract->add_option("--stats", stats_dir, "stats directory")->required();
  extract->add_option("--tv", tv_path, "tv.eivb")->required();
  extract->add_option("--out", out_dir, "output directory")->required();

  CLI::App* backend = app.add_subcommand(
      "train-backend", "fit LDA and WCCN on background i-vectors");
  backend->add_option("--config", config_path, "config file");
  backend->add_option("--manifest", manifest_path, "feature manifest")
      ->required();
  backend->add_option("--ivecs", ivec_dir, "i-vector directory")->required();
  backend->add_option("--out", out_dir, "output directory")->required();

  CLI::App* train_einv_cmd = app.add_subcommand(
      "train-einv", "train the emotion-invariance net on segment i-vectors");
  train_einv_cmd->add_option("--config", config_path, "config file");
  train_einv_cmd
      ->add_option("--manifest", manifest_path, "segment manifest (train split)")
      ->required();
  train_einv_cmd->add_option("--ivecs", ivec_dir, "segment i-vector directory")
      ->required();
  train_einv_cmd->add_option("--lda", lda_path, "lda.eivb")->required();
  train_einv_cmd->add_option("--wccn", wccn_path, "wccn.eivb")->required();
  train_einv_cmd->add_option("--seed", seed, "root seed");
  train_einv_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI::App* enroll_cmd =
      app.add_subcommand("enroll", "build speaker models from train i-vectors");
  enroll_cmd->add_option("--config", config_path, "config file");
  enroll_cmd->add_option("--manifest", manifest_path, "feature manifest")
      ->required();
  enroll_cmd->add_option("--ivecs", ivec_dir, "i-vector directory")->required();
  enroll_cmd->add_option("--lda", lda_path, "lda.eivb")->required();
  enroll_cmd->add_option("--wccn", wccn_path, "wccn.eivb")->required();
  enroll_cmd->add_option("--einv", einv_path, "einv.eivb (for einv-pair)");
  enroll_cmd
      ->add_option("--framework", framework,
                   "baseline|avg-ivec|einv-test|einv-pair")
      ->required();
  enroll_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "score test trials against models");
  evaluate_cmd->add_option("--config", config_path, "config file");
  evaluate_cmd->add_option("--manifest", manifest_path, "feature manifest")
      ->required();
  evaluate_cmd->add_option("--ivecs", ivec_dir, "i-vector directory")
      ->required();
  evaluate_cmd->add_option("--lda", lda_path, "lda.eivb")->required();
  evaluate_cmd->add_option("--wccn", wccn_path, "wccn.eivb")->required();
  evaluate_cmd->add_option("--einv", einv_path,
                           "einv.eivb (for einv-test/einv-pair)");
  evaluate_cmd->add_option("--models", models_prefix,
                           "model file prefix from enroll")
      ->required();
  evaluate_cmd
      ->add_option("--framework", framework,
                   "baseline|avg-ivec|einv-test|einv-pair")
      ->required();
  evaluate_cmd->add_option("--seed", seed, "root seed (recorded in report)");
  evaluate_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI::App* grid_cmd = app.add_subcommand(
      "grid-eval", "baseline train-emotion x test-emotion accuracy grid");
  grid_cmd->add_option("--config", config_path, "config file");
  grid_cmd->add_option("--manifest", manifest_path, "feature manifest")
      ->required();
  grid_cmd->add_option("--ivecs", ivec_dir, "i-vector directory")->required();
  grid_cmd->add_option("--lda", lda_path, "lda.eivb")->required();
  grid_cmd->add_option("--wccn", wccn_path, "wccn.eivb")->required();
  grid_cmd->add_option("--seed", seed, "root seed (recorded in report)");
  grid_cmd->add_option("--out", out_dir, "output directory")->required();

  std::vector<const char*> argv;
  argv.push_back("eiv");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (app.got_subcommand(synth_gen)) {
      cmd_synth_gen(config_path, seed, out_dir, audio);
    } else if (app.got_subcommand(featurize)) {
      cmd_featurize(config_path, manifest_path, out_dir);
    } else if (app.got_subcommand(train_ubm)) {
      cmd_train_ubm(config_path, manifest_path, seed, out_dir, ubm_split);
    } else if (app.got_subcommand(acc_stats)) {
      cmd_accumulate_stats(config_path, manifest_path, ubm_path, out_dir,
                           stats_split, segments);
    } else if (app.got_subcommand(train_tv_cmd)) {
      cmd_train_tv(config_path, manifest_path, stats_dir, ubm_path, seed,
                   out_dir, tv_split);
    } else if (app.got_subcommand(extract)) {
      cmd_extract_ivectors(manifest_path, stats_dir, tv_path, out_dir,
                           extract_split);
    } else if (app.got_subcommand(backend)) {
      cmd_train_backend(config_path, manifest_path, ivec_dir, out_dir);
    } else if (app.got_subcommand(train_einv_cmd)) {
      cmd_train_einv(config_path, manifest_path, ivec_dir, lda_path, wccn_path,
                     seed, out_dir);
    } else if (app.got_subcommand(enroll_cmd)) {
      cmd_enroll(config_path, manifest_path, ivec_dir, lda_path, wccn_path,
                 einv_path, framework, out_dir);
    } else if (app.got_subcommand(evaluate_cmd)) {
      cmd_evaluate(config_path, manifest_path, ivec_dir, lda_path, wccn_path,
                   einv_path, models_prefix, framework, seed, out_dir);
    } else if (app.got_subcommand(grid_cmd)) {
      cmd_grid_eval(config_path, manifest_path, ivec_dir, lda_path, wccn_path,
                    seed, out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitOk;
}

}  // namespace eiv
