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

#include "eiv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace eiv {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" +
                      value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" +
                      value + "'");
  }
}

std::vector<std::string> parse_list(const std::string& key,
                                    const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("config key '" + key + "' has an empty list element");
    }
    items.push_back(item);
  }
  if (items.empty()) {
    throw ConfigError("config key '" + key + "' expects a nonempty list");
  }
  return items;
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  for (const auto& item : parse_list(key, value)) {
    out.push_back(parse_int(key, item));
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig*, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"feature.frame_len_ms",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->feature.frame_len_ms = parse_int(k, v);
       }},
      {"feature.frame_shift_ms",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->feature.frame_shift_ms = parse_int(k, v);
       }},
      {"feature.n_cepstra",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->feature.n_cepstra = parse_int(k, v);
       }},
      {"feature.n_mel_filters",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->feature.n_mel_filters = parse_int(k, v);
       }},
      {"feature.preemphasis",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->feature.preemphasis = parse_double(k, v);
       }},
      {"feature.delta_window",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->feature.delta_window = parse_int(k, v);
       }},
      {"feature.vad_dynamic_range_db",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->feature.vad_dynamic_range_db = parse_double(k, v);
       }},
      {"ubm.components",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->ubm_components = parse_int(k, v);
       }},
      {"ubm.iterations",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->ubm_iterations = parse_int(k, v);
       }},
      {"tv.rank",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->tv_rank = parse_int(k, v);
       }},
      {"tv.iterations",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->tv_iterations = parse_int(k, v);
       }},
      {"lda.dim",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->lda_dim = parse_int(k, v);
       }},
      {"einv.hidden_dims",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->einv.hidden_dims = parse_int_list(k, v);
       }},
      {"einv.epochs",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->einv.epochs = parse_int(k, v);
       }},
      {"einv.batch_size",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->einv.batch_size = parse_int(k, v);
       }},
      {"einv.learning_rate",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->einv.learning_rate = parse_double(k, v);
       }},
      {"einv.valid_fraction",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->einv.valid_fraction = parse_double(k, v);
       }},
      {"einv.num_pairs",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->einv_num_pairs = parse_int(k, v);
       }},
      {"einv.k_min",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->einv_k_min = parse_int(k, v);
       }},
      {"einv.k_max",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->einv_k_max = parse_int(k, v);
       }},
      {"einv.segment_window_s",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->segment_window_s = parse_double(k, v);
       }},
      {"einv.segment_hop_s",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->segment_hop_s = parse_double(k, v);
       }},
      {"ident.emotions",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->emotions = parse_list(k, v);
       }},
      {"ident.baseline_emotion",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->baseline_emotion = trim(v);
         if (c->baseline_emotion.empty()) {
           throw ConfigError("config key '" + k + "' expects a label");
         }
       }},
      {"synth.n_speakers",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.n_speakers = parse_int(k, v);
       }},
      {"synth.emotions",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.emotions = parse_list(k, v);
       }},
      {"synth.feature_dim",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.feature_dim = parse_int(k, v);
       }},
      {"synth.speaker_spread",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.speaker_spread = parse_double(k, v);
       }},
      {"synth.emotion_shift",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.emotion_shift = parse_double(k, v);
       }},
      {"synth.within_noise",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.within_noise = parse_double(k, v);
       }},
      {"synth.frames_per_utterance",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.frames_per_utterance = parse_int(k, v);
       }},
      {"synth.train_utts",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.train_utts = parse_int(k, v);
       }},
      {"synth.test_utts",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.test_utts = parse_int(k, v);
       }},
      {"synth.background_speakers",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.background_speakers = parse_int(k, v);
       }},
      {"synth.background_utts",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.background_utts = parse_int(k, v);
       }},
      {"synth.background_frames",
       [](ExperimentConfig* c, const std::string& k, const std::string& v) {
         c->synth.background_frames = parse_int(k, v);
       }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  feature.validate();
  if (ubm_components < 1) throw ConfigError("ubm.components must be >= 1");
  if (ubm_iterations < 1) throw ConfigError("ubm.iterations must be >= 1");
  if (tv_rank < 1) throw ConfigError("tv.rank must be >= 1");
  if (tv_iterations < 1) throw ConfigError("tv.iterations must be >= 1");
  if (lda_dim < 1) throw ConfigError("lda.dim must be >= 1");
  if (lda_dim > tv_rank) {
    throw ConfigError("lda.dim cannot exceed tv.rank (" +
                      std::to_string(tv_rank) + ")");
  }
  einv.validate();
  if (einv_num_pairs < 1) throw ConfigError("einv.num_pairs must be >= 1");
  if (einv_k_min < 1 || einv_k_max < einv_k_min) {
    throw ConfigError("einv.k_min/einv.k_max must satisfy 1 <= k_min <= k_max");
  }
  if (!(segment_window_s > 0) || !(segment_hop_s > 0)) {
    throw ConfigError("einv.segment_window_s and einv.segment_hop_s must be "
                      "positive");
  }
  if (emotions.empty()) throw ConfigError("ident.emotions is empty");
  if (std::find(emotions.begin(), emotions.end(), baseline_emotion) ==
      emotions.end()) {
    throw ConfigError("ident.baseline_emotion '" + baseline_emotion +
                      "' is not in ident.emotions");
  }
  synth.validate();
}

int ExperimentConfig::segment_window_frames() const {
  return static_cast<int>(
      std::lround(segment_window_s * 1000.0 / feature.frame_shift_ms));
}

int ExperimentConfig::segment_hop_frames() const {
  return static_cast<int>(
      std::lround(segment_hop_s * 1000.0 / feature.frame_shift_ms));
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        " has no '=': '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        " has an empty key");
    }
    auto it = key_table().find(key);
    if (it == key_table().end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    it->second(&cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<std::string> config_key_names() {
  std::vector<std::string> names;
  for (const auto& [key, setter] : key_table()) names.push_back(key);
  return names;
}

}  // namespace eiv
