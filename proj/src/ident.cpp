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

#include "eiv/ident.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace eiv {

Framework framework_from_string(const std::string& name) {
  if (name == "baseline") return Framework::kBaseline;
  if (name == "avg-ivec") return Framework::kAvgIvec;
  if (name == "einv-test") return Framework::kEinvTest;
  if (name == "einv-pair") return Framework::kEinvPair;
  throw ConfigError(
      "unknown framework '" + name +
      "' (expected baseline, avg-ivec, einv-test, or einv-pair)");
}

std::string framework_to_string(Framework fw) {
  switch (fw) {
    case Framework::kBaseline: return "baseline";
    case Framework::kAvgIvec: return "avg-ivec";
    case Framework::kEinvTest: return "einv-test";
    case Framework::kEinvPair: return "einv-pair";
  }
  throw ConfigError("framework_to_string: invalid enum value");
}

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw InputError("cosine: dimension mismatch " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw InputError("cosine: zero-norm vector cannot be scored");
  }
  return a.dot(b) / (na * nb);
}

std::vector<SpeakerModel> build_models(const std::vector<CompEmbedding>& enroll,
                                       Framework fw,
                                       const std::string& baseline_emotion,
                                       const EinvNet* net) {
  if (enroll.empty()) throw InputError("build_models: no enrollment data");
  if (fw == Framework::kEinvPair && net == nullptr) {
    throw ConfigError("build_models: einv-pair requires an invariance net");
  }

  // speaker -> accumulated embedding sum and count; std::map gives the sorted
  // model order the tie-break rule depends on.
  std::map<std::string, std::pair<Vector, int>> acc;
  std::set<std::string> all_speakers;
  for (const auto& e : enroll) {
    if (e.speaker.empty()) {
      throw InputError("build_models: utterance " + e.utterance_id +
                       " is missing a speaker label");
    }
    all_speakers.insert(e.speaker);
    if (fw == Framework::kBaseline && e.emotion != baseline_emotion) continue;

    Vector v = e.e;
    if (fw == Framework::kEinvPair) v = net->forward(v);
    auto it = acc.find(e.speaker);
    if (it == acc.end()) {
      acc.emplace(e.speaker, std::make_pair(v, 1));
    } else {
      it->second.first += v;
      it->second.second += 1;
    }
  }

  if (fw == Framework::kBaseline) {
    for (const auto& spk : all_speakers) {
      if (acc.find(spk) == acc.end()) {
        throw InputError("build_models: speaker " + spk +
                         " has no enrollment with emotion '" +
                         baseline_emotion + "'");
      }
    }
  }

  std::vector<SpeakerModel> models;
  models.reserve(acc.size());
  for (const auto& [spk, sum_count] : acc) {
    SpeakerModel m;
    m.speaker = spk;
    m.e = sum_count.first / static_cast<double>(sum_count.second);
    models.push_back(std::move(m));
  }
  return models;
}

Vector trial_embedding(const Vector& e, Framework fw, const EinvNet* net) {
  if (fw == Framework::kEinvTest || fw == Framework::kEinvPair) {
    if (net == nullptr) {
      throw ConfigError("trial_embedding: " + framework_to_string(fw) +
                        " requires an invariance net");
    }
    return net->forward(e);
  }
  return e;
}

std::string identify(const Vector& trial_e,
                     const std::vector<SpeakerModel>& models) {
  if (models.empty()) throw InputError("identify: no speaker models");
  int best = 0;
  double best_score = cosine(trial_e, models[0].e);
  for (int i = 1; i < static_cast<int>(models.size()); ++i) {
    const double s = cosine(trial_e, models[i].e);
    // Strict > keeps the first (lexicographically smallest, since models are
    // sorted) speaker on exact ties.
    if (s > best_score ||
        (s == best_score && models[i].speaker < models[best].speaker)) {
      best = i;
      best_score = s;
    }
  }
  return models[best].speaker;
}

EvalReport evaluate(const std::vector<Trial>& trials,
                    const std::vector<SpeakerModel>& models, Framework fw,
                    const EinvNet* net,
                    const std::vector<std::string>& emotion_order) {
  if (trials.empty()) throw InputError("evaluate: no trials");
  if (emotion_order.empty()) throw InputError("evaluate: empty emotion order");

  EvalReport rep;
  rep.emotions = emotion_order;
  rep.correct.assign(emotion_order.size(), 0);
  rep.total.assign(emotion_order.size(), 0);

  std::map<std::string, int> emo_index;
  for (int i = 0; i < static_cast<int>(emotion_order.size()); ++i) {
    emo_index[emotion_order[i]] = i;
  }

  std::map<std::string, int> spk_index;
  for (const auto& m : models) {
    spk_index[m.speaker] = 0;  // fill below in sorted order
  }
  for (const auto& t : trials) spk_index[t.speaker] = 0;
  {
    int i = 0;
    for (auto& [spk, idx] : spk_index) {
      idx = i++;
      rep.speakers.push_back(spk);
    }
  }
  rep.confusion = Matrix::Zero(static_cast<int>(spk_index.size()),
                               static_cast<int>(spk_index.size()));

  for (const auto& t : trials) {
    auto it = emo_index.find(t.emotion);
    if (it == emo_index.end()) {
      throw InputError("evaluate: trial " + t.utterance_id +
                       " has emotion '" + t.emotion +
                       "' outside the configured emotion set");
    }
    const Vector e = trial_embedding(t.e, fw, net);
    const std::string pred = identify(e, models);
    rep.total[it->second] += 1;
    if (pred == t.speaker) rep.correct[it->second] += 1;
    rep.confusion(spk_index.at(t.speaker), spk_index.at(pred)) += 1.0;
  }

  rep.accuracy.resize(emotion_order.size());
  double sum = 0.0;
  for (size_t i = 0; i < emotion_order.size(); ++i) {
    if (rep.total[i] == 0) {
      throw InputError("evaluate: no trials with emotion '" +
                       emotion_order[i] + "'");
    }
    rep.accuracy[i] = 100.0 * rep.correct[i] / rep.total[i];
    sum += rep.accuracy[i];
  }
  rep.average = sum / static_cast<double>(emotion_order.size());
  return rep;
}

GridReport grid_evaluate(const std::vector<CompEmbedding>& enroll,
                         const std::vector<Trial>& trials,
                         const std::vector<std::string>& emotion_order) {
  GridReport grid;
  grid.emotions = emotion_order;
  const int n = static_cast<int>(emotion_order.size());
  grid.accuracy = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto models =
        build_models(enroll, Framework::kBaseline, emotion_order[i], nullptr);
    const EvalReport rep =
        evaluate(trials, models, Framework::kBaseline, nullptr, emotion_order);
    for (int j = 0; j < n; ++j) grid.accuracy(i, j) = rep.accuracy[j];
  }
  grid.column_average = grid.accuracy.colwise().mean();
  return grid;
}

namespace {

// Pads/truncates nothing: fields are fixed-width so reruns diff cleanly.
void put_cell(std::ostream& os, const std::string& s, int width) {
  os << std::left << std::setw(width) << s;
}

}  // namespace

std::string format_eval_table(const EvalReport& report,
                              const std::string& framework_name) {
  std::ostringstream os;
  os << "speaker identification accuracy (%), framework=" << framework_name
     << "\n";
  put_cell(os, "emotion", 10);
  put_cell(os, "accuracy", 10);
  os << "trials\n";
  for (size_t i = 0; i < report.emotions.size(); ++i) {
    put_cell(os, report.emotions[i], 10);
    put_cell(os, format_accuracy(report.accuracy[i]), 10);
    os << report.total[i] << "\n";
  }
  put_cell(os, "average", 10);
  put_cell(os, format_accuracy(report.average), 10);
  os << "-\n";
  return os.str();
}

std::string format_grid_table(const GridReport& report) {
  std::ostringstream os;
  os << "baseline accuracy (%) by train emotion (rows) and test emotion "
        "(columns)\n";
  put_cell(os, "train\\test", 12);
  for (const auto& e : report.emotions) put_cell(os, e, 8);
  os << "\n";
  for (int i = 0; i < static_cast<int>(report.emotions.size()); ++i) {
    put_cell(os, report.emotions[i], 12);
    for (int j = 0; j < static_cast<int>(report.emotions.size()); ++j) {
      put_cell(os, format_accuracy(report.accuracy(i, j)), 8);
    }
    os << "\n";
  }
  put_cell(os, "average", 12);
  for (int j = 0; j < static_cast<int>(report.emotions.size()); ++j) {
    put_cell(os, format_accuracy(report.column_average(j)), 8);
  }
  os << "\n";
  return os.str();
}

void write_eval_csv(const std::string& path, const EvalReport& report,
                    const std::string& framework_name) {
  std::ofstream out(path);
  if (!out) throw IoError("write_eval_csv: cannot open " + path);
  out << "framework,emotion,accuracy,correct,total\n";
  for (size_t i = 0; i < report.emotions.size(); ++i) {
    out << framework_name << ',' << report.emotions[i] << ','
        << format_accuracy(report.accuracy[i]) << ',' << report.correct[i]
        << ',' << report.total[i] << "\n";
  }
  out << framework_name << ",average," << format_accuracy(report.average)
      << ",,\n";
  if (!out) throw IoError("write_eval_csv: write failed for " + path);
}

void write_grid_csv(const std::string& path, const GridReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("write_grid_csv: cannot open " + path);
  out << "train_emotion";
  for (const auto& e : report.emotions) out << ',' << e;
  out << "\n";
  for (int i = 0; i < static_cast<int>(report.emotions.size()); ++i) {
    out << report.emotions[i];
    for (int j = 0; j < static_cast<int>(report.emotions.size()); ++j) {
      out << ',' << format_accuracy(report.accuracy(i, j));
    }
    out << "\n";
  }
  out << "average";
  for (int j = 0; j < static_cast<int>(report.emotions.size()); ++j) {
    out << ',' << format_accuracy(report.column_average(j));
  }
  out << "\n";
  if (!out) throw IoError("write_grid_csv: write failed for " + path);
}

}  // namespace eiv
