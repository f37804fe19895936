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

#include "eiv/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "eiv/common.hpp"

namespace eiv {

namespace {

const char kHeader[] = "path_or_id,speaker,emotion,split,duration_s";

bool known_emotion(const std::string& e) {
  return e == "N" || e == "H" || e == "A" || e == "S";
}

bool known_split(const std::string& s) {
  return s == "train" || s == "test" || s == "background";
}

void validate_rows(const std::vector<ManifestRow>& rows,
                   const std::string& context) {
  if (rows.empty()) {
    throw FormatError(context + ": manifest has no data rows");
  }
  std::set<std::string> seen;
  for (size_t i = 0; i < rows.size(); ++i) {
    const ManifestRow& r = rows[i];
    const std::string where = context + ": row " + std::to_string(i + 1);
    for (const std::string* field :
         {&r.path_or_id, &r.speaker, &r.emotion, &r.split}) {
      if (field->empty()) throw FormatError(where + " has an empty field");
      if (field->find(',') != std::string::npos ||
          field->find('\n') != std::string::npos) {
        throw FormatError(where + " contains ',' or a newline in a field");
      }
    }
    if (!known_emotion(r.emotion)) {
      throw FormatError(where + " has unknown emotion '" + r.emotion + "'");
    }
    if (!known_split(r.split)) {
      throw FormatError(where + " has unknown split '" + r.split + "'");
    }
    if (!(r.duration_s > 0)) {
      throw FormatError(where + " has non-positive duration");
    }
    const std::string id = utterance_id_from_path(r.path_or_id);
    if (!seen.insert(id).second) {
      throw FormatError(where + " duplicates utterance id '" + id + "'");
    }
  }
}

}  // namespace

std::vector<ManifestRow> Manifest::select(const std::string& split) const {
  std::vector<ManifestRow> out;
  for (const auto& r : rows) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

std::string utterance_id_from_path(const std::string& path_or_id) {
  size_t start = path_or_id.find_last_of("/\\");
  start = (start == std::string::npos) ? 0 : start + 1;
  size_t dot = path_or_id.find_last_of('.');
  if (dot == std::string::npos || dot <= start) dot = path_or_id.size();
  return path_or_id.substr(start, dot - start);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_manifest: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(path + ": manifest is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw FormatError(path + ": expected header '" + kHeader + "', got '" +
                      line + "'");
  }

  Manifest m;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw FormatError(path + ": line " + std::to_string(lineno) +
                        " has " + std::to_string(fields.size()) +
                        " fields, expected 5");
    }
    ManifestRow r;
    r.path_or_id = fields[0];
    r.speaker = fields[1];
    r.emotion = fields[2];
    r.split = fields[3];
    try {
      size_t pos = 0;
      r.duration_s = std::stod(fields[4], &pos);
      if (pos != fields[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError(path + ": line " + std::to_string(lineno) +
                        " has unparseable duration '" + fields[4] + "'");
    }
    m.rows.push_back(std::move(r));
  }
  validate_rows(m.rows, path);
  return m;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  validate_rows(manifest.rows, "write_manifest");
  std::ofstream out(path);
  if (!out) throw IoError("write_manifest: cannot open " + path);
  out << kHeader << "\n";
  char buf[64];
  for (const auto& r : manifest.rows) {
    std::snprintf(buf, sizeof(buf), "%.6g", r.duration_s);
    out << r.path_or_id << ',' << r.speaker << ',' << r.emotion << ','
        << r.split << ',' << buf << "\n";
  }
  if (!out) throw IoError("write_manifest: write failed for " + path);
}

}  // namespace eiv
