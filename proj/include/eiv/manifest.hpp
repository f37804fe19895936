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

#ifndef EIV_MANIFEST_HPP
#define EIV_MANIFEST_HPP

#include <string>
#include <vector>

namespace eiv {

/// One corpus entry.  `path_or_id` is either a file path (features or wav,
/// relative paths resolve against the manifest's directory) or a bare id.
struct ManifestRow {
  std::string path_or_id;
  std::string speaker;
  std::string emotion;  // N, H, A, or S
  std::string split;    // train, test, or background
  double duration_s = 0.0;
};

struct Manifest {
  std::vector<ManifestRow> rows;

  std::vector<ManifestRow> select(const std::string& split) const;
};

/// Basename minus one extension: "feats/a_N_t0.eivb" -> "a_N_t0".
std::string utterance_id_from_path(const std::string& path_or_id);

/// CSV with the exact header "path_or_id,speaker,emotion,split,duration_s".
/// Validates labels, positive durations, and id uniqueness; errors name the
/// offending row.  write(read(x)) is the identity on canonical files.
Manifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const Manifest& manifest);

}  // namespace eiv

#endif  // EIV_MANIFEST_HPP
