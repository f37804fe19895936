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

#ifndef EIV_WAV_HPP
#define EIV_WAV_HPP

#include "eiv/features.hpp"

#include <string>

namespace eiv {

/// Reads a mono PCM WAV file (16-bit integer or 32-bit IEEE float).
/// The clip id is the file stem.  Anything else raises FormatError.
AudioClip read_wav(const std::string& path);

/// Writes a mono 16-bit PCM WAV file; samples are clipped to [-1, 1].
void write_wav(const std::string& path, const AudioClip& clip);

}  // namespace eiv

#endif  // EIV_WAV_HPP
