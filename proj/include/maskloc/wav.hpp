// Copyright 2026 The maskloc Authors
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

#pragma once

#include <filesystem>

#include "maskloc/signal.hpp"

namespace maskloc {

// File or format problems in audio and data files.
class DataError : public Error {
 public:
  using Error::Error;
};

enum class WavFormat { Pcm16, Float32 };

/// Reads PCM (16/24/32-bit integer) or IEEE float32 WAV, including
/// WAVE_FORMAT_EXTENSIBLE headers, into doubles in [-1, 1).
MultichannelSignal read_wav(const std::filesystem::path& path);

/// Writes interleaved samples. PCM16 clips to [-1, 1].
void write_wav(const std::filesystem::path& path, const MultichannelSignal& signal, WavFormat format = WavFormat::Float32);
void write_wav(const std::filesystem::path& path, const TimeSignal& signal, WavFormat format = WavFormat::Float32);

}  // namespace maskloc
