// Copyright 2026 The mktts Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mktts/dsp/types.hpp"

namespace mktts::dsp {

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WavAudio {
  double sample_rate = 44100.0;
  // Mono samples in [-1, 1). Multi-channel files are averaged on read.
  Signal<double> samples;
};

inline constexpr double kCorpusRate = 44100.0;
inline constexpr double kAnalysisRate = 22050.0;

// RIFF/WAVE, 16-bit PCM. Unknown chunks are skipped.
WavAudio decode_wav(std::string_view bytes);
WavAudio read_wav(const std::filesystem::path& path);

// Mono 16-bit PCM with rounding and clipping. `extra_chunk` (four-character
// id plus payload) is appended after the data chunk when non-empty; readers
// ignore it.
std::string encode_wav(const WavAudio& audio, std::string_view extra_chunk_id = {},
                       std::string_view extra_chunk_payload = {});
void write_wav(const std::filesystem::path& path, const WavAudio& audio);

double rms(const Signal<double>& x);
// Scales to the given RMS in dB relative to full scale; silence stays silent.
Signal<double> normalize_rms(const Signal<double>& x, double target_dbfs);

}  // namespace mktts::dsp
