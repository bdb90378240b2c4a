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

#include "mktts/dsp/types.hpp"

namespace mktts::dsp {

// Little-endian binary container (see docs/formats.md):
//
//   offset size  field
//   0      4     magic "MKSG"
//   4      2     version (1)
//   6      2     kind (0 = linear magnitude, 1 = log-mel)
//   8      4     frames
//   12     4     columns (bins or mels)
//   16     4     sample_rate (Hz, integer)
//   20     4     fft_size
//   24     4     win_size
//   28     4     hop
//   32     4     window (0 hann, 1 hamming, 2 rect)
//   36     4     n_mels (0 for linear)
//   40     4     fmin (float32)
//   44     4     fmax (float32)
//   48     ...   frames * columns float32, row-major
//
// The CSV fallback starts with one "# key=value ..." line carrying the same
// header fields, followed by one comma-separated row per frame.

enum class SpectrogramKind : std::uint16_t { Magnitude = 0, LogMel = 1 };

struct StoredSpectrogram {
  SpectrogramKind kind = SpectrogramKind::LogMel;
  RealFrames<double> data;
  StftParams params;
  MelParams mel;  // meaningful for LogMel only

  MelSpectrogram<double> as_mel() const;
  MagnitudeSpectrogram<double> as_magnitude() const;
  static StoredSpectrogram from(const MelSpectrogram<double>& mel);
  static StoredSpectrogram from(const MagnitudeSpectrogram<double>& mag);
};

class SpectrogramFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode_spectrogram(const StoredSpectrogram& s);
StoredSpectrogram decode_spectrogram(std::string_view bytes);
std::string encode_spectrogram_csv(const StoredSpectrogram& s);
StoredSpectrogram decode_spectrogram_csv(std::string_view text);

// Chooses CSV for a ".csv" extension, the binary container otherwise.
void write_spectrogram(const std::filesystem::path& path, const StoredSpectrogram& s);
StoredSpectrogram read_spectrogram(const std::filesystem::path& path);

}  // namespace mktts::dsp
