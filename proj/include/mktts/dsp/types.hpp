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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace mktts::dsp {

template <typename Scalar>
using Signal = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

// Frame-major: one row per frame, one column per frequency bin.
template <typename Scalar>
using ComplexFrames =
    Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RealFrames = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class DspError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TooShort : public DspError {
 public:
  TooShort(std::size_t length, std::size_t required)
      : DspError("signal of " + std::to_string(length) + " samples is shorter than " +
                 std::to_string(required)) {}
};

class ShapeMismatch : public DspError {
 public:
  using DspError::DspError;
};

enum class WindowKind { Hann, Hamming, Rectangular };

std::string_view window_name(WindowKind kind);
WindowKind parse_window(std::string_view name);

struct StftParams {
  std::size_t fft_size = 1024;
  std::size_t win_size = 1024;
  std::size_t hop = 256;
  WindowKind window = WindowKind::Hann;
  double sample_rate = 22050.0;

  std::size_t bins() const { return fft_size / 2 + 1; }
  // Centered framing: one frame per hop plus the closing frame.
  std::size_t frame_count(std::size_t length) const { return length / hop + 1; }
  // Throws DspError unless 0 < hop <= win_size <= fft_size, fft_size is even
  // and sample_rate > 0.
  void validate() const;

  friend bool operator==(const StftParams&, const StftParams&) = default;
};

template <typename Scalar>
struct MagnitudeSpectrogram {
  RealFrames<Scalar> data;  // frames x bins, all entries >= 0
  StftParams params;
};

struct MelParams {
  std::size_t n_mels = 80;
  double fmin = 50.0;
  double fmax = 7600.0;

  friend bool operator==(const MelParams&, const MelParams&) = default;
};

template <typename Scalar>
struct MelSpectrogram {
  RealFrames<Scalar> data;  // frames x n_mels, natural-log compressed
  MelParams mel;
  StftParams params;
};

inline constexpr double kLogFloor = 1e-5;

inline std::string_view window_name(WindowKind kind) {
  switch (kind) {
    case WindowKind::Hann: return "hann";
    case WindowKind::Hamming: return "hamming";
    case WindowKind::Rectangular: return "rect";
  }
  return "hann";
}

inline WindowKind parse_window(std::string_view name) {
  if (name == "hann") return WindowKind::Hann;
  if (name == "hamming") return WindowKind::Hamming;
  if (name == "rect") return WindowKind::Rectangular;
  throw DspError("unknown window '" + std::string(name) + "'");
}

inline void StftParams::validate() const {
  if (hop == 0 || hop > win_size || win_size > fft_size) {
    throw DspError("STFT parameters need 0 < hop <= win_size <= fft_size");
  }
  if (fft_size % 2 != 0) throw DspError("fft_size must be even");
  if (!(sample_rate > 0.0)) throw DspError("sample_rate must be positive");
}

}  // namespace mktts::dsp
