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

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mktts/dsp/stft.hpp"
#include "mktts/dsp/types.hpp"

namespace mktts::dsp {

// HTK mel scale.
inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

inline void validate_mel(const StftParams& p, const MelParams& m) {
  p.validate();
  if (m.n_mels < 1) throw DspError("n_mels must be at least 1");
  if (!(m.fmin >= 0.0 && m.fmin < m.fmax && m.fmax <= p.sample_rate / 2.0)) {
    throw DspError("mel range needs 0 <= fmin < fmax <= sample_rate / 2");
  }
}

// n_mels x bins matrix of triangular filters with peak 1, centres equally
// spaced on the mel scale. Throws DspError when a filter falls between FFT
// bins and would be empty.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> mel_filterbank(const StftParams& p,
                                                                     const MelParams& m) {
  validate_mel(p, m);
  const auto n_mels = static_cast<Eigen::Index>(m.n_mels);
  const auto bins = static_cast<Eigen::Index>(p.bins());
  const double mel_lo = hz_to_mel(m.fmin);
  const double mel_hi = hz_to_mel(m.fmax);
  std::vector<double> edges(m.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(m.n_mels + 1));
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> fb =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_mels, bins);
  for (Eigen::Index k = 0; k < n_mels; ++k) {
    const double lo = edges[static_cast<std::size_t>(k)];
    const double mid = edges[static_cast<std::size_t>(k) + 1];
    const double hi = edges[static_cast<std::size_t>(k) + 2];
    for (Eigen::Index b = 0; b < bins; ++b) {
      const double f = static_cast<double>(b) * p.sample_rate / static_cast<double>(p.fft_size);
      const double w = std::min((f - lo) / (mid - lo), (hi - f) / (hi - mid));
      if (w > 0.0) fb(k, b) = static_cast<Scalar>(w);
    }
    if (fb.row(k).maxCoeff() <= Scalar(0)) {
      throw DspError("mel filter " + std::to_string(k) +
                     " has no FFT bin; lower n_mels or raise fft_size");
    }
  }
  return fb;
}

// Centre frequency of each filter in Hz.
inline std::vector<double> mel_centers(const MelParams& m) {
  std::vector<double> out(m.n_mels);
  const double lo = hz_to_mel(m.fmin);
  const double hi = hz_to_mel(m.fmax);
  for (std::size_t i = 0; i < m.n_mels; ++i) {
    out[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i + 1) /
                                static_cast<double>(m.n_mels + 1));
  }
  return out;
}

// log(max(filterbank * |S|, floor)), frame by frame.
template <typename Scalar>
MelSpectrogram<Scalar> linear_to_mel(const MagnitudeSpectrogram<Scalar>& mag,
                                     const MelParams& m, double floor = kLogFloor) {
  const auto fb = mel_filterbank<Scalar>(mag.params, m);
  RealFrames<Scalar> mel = (mag.data.matrix() * fb.transpose()).array();
  mel = mel.max(static_cast<Scalar>(floor)).log();
  return {std::move(mel), m, mag.params};
}

template <typename Derived>
MelSpectrogram<typename Derived::Scalar> mel_spectrogram(const Eigen::ArrayBase<Derived>& signal,
                                                         const StftParams& p,
                                                         const MelParams& m) {
  validate_mel(p, m);
  return linear_to_mel(magnitude_spectrogram(signal, p), m);
}

// Approximate inverse: undo the log, apply the pseudo-inverse
// F^T (F F^T)^-1 of the filterbank and clamp negatives to zero.
template <typename Scalar>
MagnitudeSpectrogram<Scalar> mel_to_linear(const MelSpectrogram<Scalar>& mel) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat fb = mel_filterbank<Scalar>(mel.params, mel.mel);
  const Mat gram = fb * fb.transpose();
  const Mat pinv = fb.transpose() * gram.completeOrthogonalDecomposition().pseudoInverse();
  const Mat energy = mel.data.exp().matrix();
  RealFrames<Scalar> lin = (energy * pinv.transpose()).array().max(Scalar(0));
  return {std::move(lin), mel.params};
}

}  // namespace mktts::dsp
