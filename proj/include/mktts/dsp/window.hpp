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

#include <cmath>
#include <numbers>

#include "mktts/dsp/types.hpp"

namespace mktts::dsp {

// Periodic (DFT-even) window of `size` samples.
template <typename Scalar>
Signal<Scalar> make_window(WindowKind kind, std::size_t size) {
  Signal<Scalar> w(static_cast<Eigen::Index>(size));
  const double n = static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
    double v = 1.0;
    if (kind == WindowKind::Hann) v = 0.5 - 0.5 * std::cos(phase);
    if (kind == WindowKind::Hamming) v = 0.54 - 0.46 * std::cos(phase);
    w(static_cast<Eigen::Index>(i)) = static_cast<Scalar>(v);
  }
  return w;
}

// Analysis window of win_size samples centred in an fft_size frame.
template <typename Scalar>
Signal<Scalar> padded_window(const StftParams& p) {
  Signal<Scalar> w = Signal<Scalar>::Zero(static_cast<Eigen::Index>(p.fft_size));
  const auto offset = static_cast<Eigen::Index>((p.fft_size - p.win_size) / 2);
  w.segment(offset, static_cast<Eigen::Index>(p.win_size)) =
      make_window<Scalar>(p.window, p.win_size);
  return w;
}

// Symmetric Kaiser window of `size` taps.
template <typename Scalar>
Signal<Scalar> kaiser_window(std::size_t size, double beta) {
  Signal<Scalar> w(static_cast<Eigen::Index>(size));
  if (size == 1) {
    w(0) = Scalar(1);
    return w;
  }
  const double denom = std::cyl_bessel_i(0.0, beta);
  const double m = static_cast<double>(size - 1);
  for (std::size_t i = 0; i < size; ++i) {
    const double r = 2.0 * static_cast<double>(i) / m - 1.0;
    w(static_cast<Eigen::Index>(i)) =
        static_cast<Scalar>(std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / denom);
  }
  return w;
}

// Kaiser's empirical beta for a stopband attenuation in dB.
inline double kaiser_beta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db >= 21.0) {
    return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) +
           0.07886 * (attenuation_db - 21.0);
  }
  return 0.0;
}

}  // namespace mktts::dsp
