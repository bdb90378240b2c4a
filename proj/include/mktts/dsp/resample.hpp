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

// Band-limited resampling by direct evaluation of a Kaiser-windowed sinc
// kernel, 32 zero crossings wide at the lower of the two rates.
template <typename Derived>
Signal<typename Derived::Scalar> resample(const Eigen::ArrayBase<Derived>& signal,
                                          double in_rate, double out_rate) {
  using Scalar = typename Derived::Scalar;
  if (!(in_rate > 0.0) || !(out_rate > 0.0)) throw DspError("sample rates must be positive");
  if (in_rate == out_rate) return signal;
  const Eigen::Index n_in = signal.size();
  const auto n_out = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(n_in) * out_rate / in_rate));
  // Cutoff as a fraction of the input rate, slightly inside Nyquist.
  const double fc = 0.5 * 0.97 * std::min(in_rate, out_rate) / in_rate;
  const double half_width = 16.0 / (2.0 * fc);
  const double beta = 8.6;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  Signal<Scalar> out(n_out);
  for (Eigen::Index m = 0; m < n_out; ++m) {
    const double t = static_cast<double>(m) * in_rate / out_rate;
    const auto first = static_cast<Eigen::Index>(std::ceil(t - half_width));
    const auto last = static_cast<Eigen::Index>(std::floor(t + half_width));
    double acc = 0.0;
    for (Eigen::Index k = std::max<Eigen::Index>(first, 0); k <= std::min(last, n_in - 1); ++k) {
      const double tau = t - static_cast<double>(k);
      const double r = tau / half_width;
      const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
      const double arg = 2.0 * fc * tau;
      const double sinc = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      acc += static_cast<double>(signal(k)) * 2.0 * fc * sinc * win;
    }
    out(m) = static_cast<Scalar>(acc);
  }
  return out;
}

}  // namespace mktts::dsp
