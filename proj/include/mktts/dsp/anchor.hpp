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

#include "mktts/dsp/stft.hpp"
#include "mktts/dsp/types.hpp"
#include "mktts/dsp/window.hpp"

namespace mktts::dsp {

// Passband edge and stopband edge relative to the nominal cutoff.
inline constexpr double kAnchorPassEdge = 0.9;
inline constexpr double kAnchorStopEdge = 1.15;
inline constexpr double kAnchorAttenuationDb = 50.0;

// Odd-length linear-phase Kaiser lowpass with its transition band between
// 0.9 and 1.15 times `cutoff_hz`, normalised to unit DC gain.
inline Signal<double> design_lowpass(double cutoff_hz, double sample_rate) {
  if (!(sample_rate > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0)) {
    throw DspError("cutoff must lie in (0, sample_rate / 2)");
  }
  const double transition = (kAnchorStopEdge - kAnchorPassEdge) * cutoff_hz;
  const double delta_w = 2.0 * std::numbers::pi * transition / sample_rate;
  auto taps = static_cast<std::size_t>(
      std::ceil((kAnchorAttenuationDb - 7.95) / (2.285 * delta_w))) + 1;
  if (taps % 2 == 0) ++taps;
  const double fc = 0.5 * (kAnchorPassEdge + kAnchorStopEdge) * cutoff_hz / sample_rate;
  const double centre = static_cast<double>(taps - 1) / 2.0;
  Signal<double> h(static_cast<Eigen::Index>(taps));
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - centre;
    h(static_cast<Eigen::Index>(i)) =
        t == 0.0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
  }
  h *= kaiser_window<double>(taps, kaiser_beta(kAnchorAttenuationDb));
  return h / h.sum();
}

// Zero-phase FIR filtering with reflected edges; output length equals input
// length.
template <typename Derived>
Signal<typename Derived::Scalar> fir_filter_same(const Eigen::ArrayBase<Derived>& signal,
                                                 const Signal<double>& taps) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = signal.size();
  const Eigen::Index half = taps.size() / 2;
  Signal<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index t = 0; t < taps.size(); ++t) {
      acc += taps(t) * static_cast<double>(signal(detail::reflect_index(i + half - t, n)));
    }
    out(i) = static_cast<Scalar>(acc);
  }
  return out;
}

// MUSHRA low-pass anchor of the reference (3.5 kHz or 7 kHz in practice).
template <typename Derived>
Signal<typename Derived::Scalar> lowpass_anchor(const Eigen::ArrayBase<Derived>& signal,
                                                double cutoff_hz, double sample_rate) {
  const Signal<double> h = design_lowpass(cutoff_hz, sample_rate);
  if (signal.size() == 0) return Signal<typename Derived::Scalar>();
  return fir_filter_same(signal, h);
}

// |H(f)| of an FIR filter in dB.
inline double fir_response_db(const Signal<double>& taps, double freq_hz, double sample_rate) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < taps.size(); ++i) {
    acc += taps(i) * std::polar(1.0, -w * static_cast<double>(i));
  }
  return 20.0 * std::log10(std::max(std::abs(acc), 1e-300));
}

}  // namespace mktts::dsp
