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
#include <complex>
#include <numbers>

#include "mktts/dsp/types.hpp"
#include "mktts/dsp/window.hpp"

namespace mktts::dsp {

struct FilterbankSpec {
  std::size_t bands = 4;
  std::size_t taps = 62;  // prototype order; the filters have taps + 1 coefficients
  double attenuation_db = 60.0;

  void validate() const {
    if (bands < 1) throw DspError("filterbank needs at least one band");
    if (taps < 2 || taps % 2 != 0) throw DspError("taps must be a positive even number");
  }
};

namespace detail {

// Windowed-sinc lowpass of length taps + 1 with cutoff `ratio` * pi.
inline Signal<double> sinc_prototype(std::size_t taps, double ratio, double beta) {
  const auto n = static_cast<Eigen::Index>(taps + 1);
  const double wc = std::numbers::pi * ratio;
  const double centre = static_cast<double>(taps) / 2.0;
  Signal<double> h(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - centre;
    h(i) = t == 0.0 ? wc / std::numbers::pi : std::sin(wc * t) / (std::numbers::pi * t);
  }
  return h * kaiser_window<double>(taps + 1, beta);
}

inline double amplitude_at(const Signal<double>& h, double omega) {
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    acc += h(i) * std::polar(1.0, -omega * static_cast<double>(i));
  }
  return std::abs(acc);
}

// Worst deviation from power complementarity |P(w)|^2 + |P(pi/K - w)|^2 = 1
// over the first band.
inline double complementarity_error(const Signal<double>& h, std::size_t bands) {
  const double edge = std::numbers::pi / static_cast<double>(bands);
  double worst = 0.0;
  constexpr int kGrid = 64;
  for (int g = 0; g <= kGrid; ++g) {
    const double w = edge * static_cast<double>(g) / kGrid;
    const double a = amplitude_at(h, w);
    const double b = amplitude_at(h, edge - w);
    worst = std::max(worst, std::abs(a * a + b * b - 1.0));
  }
  return worst;
}

}  // namespace detail

// Kaiser-window prototype for a cosine-modulated filterbank. The Kaiser beta
// follows from the attenuation target; the cutoff is the one that makes the
// prototype most nearly power complementary, found by golden-section search.
// A single band degenerates to a unit impulse.
inline Signal<double> pqmf_prototype(const FilterbankSpec& spec) {
  spec.validate();
  if (spec.bands == 1) {
    Signal<double> h = Signal<double>::Zero(static_cast<Eigen::Index>(spec.taps + 1));
    h(static_cast<Eigen::Index>(spec.taps / 2)) = 1.0;
    return h;
  }
  const double beta = kaiser_beta(spec.attenuation_db);
  const double nominal = 0.5 / static_cast<double>(spec.bands);
  double lo = 0.6 * nominal;
  double hi = 1.6 * nominal;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto cost = [&](double r) {
    return detail::complementarity_error(detail::sinc_prototype(spec.taps, r, beta), spec.bands);
  };
  double a = hi - phi * (hi - lo);
  double b = lo + phi * (hi - lo);
  double fa = cost(a);
  double fb = cost(b);
  for (int it = 0; it < 60; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = cost(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = cost(b);
    }
  }
  return detail::sinc_prototype(spec.taps, 0.5 * (lo + hi), beta);
}

// bands x (taps + 1) analysis (or synthesis) filters.
inline RealFrames<double> pqmf_filters(const FilterbankSpec& spec, bool synthesis) {
  const Signal<double> proto = pqmf_prototype(spec);
  const auto k_bands = static_cast<Eigen::Index>(spec.bands);
  RealFrames<double> out(k_bands, proto.size());
  if (spec.bands == 1) {
    out.row(0) = proto.transpose();
    return out;
  }
  const double centre = static_cast<double>(spec.taps) / 2.0;
  const double kb = static_cast<double>(spec.bands);
  for (Eigen::Index k = 0; k < k_bands; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double shift = (synthesis ? -1.0 : 1.0) * sign * std::numbers::pi / 4.0;
    for (Eigen::Index n = 0; n < proto.size(); ++n) {
      const double arg = (2.0 * static_cast<double>(k) + 1.0) * std::numbers::pi / (2.0 * kb) *
                             (static_cast<double>(n) - centre) +
                         shift;
      out(k, n) = 2.0 * proto(n) * std::cos(arg);
    }
  }
  return out;
}

// Cosine-modulated pseudo-QMF analysis with decimation by `bands`. The signal
// is zero-padded to a multiple of `bands` and treated as periodic; filters are
// applied zero-phase, so the round trip through subband_synthesis() has no
// delay. Subbands are scaled by sqrt(bands), which keeps their total energy
// equal to the input energy.
template <typename Derived>
RealFrames<typename Derived::Scalar> subband_analysis(const Eigen::ArrayBase<Derived>& signal,
                                                      const FilterbankSpec& spec) {
  using Scalar = typename Derived::Scalar;
  spec.validate();
  const auto k_bands = static_cast<Eigen::Index>(spec.bands);
  const Eigen::Index len = ((signal.size() + k_bands - 1) / k_bands) * k_bands;
  Signal<double> x = Signal<double>::Zero(len);
  x.head(signal.size()) = signal.template cast<double>();
  const RealFrames<double> filters = pqmf_filters(spec, false);
  const auto half = static_cast<Eigen::Index>(spec.taps / 2);
  const Eigen::Index sub_len = len / k_bands;
  const double gain = std::sqrt(static_cast<double>(spec.bands));

  RealFrames<Scalar> out(k_bands, sub_len);
  for (Eigen::Index k = 0; k < k_bands; ++k) {
    for (Eigen::Index m = 0; m < sub_len; ++m) {
      const Eigen::Index n = m * k_bands;
      double acc = 0.0;
      for (Eigen::Index t = 0; t < filters.cols(); ++t) {
        Eigen::Index idx = (n + half - t) % len;
        if (idx < 0) idx += len;
        acc += filters(k, t) * x(idx);
      }
      out(k, m) = static_cast<Scalar>(gain * acc);
    }
  }
  return out;
}

// Upsamples every band by `bands`, filters it with its synthesis filter and
// sums the bands.
template <typename Derived>
Signal<typename Derived::Scalar> subband_synthesis(const Eigen::ArrayBase<Derived>& subbands,
                                                   const FilterbankSpec& spec) {
  using Scalar = typename Derived::Scalar;
  spec.validate();
  const auto k_bands = static_cast<Eigen::Index>(spec.bands);
  if (subbands.rows() != k_bands) {
    throw ShapeMismatch("expected " + std::to_string(k_bands) + " subbands, got " +
                        std::to_string(subbands.rows()));
  }
  const Eigen::Index len = subbands.cols() * k_bands;
  const RealFrames<double> filters = pqmf_filters(spec, true);
  const auto half = static_cast<Eigen::Index>(spec.taps / 2);
  const double gain = std::sqrt(static_cast<double>(spec.bands));

  Signal<double> y = Signal<double>::Zero(len);
  for (Eigen::Index k = 0; k < k_bands; ++k) {
    for (Eigen::Index m = 0; m < subbands.cols(); ++m) {
      const double v = gain * static_cast<double>(subbands(k, m));
      if (v == 0.0) continue;
      // Scatter the upsampled impulse at m * bands through the filter.
      const Eigen::Index pos = m * k_bands;
      for (Eigen::Index t = 0; t < filters.cols(); ++t) {
        Eigen::Index idx = (pos + t - half) % len;
        if (idx < 0) idx += len;
        y(idx) += filters(k, t) * v;
      }
    }
  }
  return y.template cast<Scalar>();
}

}  // namespace mktts::dsp
