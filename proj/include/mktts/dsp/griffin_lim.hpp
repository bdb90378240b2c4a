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
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "mktts/dsp/stft.hpp"
#include "mktts/dsp/types.hpp"

namespace mktts::dsp {

template <typename Scalar>
struct GriffinLimResult {
  Signal<Scalar> signal;
  // convergence[k] = || |STFT(x_k)| - target ||_F / ||target||_F for the
  // waveform produced by iteration k + 1.
  std::vector<double> convergence;
};

inline constexpr double kPeakLimit = 0.99;

template <typename Scalar>
double spectral_convergence(const RealFrames<Scalar>& estimate, const RealFrames<Scalar>& target) {
  const double denom = static_cast<double>(target.matrix().norm());
  const double num = static_cast<double>((estimate - target).matrix().norm());
  if (denom == 0.0) return num == 0.0 ? 0.0 : 1.0;
  return num / denom;
}

// Phase retrieval by alternating projections. The initial phase is uniform on
// (-pi, pi] from a generator seeded with `seed`; every iteration resynthesises
// the waveform with the current phase and takes the phase of its STFT. The
// returned waveform is the last resynthesis, scaled down if its peak exceeds
// 0.99.
template <typename Scalar>
GriffinLimResult<Scalar> griffin_lim(const MagnitudeSpectrogram<Scalar>& mag, int iters,
                                     std::uint64_t seed,
                                     std::optional<std::size_t> length = {}) {
  using Complex = std::complex<Scalar>;
  if (iters < 0) throw DspError("iteration count must be non-negative");
  const StftParams& p = mag.params;
  p.validate();
  if (mag.data.cols() != static_cast<Eigen::Index>(p.bins())) {
    throw ShapeMismatch("magnitude has wrong bin count");
  }
  if ((mag.data < Scalar(0)).any()) throw DspError("magnitude must be non-negative");
  const std::size_t out_len =
      length.value_or(static_cast<std::size_t>(std::max<Eigen::Index>(mag.data.rows() - 1, 0)) *
                      p.hop);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ComplexFrames<Scalar> phase(mag.data.rows(), mag.data.cols());
  for (Eigen::Index f = 0; f < phase.rows(); ++f) {
    for (Eigen::Index b = 0; b < phase.cols(); ++b) {
      // 1 - u lies in (0, 1], so the angle lies in (-pi, pi].
      const double angle = std::numbers::pi * (2.0 * (1.0 - uniform(rng)) - 1.0);
      phase(f, b) = std::polar(Scalar(1), static_cast<Scalar>(angle));
    }
  }

  GriffinLimResult<Scalar> result;
  result.convergence.reserve(static_cast<std::size_t>(iters));
  const bool too_short = out_len < p.win_size;
  Signal<Scalar> x = istft((mag.data * phase).eval(), p, out_len);
  for (int k = 0; k < iters && !too_short; ++k) {
    const ComplexFrames<Scalar> rebuilt = stft(x, p);
    if (rebuilt.rows() != mag.data.rows()) {
      throw ShapeMismatch("output length does not reproduce the frame count");
    }
    const RealFrames<Scalar> rebuilt_mag = rebuilt.abs();
    result.convergence.push_back(spectral_convergence<Scalar>(rebuilt_mag, mag.data));
    for (Eigen::Index f = 0; f < phase.rows(); ++f) {
      for (Eigen::Index b = 0; b < phase.cols(); ++b) {
        const Scalar m = rebuilt_mag(f, b);
        phase(f, b) = m > Scalar(0) ? rebuilt(f, b) / m : Complex(1, 0);
      }
    }
    x = istft((mag.data * phase).eval(), p, out_len);
  }
  // convergence[k] describes the waveform entering iteration k + 1; shift so
  // the last entry describes the returned waveform.
  if (!result.convergence.empty()) {
    result.convergence.erase(result.convergence.begin());
    result.convergence.push_back(
        spectral_convergence<Scalar>(stft(x, p).abs().eval(), mag.data));
  }
  const Scalar peak = x.size() > 0 ? x.abs().maxCoeff() : Scalar(0);
  if (peak > Scalar(kPeakLimit)) x *= Scalar(kPeakLimit) / peak;
  result.signal = std::move(x);
  return result;
}

}  // namespace mktts::dsp
