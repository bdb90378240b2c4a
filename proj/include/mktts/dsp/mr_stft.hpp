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
#include <vector>

#include "mktts/dsp/stft.hpp"
#include "mktts/dsp/types.hpp"

namespace mktts::dsp {

struct StftDistanceTerm {
  StftParams params;
  double spectral_convergence = 0.0;
  double log_magnitude = 0.0;
};

struct StftDistance {
  double total = 0.0;
  std::vector<StftDistanceTerm> terms;
};

inline constexpr double kMagnitudeClamp = 1e-7;

// (fft, win, hop) triples used when no resolutions are given.
inline std::vector<StftParams> default_resolutions(double sample_rate = 22050.0) {
  return {
      {1024, 600, 120, WindowKind::Hann, sample_rate},
      {2048, 1200, 240, WindowKind::Hann, sample_rate},
      {512, 240, 50, WindowKind::Hann, sample_rate},
  };
}

// Sum over resolutions of spectral convergence ||Y| - |X||_F / ||X||_F plus
// the mean absolute log-magnitude difference. `reference` plays the role of X.
// Both signals are trimmed to the shorter length first.
template <typename DerivedA, typename DerivedB>
StftDistance mr_stft_distance(const Eigen::ArrayBase<DerivedA>& reference,
                              const Eigen::ArrayBase<DerivedB>& estimate,
                              const std::vector<StftParams>& resolutions) {
  using Scalar = typename DerivedA::Scalar;
  if (resolutions.empty()) throw DspError("at least one STFT resolution is required");
  const Eigen::Index n = std::min(reference.size(), estimate.size());
  const Signal<Scalar> x = reference.head(n);
  const Signal<Scalar> y = estimate.head(n).template cast<Scalar>();

  StftDistance out;
  for (const auto& p : resolutions) {
    const RealFrames<double> mx = stft(x, p).abs().template cast<double>();
    const RealFrames<double> my = stft(y, p).abs().template cast<double>();
    StftDistanceTerm term{p, 0.0, 0.0};
    const double ref_norm = mx.matrix().norm();
    const double diff_norm = (my - mx).matrix().norm();
    if (ref_norm > 0.0) {
      term.spectral_convergence = diff_norm / ref_norm;
    } else {
      term.spectral_convergence = diff_norm > 0.0 ? 1.0 : 0.0;
    }
    term.log_magnitude = (my.max(kMagnitudeClamp).log() - mx.max(kMagnitudeClamp).log())
                             .abs()
                             .mean();
    out.total += term.spectral_convergence + term.log_magnitude;
    out.terms.push_back(term);
  }
  return out;
}

}  // namespace mktts::dsp
