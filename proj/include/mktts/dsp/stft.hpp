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
#include <limits>
#include <optional>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "mktts/dsp/types.hpp"
#include "mktts/dsp/window.hpp"

namespace mktts::dsp {

namespace detail {

// Mirror index into [0, n) without repeating the edge sample.
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  const Eigen::Index period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace detail

// Centered STFT with reflection padding of fft_size/2 on both sides.
// Produces length/hop + 1 frames of fft_size/2 + 1 bins.
template <typename Derived>
ComplexFrames<typename Derived::Scalar> stft(const Eigen::ArrayBase<Derived>& signal,
                                             const StftParams& p) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  p.validate();
  const Eigen::Index len = signal.size();
  if (static_cast<std::size_t>(len) < p.win_size) {
    throw TooShort(static_cast<std::size_t>(len), p.win_size);
  }
  const auto nfft = static_cast<Eigen::Index>(p.fft_size);
  const auto hop = static_cast<Eigen::Index>(p.hop);
  const Eigen::Index pad = nfft / 2;
  const auto frames = static_cast<Eigen::Index>(p.frame_count(static_cast<std::size_t>(len)));
  const Eigen::Index bins = nfft / 2 + 1;
  const Signal<Scalar> window = padded_window<Scalar>(p);

  ComplexFrames<Scalar> out(frames, bins);
  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
  std::vector<Scalar> frame(static_cast<std::size_t>(nfft));
  std::vector<Complex> spectrum(static_cast<std::size_t>(nfft));
  for (Eigen::Index f = 0; f < frames; ++f) {
    const Eigen::Index start = f * hop - pad;
    for (Eigen::Index k = 0; k < nfft; ++k) {
      frame[static_cast<std::size_t>(k)] =
          signal(detail::reflect_index(start + k, len)) * window(k);
    }
    fft.fwd(spectrum.data(), frame.data(), nfft);
    for (Eigen::Index b = 0; b < bins; ++b) out(f, b) = spectrum[static_cast<std::size_t>(b)];
  }
  return out;
}

// Weighted overlap-add inverse of stft(). The output has `length` samples,
// defaulting to (frames - 1) * hop.
template <typename Derived>
Signal<typename Derived::Scalar::value_type> istft(const Eigen::ArrayBase<Derived>& spec,
                                                   const StftParams& p,
                                                   std::optional<std::size_t> length = {}) {
  using Scalar = typename Derived::Scalar::value_type;
  using Complex = std::complex<Scalar>;
  p.validate();
  const auto nfft = static_cast<Eigen::Index>(p.fft_size);
  const auto hop = static_cast<Eigen::Index>(p.hop);
  const Eigen::Index bins = nfft / 2 + 1;
  if (spec.cols() != bins) {
    throw ShapeMismatch("spectrogram has " + std::to_string(spec.cols()) +
                        " bins, parameters expect " + std::to_string(bins));
  }
  const Eigen::Index frames = spec.rows();
  const Eigen::Index out_len = length ? static_cast<Eigen::Index>(*length)
                                      : std::max<Eigen::Index>(frames - 1, 0) * hop;
  Signal<Scalar> out = Signal<Scalar>::Zero(out_len);
  if (frames == 0) return out;

  const Eigen::Index pad = nfft / 2;
  const Eigen::Index total = nfft + hop * (frames - 1);
  Signal<Scalar> acc = Signal<Scalar>::Zero(total);
  Signal<Scalar> norm = Signal<Scalar>::Zero(total);
  const Signal<Scalar> window = padded_window<Scalar>(p);
  const Signal<Scalar> window_sq = window.square();

  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
  std::vector<Complex> spectrum(static_cast<std::size_t>(bins));
  std::vector<Scalar> frame(static_cast<std::size_t>(nfft));
  for (Eigen::Index f = 0; f < frames; ++f) {
    for (Eigen::Index b = 0; b < bins; ++b) spectrum[static_cast<std::size_t>(b)] = spec(f, b);
    // A real signal has real DC and Nyquist bins.
    spectrum.front() = Complex(spectrum.front().real(), Scalar(0));
    spectrum.back() = Complex(spectrum.back().real(), Scalar(0));
    fft.inv(frame.data(), spectrum.data(), nfft);
    const Eigen::Index start = f * hop;
    for (Eigen::Index k = 0; k < nfft; ++k) {
      acc(start + k) += frame[static_cast<std::size_t>(k)] * window(k);
      norm(start + k) += window_sq(k);
    }
  }
  const Scalar tiny = std::numeric_limits<Scalar>::min() * Scalar(1e6);
  for (Eigen::Index i = 0; i < out_len; ++i) {
    const Eigen::Index j = i + pad;
    if (j < total && norm(j) > tiny) out(i) = acc(j) / norm(j);
  }
  return out;
}

template <typename Derived>
RealFrames<typename Derived::Scalar::value_type> magnitude(
    const Eigen::ArrayBase<Derived>& spec) {
  return spec.abs();
}

template <typename Derived>
MagnitudeSpectrogram<typename Derived::Scalar> magnitude_spectrogram(
    const Eigen::ArrayBase<Derived>& signal, const StftParams& p) {
  return {stft(signal, p).abs(), p};
}

}  // namespace mktts::dsp
