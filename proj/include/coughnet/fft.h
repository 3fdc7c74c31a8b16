// Copyright 2026 The CoughNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "coughnet/error.h"

namespace coughnet {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 FFT with precomputed twiddles and bit-reversal table.
template <typename Scalar>
class FftPlan {
 public:
  using Complex = std::complex<Scalar>;

  explicit FftPlan(std::size_t n) : n_(n), twiddles_(n / 2), reversed_(n) {
    if (!is_power_of_two(n)) throw InvalidArgument("fft: size must be a power of two");
    for (std::size_t k = 0; k < n / 2; ++k) {
      // Long double keeps twiddle error below the double-precision round-off of the butterflies.
      const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) /
                                static_cast<long double>(n);
      twiddles_[k] = Complex(static_cast<Scalar>(std::cos(angle)), static_cast<Scalar>(std::sin(angle)));
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      reversed_[i] = r;
    }
  }

  std::size_t size() const { return n_; }

  // In place; `inverse` uses conjugate twiddles and scales by 1/n.
  void transform(std::span<Complex> a, bool inverse = false) const {
    if (a.size() != n_) throw InvalidArgument("fft: buffer size does not match plan");
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < reversed_[i]) std::swap(a[i], a[reversed_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2, step = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          Complex w = twiddles_[j * step];
          if (inverse) w = std::conj(w);
          const Complex u = a[start + j];
          const Complex v = a[start + j + half] * w;
          a[start + j] = u + v;
          a[start + j + half] = u - v;
        }
      }
    }
    if (inverse) {
      const Scalar scale = Scalar(1) / static_cast<Scalar>(n_);
      for (auto& x : a) x *= scale;
    }
  }

  // Spectrum bins 0..n/2 of a real frame.
  std::vector<Complex> rfft(std::span<const Scalar> frame) const {
    std::vector<Complex> buf(frame.begin(), frame.end());
    transform(buf);
    buf.resize(n_ / 2 + 1);
    return buf;
  }

 private:
  std::size_t n_;
  std::vector<Complex> twiddles_;
  std::vector<std::size_t> reversed_;
};

}  // namespace coughnet
