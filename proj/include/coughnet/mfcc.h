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

#include <Eigen/Core>

#include <span>
#include <vector>

#include "coughnet/fft.h"

namespace coughnet {

// Mel scale m = a * log10(1 + f / break_hz). The standard HTK break frequency
// is 700 Hz; `low_break()` selects the 100 Hz variant.
struct MelParams {
  double sample_rate = 48000.0;
  int n_fft = 2048;
  int hop = 512;
  int n_mels = 32;
  int n_mfcc = 32;
  double f_min = 0.0;
  double f_max = 24000.0;
  double mel_scale_a = 2595.0;
  double mel_break_hz = 700.0;
  double log_floor = 1e-10;
  bool normalize_area = false;  // Slaney-style 2 / (f_hi - f_lo) row scaling

  static MelParams standard() { return {}; }
  static MelParams low_break() {
    MelParams p;
    p.mel_break_hz = 100.0;
    return p;
  }

  void validate() const;
  int n_bins() const { return n_fft / 2 + 1; }
  bool operator==(const MelParams&) const = default;
};

// Number of frames in the standard network input and the clip length that yields it.
inline constexpr int kStandardFrames = 328;
inline constexpr int kStandardClipSamples = 167424;  // (328 - 1) * 512

double hz_to_mel(double hz, const MelParams& params);
double mel_to_hz(double mel, const MelParams& params);

// n_mels + 2 band edges in Hz, equally spaced on the mel axis; filter i
// peaks at edge i + 1.
std::vector<double> mel_band_edges(const MelParams& params);

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// n_mels x (n_fft/2 + 1) triangular filters.
template <typename Scalar>
DenseMatrix<Scalar> mel_filterbank(const MelParams& params);

// Periodic Hann window of length n.
template <typename Scalar>
DenseVector<Scalar> hann_window(int n);

// (n_fft/2 + 1) x (floor(len/hop) + 1) power spectrogram of the centered,
// reflect-padded clip.
template <typename Scalar>
DenseMatrix<Scalar> stft_power(std::span<const Scalar> clip, const MelParams& params);

// Orthonormal DCT-II basis, n_out x n_in.
template <typename Scalar>
DenseMatrix<Scalar> dct_matrix(int n_out, int n_in);

// First n_out orthonormal DCT-II coefficients of v.
template <typename Scalar>
DenseVector<Scalar> dct_ii(const Eigen::Ref<const DenseVector<Scalar>>& v, int n_out);

// n_mfcc x frames coefficients: dct_ii(log(max(filterbank * power, floor))) per frame.
template <typename Scalar>
DenseMatrix<Scalar> mfcc(std::span<const Scalar> clip, const MelParams& params);

// Reflect index (numpy "reflect" mode: edge sample not repeated).
std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n);

inline int frame_count(std::size_t length, int hop) { return static_cast<int>(length / hop) + 1; }

}  // namespace coughnet
