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

#include "coughnet/mfcc.h"

#include <cmath>
#include <numbers>

namespace coughnet {

void MelParams::validate() const {
  if (!(sample_rate > 0)) throw InvalidArgument("mel params: sample_rate must be positive");
  if (n_fft < 2 || !is_power_of_two(static_cast<std::size_t>(n_fft))) {
    throw InvalidArgument("mel params: n_fft must be a power of two");
  }
  if (hop <= 0) throw InvalidArgument("mel params: hop must be positive");
  if (n_mels < 1 || n_mfcc < 1 || n_mfcc > n_mels) {
    throw InvalidArgument("mel params: need 1 <= n_mfcc <= n_mels");
  }
  if (!(f_min >= 0 && f_min < f_max && f_max <= sample_rate / 2)) {
    throw InvalidArgument("mel params: need 0 <= f_min < f_max <= sample_rate / 2");
  }
  if (!(mel_scale_a > 0 && mel_break_hz > 0)) throw InvalidArgument("mel params: mel constants must be positive");
  if (!(log_floor > 0)) throw InvalidArgument("mel params: log_floor must be positive");
}

double hz_to_mel(double hz, const MelParams& p) {
  if (!(hz >= 0)) throw InvalidArgument("hz_to_mel: negative frequency");
  return p.mel_scale_a * std::log10(1.0 + hz / p.mel_break_hz);
}

double mel_to_hz(double mel, const MelParams& p) {
  if (!(mel >= 0)) throw InvalidArgument("mel_to_hz: negative mel");
  return p.mel_break_hz * (std::pow(10.0, mel / p.mel_scale_a) - 1.0);
}

std::vector<double> mel_band_edges(const MelParams& p) {
  p.validate();
  const double lo = hz_to_mel(p.f_min, p), hi = hz_to_mel(p.f_max, p);
  std::vector<double> edges(static_cast<std::size_t>(p.n_mels + 2));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / (p.n_mels + 1), p);
  }
  return edges;
}

template <typename Scalar>
DenseMatrix<Scalar> mel_filterbank(const MelParams& p) {
  const auto edges = mel_band_edges(p);
  const int bins = p.n_bins();
  DenseMatrix<Scalar> fb = DenseMatrix<Scalar>::Zero(p.n_mels, bins);
  for (int i = 0; i < p.n_mels; ++i) {
    const double lo = edges[i], center = edges[i + 1], hi = edges[i + 2];
    for (int j = 0; j < bins; ++j) {
      const double f = j * p.sample_rate / p.n_fft;
      const double w = std::min((f - lo) / (center - lo), (hi - f) / (hi - center));
      if (w > 0) fb(i, j) = static_cast<Scalar>(w);
    }
    if (!(fb.row(i).sum() > 0)) {
      throw InvalidArgument("mel_filterbank: filter " + std::to_string(i) +
                            " has empty support; too many mel bands for the FFT resolution");
    }
    if (p.normalize_area) fb.row(i) *= static_cast<Scalar>(2.0 / (hi - lo));
  }
  return fb;
}

template <typename Scalar>
DenseVector<Scalar> hann_window(int n) {
  DenseVector<Scalar> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = static_cast<Scalar>(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n));
  }
  return w;
}

std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

template <typename Scalar>
DenseMatrix<Scalar> stft_power(std::span<const Scalar> clip, const MelParams& p) {
  p.validate();
  if (clip.empty()) throw InvalidArgument("stft_power: empty clip");
  const auto len = static_cast<std::ptrdiff_t>(clip.size());
  const int frames = frame_count(clip.size(), p.hop);
  const std::ptrdiff_t pad = p.n_fft / 2;
  const FftPlan<Scalar> plan(static_cast<std::size_t>(p.n_fft));
  const DenseVector<Scalar> window = hann_window<Scalar>(p.n_fft);
  DenseMatrix<Scalar> power(p.n_bins(), frames);
  std::vector<std::complex<Scalar>> buf(static_cast<std::size_t>(p.n_fft));
  for (int t = 0; t < frames; ++t) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t) * p.hop - pad;
    for (int n = 0; n < p.n_fft; ++n) {
      const std::ptrdiff_t at = start + n;
      const Scalar x = (at >= 0 && at < len) ? clip[static_cast<std::size_t>(at)]
                                              : clip[static_cast<std::size_t>(reflect_index(at, len))];
      buf[static_cast<std::size_t>(n)] = std::complex<Scalar>(x * window[n], Scalar(0));
    }
    plan.transform(buf);
    for (int k = 0; k < p.n_bins(); ++k) power(k, t) = std::norm(buf[static_cast<std::size_t>(k)]);
  }
  return power;
}

template <typename Scalar>
DenseMatrix<Scalar> dct_matrix(int n_out, int n_in) {
  if (n_out < 1 || n_in < n_out) throw InvalidArgument("dct: need 1 <= n_out <= n_in");
  DenseMatrix<Scalar> d(n_out, n_in);
  const long double pi = std::numbers::pi_v<long double>;
  for (int k = 0; k < n_out; ++k) {
    const long double s = k == 0 ? std::sqrt(1.0L / n_in) : std::sqrt(2.0L / n_in);
    for (int n = 0; n < n_in; ++n) {
      d(k, n) = static_cast<Scalar>(s * std::cos(pi * k * (2 * n + 1) / (2.0L * n_in)));
    }
  }
  return d;
}

template <typename Scalar>
DenseVector<Scalar> dct_ii(const Eigen::Ref<const DenseVector<Scalar>>& v, int n_out) {
  const int n_in = static_cast<int>(v.size());
  thread_local DenseMatrix<Scalar> basis;
  if (basis.rows() != n_out || basis.cols() != n_in) basis = dct_matrix<Scalar>(n_out, n_in);
  return basis * v;
}

template <typename Scalar>
DenseMatrix<Scalar> mfcc(std::span<const Scalar> clip, const MelParams& p) {
  const DenseMatrix<Scalar> fb = mel_filterbank<Scalar>(p);
  const DenseMatrix<Scalar> power = stft_power<Scalar>(clip, p);
  const DenseMatrix<Scalar> mel = fb * power;
  const DenseMatrix<Scalar> log_mel = mel.cwiseMax(static_cast<Scalar>(p.log_floor)).array().log().matrix();
  DenseMatrix<Scalar> out(p.n_mfcc, log_mel.cols());
  for (Eigen::Index t = 0; t < log_mel.cols(); ++t) out.col(t) = dct_ii<Scalar>(log_mel.col(t), p.n_mfcc);
  return out;
}

#define COUGHNET_INSTANTIATE_MFCC(T)                                                      \
  template DenseMatrix<T> mel_filterbank<T>(const MelParams&);                            \
  template DenseVector<T> hann_window<T>(int);                                            \
  template DenseMatrix<T> stft_power<T>(std::span<const T>, const MelParams&);            \
  template DenseMatrix<T> dct_matrix<T>(int, int);                                        \
  template DenseVector<T> dct_ii<T>(const Eigen::Ref<const DenseVector<T>>&, int);        \
  template DenseMatrix<T> mfcc<T>(std::span<const T>, const MelParams&);

COUGHNET_INSTANTIATE_MFCC(float)
COUGHNET_INSTANTIATE_MFCC(double)

#undef COUGHNET_INSTANTIATE_MFCC

}  // namespace coughnet
