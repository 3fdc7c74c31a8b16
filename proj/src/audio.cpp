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

#include "coughnet/audio.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "coughnet/byteio.h"
#include "coughnet/fft.h"

namespace coughnet {

namespace {

// Half of a Kaiser-windowed sinc, tabulated per 1/kPrecision of a zero crossing.
class SincTable {
 public:
  static constexpr int kZeroCrossings = 32;
  static constexpr int kPrecision = 512;
  static constexpr double kBeta = 9.0;
  static constexpr double kRolloff = 0.95;

  SincTable() : table_(kZeroCrossings * kPrecision + 2, 0.0) {
    const double i0_beta = std::cyl_bessel_i(0.0, kBeta);
    for (std::size_t i = 0; i + 1 < table_.size(); ++i) {
      const double x = static_cast<double>(i) / kPrecision;
      const double u = x / kZeroCrossings;
      const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double window = u >= 1.0 ? 0.0 : std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - u * u)) / i0_beta;
      table_[i] = sinc * window;
    }
  }

  // Kernel at distance x (in zero crossings), linear interpolation.
  double operator()(double x) const {
    const double pos = std::abs(x) * kPrecision;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= table_.size()) return 0.0;
    const double frac = pos - static_cast<double>(i);
    return table_[i] + frac * (table_[i + 1] - table_[i]);
  }

 private:
  std::vector<double> table_;
};

const SincTable& sinc_table() {
  static const SincTable table;
  return table;
}

using Spectrum = std::vector<std::complex<double>>;

constexpr int kStretchFft = 2048;
constexpr int kStretchHop = 512;

std::vector<Spectrum> stft_frames(const Eigen::ArrayXd& x, int n_fft, int hop) {
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  const std::size_t frames = static_cast<std::size_t>(len / hop) + 1;
  const FftPlan<double> plan(static_cast<std::size_t>(n_fft));
  std::vector<Spectrum> out(frames);
  Spectrum buf(static_cast<std::size_t>(n_fft));
  for (std::size_t t = 0; t < frames; ++t) {
    for (int n = 0; n < n_fft; ++n) {
      const std::ptrdiff_t at = static_cast<std::ptrdiff_t>(t) * hop - n_fft / 2 + n;
      const std::ptrdiff_t src = at;
      double v = 0.0;
      if (len == 1) {
        v = x[0];
      } else {
        const std::ptrdiff_t period = 2 * (len - 1);
        std::ptrdiff_t i = src % period;
        if (i < 0) i += period;
        v = x[i < len ? i : period - i];
      }
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / n_fft);
      buf[static_cast<std::size_t>(n)] = v * w;
    }
    plan.transform(buf);
    out[t].assign(buf.begin(), buf.begin() + n_fft / 2 + 1);
  }
  return out;
}

Eigen::ArrayXd istft_frames(const std::vector<Spectrum>& frames, int n_fft, int hop, Eigen::Index length) {
  const FftPlan<double> plan(static_cast<std::size_t>(n_fft));
  const Eigen::Index total = static_cast<Eigen::Index>(frames.size() - 1) * hop + n_fft;
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(total), wsum = Eigen::ArrayXd::Zero(total);
  Spectrum buf(static_cast<std::size_t>(n_fft));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Spectrum& s = frames[t];
    for (int k = 0; k <= n_fft / 2; ++k) buf[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k)];
    for (int k = 1; k < n_fft / 2; ++k) {
      buf[static_cast<std::size_t>(n_fft - k)] = std::conj(s[static_cast<std::size_t>(k)]);
    }
    plan.transform(buf, /*inverse=*/true);
    const Eigen::Index start = static_cast<Eigen::Index>(t) * hop;
    for (int n = 0; n < n_fft; ++n) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / n_fft);
      acc[start + n] += buf[static_cast<std::size_t>(n)].real() * w;
      wsum[start + n] += w * w;
    }
  }
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(length);
  for (Eigen::Index i = 0; i < length; ++i) {
    const Eigen::Index at = i + n_fft / 2;
    if (at >= total) break;
    out[i] = wsum[at] > 1e-8 ? acc[at] / wsum[at] : acc[at];
  }
  return out;
}

double draw(std::mt19937_64& rng, const Interval& range) {
  if (range.lo == range.hi) {
    rng.discard(1);
    return range.lo;
  }
  return std::uniform_real_distribution<double>(range.lo, range.hi)(rng);
}

}  // namespace

AudioClip resample(const AudioClip& clip, double target_rate) {
  if (!(target_rate > 0) || !(clip.sample_rate > 0)) throw InvalidArgument("resample: rates must be positive");
  if (target_rate == clip.sample_rate) return clip;
  const SincTable& kernel = sinc_table();
  const double ratio = target_rate / clip.sample_rate;
  const auto n_in = clip.size();
  const auto n_out = static_cast<Eigen::Index>(std::llround(static_cast<double>(n_in) * ratio));
  const double scale = std::min(1.0, ratio) * SincTable::kRolloff;
  const double half_width = SincTable::kZeroCrossings / scale;
  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  for (Eigen::Index n = 0; n < n_out; ++n) {
    const double t = static_cast<double>(n) / ratio;
    const auto k0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(t - half_width)));
    const auto k1 = std::min<Eigen::Index>(n_in - 1, static_cast<Eigen::Index>(std::floor(t + half_width)));
    double acc = 0.0;
    for (Eigen::Index k = k0; k <= k1; ++k) acc += clip.samples[k] * kernel((t - static_cast<double>(k)) * scale);
    out.samples[n] = acc * scale;
  }
  return out;
}

AudioClip decode_audio(std::string_view wav_bytes, double target_rate) {
  return resample(to_mono(decode_wav(wav_bytes)), target_rate);
}

AudioClip load_audio(const std::filesystem::path& path, double target_rate) {
  const std::string bytes = byteio::read_file(path);
  try {
    return decode_audio(bytes, target_rate);
  } catch (const EmptyAudioError& e) {
    throw EmptyAudioError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

AudioClip pad_or_trim(const AudioClip& clip, Eigen::Index n_samples) {
  if (n_samples <= 0) throw InvalidArgument("pad_or_trim: length must be positive");
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples = Eigen::ArrayXd::Zero(n_samples);
  const Eigen::Index keep = std::min(n_samples, clip.size());
  out.samples.head(keep) = clip.samples.head(keep);
  return out;
}

AugmentPolicy AugmentPolicy::identity() {
  AugmentPolicy p;
  p.trim_db.reset();
  p.shift_s = 0.0;
  p.snr_db.reset();
  p.pitch_semitones = {0.0, 0.0};
  p.copies = 0;
  return p;
}

void AugmentPolicy::validate() const {
  if (copies < 0) throw InvalidArgument("augment policy: copies must be >= 0");
  if (!(shift_s >= 0)) throw InvalidArgument("augment policy: shift must be >= 0");
  if (snr_db && !(snr_db->lo <= snr_db->hi)) throw InvalidArgument("augment policy: empty SNR interval");
  if (!(pitch_semitones.lo <= pitch_semitones.hi)) throw InvalidArgument("augment policy: empty pitch interval");
}

AudioClip trim_silence(const AudioClip& clip, double threshold_db) {
  constexpr Eigen::Index kFrame = 2048, kHop = 512;
  const Eigen::Index n = clip.size();
  if (n == 0) return clip;
  const Eigen::Index frames = n <= kFrame ? 1 : 1 + (n - kFrame + kHop - 1) / kHop;
  Eigen::Index first = -1, last = -1;
  for (Eigen::Index f = 0; f < frames; ++f) {
    const Eigen::Index start = f * kHop;
    const Eigen::Index len = std::min(kFrame, n - start);
    const double rms = std::sqrt(clip.samples.segment(start, len).square().mean());
    const double db = 20.0 * std::log10(std::max(rms, 1e-12));
    if (db > threshold_db) {
      if (first < 0) first = f;
      last = f;
    }
  }
  if (first < 0) return clip;
  const Eigen::Index begin = first * kHop;
  const Eigen::Index end = std::min(n, last * kHop + kFrame);
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples = clip.samples.segment(begin, end - begin);
  return out;
}

AudioClip shift(const AudioClip& clip, double seconds) {
  const Eigen::Index n = clip.size();
  if (n == 0) return clip;
  Eigen::Index k = static_cast<Eigen::Index>(std::llround(seconds * clip.sample_rate)) % n;
  if (k < 0) k += n;
  if (k == 0) return clip;
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.resize(n);
  out.samples.tail(n - k) = clip.samples.head(n - k);
  out.samples.head(k) = clip.samples.tail(k);
  return out;
}

AudioClip add_gaussian_noise(const AudioClip& clip, double snr_db, std::mt19937_64& rng) {
  AudioClip out = clip;
  if (clip.empty()) return out;
  const double power = clip.samples.square().mean();
  if (!(power > 0)) return out;
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::normal_distribution<double> noise(0.0, sigma);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.samples[i] += noise(rng);
  return out;
}

AudioClip time_stretch(const AudioClip& clip, double rate) {
  if (!(rate > 0)) throw InvalidArgument("time_stretch: rate must be positive");
  if (clip.empty()) return clip;
  const auto spec = stft_frames(clip.samples, kStretchFft, kStretchHop);
  const std::size_t bins = spec.front().size();
  const std::size_t n_frames = spec.size();
  std::vector<double> advance(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    advance[k] = std::numbers::pi * kStretchHop * static_cast<double>(k) / static_cast<double>(bins - 1);
  }
  std::vector<double> phase(bins);
  for (std::size_t k = 0; k < bins; ++k) phase[k] = std::arg(spec[0][k]);
  const auto column = [&](std::size_t t, std::size_t k) {
    return t < n_frames ? spec[t][k] : std::complex<double>(0.0, 0.0);
  };
  std::vector<Spectrum> out;
  for (double step = 0.0; step < static_cast<double>(n_frames); step += rate) {
    const auto t = static_cast<std::size_t>(step);
    const double alpha = step - static_cast<double>(t);
    Spectrum frame(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const auto a = column(t, k), b = column(t + 1, k);
      const double mag = (1.0 - alpha) * std::abs(a) + alpha * std::abs(b);
      frame[k] = std::polar(mag, phase[k]);
      double dphase = std::arg(b) - std::arg(a) - advance[k];
      dphase -= 2.0 * std::numbers::pi * std::round(dphase / (2.0 * std::numbers::pi));
      phase[k] += advance[k] + dphase;
    }
    out.push_back(std::move(frame));
  }
  const auto length = static_cast<Eigen::Index>(std::llround(static_cast<double>(clip.size()) / rate));
  AudioClip result;
  result.sample_rate = clip.sample_rate;
  result.samples = istft_frames(out, kStretchFft, kStretchHop, std::max<Eigen::Index>(length, 1));
  return result;
}

AudioClip pitch_shift(const AudioClip& clip, double semitones) {
  if (semitones == 0.0 || clip.empty()) return clip;
  const double rate = std::pow(2.0, -semitones / 12.0);
  AudioClip stretched = time_stretch(clip, rate);
  stretched.sample_rate = clip.sample_rate / rate;
  AudioClip shifted = resample(stretched, clip.sample_rate);
  return pad_or_trim(shifted, clip.size());
}

AudioClip augment(const AudioClip& clip, const AugmentPolicy& policy, std::uint64_t seed) {
  policy.validate();
  if (clip.empty()) throw InvalidArgument("augment: empty clip");
  std::mt19937_64 rng(seed);
  AudioClip out = policy.trim_db ? trim_silence(clip, *policy.trim_db) : clip;
  out = shift(out, draw(rng, {-policy.shift_s, policy.shift_s}));
  if (policy.snr_db) out = add_gaussian_noise(out, draw(rng, *policy.snr_db), rng);
  out = pitch_shift(out, draw(rng, policy.pitch_semitones));
  out.samples = out.samples.max(-1.0).min(1.0);
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a mixed key.
  std::uint64_t z = master ^ (a * 0x9E3779B97F4A7C15ull) ^ (b * 0xC2B2AE3D27D4EB4Full + 0x165667B19E3779F9ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<LabeledClip> expand_training_set(std::span<const LabeledClip> clips, const AugmentPolicy& policy,
                                             std::uint64_t master_seed) {
  policy.validate();
  std::vector<LabeledClip> out;
  out.reserve(clips.size() * static_cast<std::size_t>(policy.copies + 1));
  for (const LabeledClip& c : clips) {
    out.push_back({c.clip, c.label, c.source, 0});
    for (int i = 1; i <= policy.copies; ++i) {
      out.push_back({augment(c.clip, policy, derive_seed(master_seed, c.source, static_cast<std::uint64_t>(i))),
                     c.label, c.source, i});
    }
  }
  return out;
}

}  // namespace coughnet
