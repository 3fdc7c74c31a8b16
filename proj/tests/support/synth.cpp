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

#include "synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace coughnet::testing {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Two-pole resonator driven by white noise; output normalized to unit RMS.
std::vector<double> band_noise(std::size_t n, double center_hz, double bandwidth_hz, double sr,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double r = std::exp(-std::numbers::pi * bandwidth_hz / sr);
  const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * center_hz / sr);
  const double a2 = -r * r;
  std::vector<double> y(n, 0.0);
  double y1 = 0.0, y2 = 0.0, power = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = gauss(rng) + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = v;
    y[i] = v;
    power += v * v;
  }
  const double rms = std::sqrt(power / static_cast<double>(std::max<std::size_t>(n, 1)));
  if (rms > 0.0) {
    for (double& v : y) v /= rms;
  }
  return y;
}

}  // namespace

AudioClip synth_clip(int label, int sample_rate, double seconds, std::mt19937_64& rng) {
  const double sr = sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * sr));
  std::vector<double> x(n, 0.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : x) v = 0.003 * gauss(rng);

  const int bursts = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int b = 0; b < bursts; ++b) {
    const auto len = static_cast<std::size_t>(uniform(rng, 0.25, 0.6) * sr);
    if (len >= n) continue;
    const auto start = std::uniform_int_distribution<std::size_t>(0, n - len)(rng);
    const double amp = uniform(rng, 0.1, 0.35);
    if (label == 1) {
      // Harmonic stack under a sinusoidal amplitude modulation.
      const double f0 = uniform(rng, 150.0, 350.0);
      const double mod_hz = uniform(rng, 4.0, 12.0);
      for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / sr;
        const double window = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
        const double am = 0.5 * (1.0 + std::sin(2.0 * std::numbers::pi * mod_hz * t));
        double s = 0.0;
        for (int h = 1; h <= 5; ++h) s += std::sin(2.0 * std::numbers::pi * f0 * h * t) / h;
        x[start + i] += amp * window * am * s;
      }
    } else {
      const auto noise = band_noise(len, uniform(rng, 500.0, 6000.0), uniform(rng, 200.0, 1500.0), sr, rng);
      for (std::size_t i = 0; i < len; ++i) {
        const double window = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
        x[start + i] += 0.5 * amp * window * noise[i];
      }
    }
  }

  AudioClip clip;
  clip.sample_rate = sr;
  clip.samples = Eigen::Map<const Eigen::ArrayXd>(x.data(), static_cast<Eigen::Index>(n)).cwiseMax(-1.0).cwiseMin(1.0);
  return clip;
}

std::vector<SampleRecord> write_synthetic_corpus(const std::filesystem::path& dir, const SynthOptions& options) {
  std::filesystem::create_directories(dir / "audio");
  std::mt19937_64 rng(options.seed);
  std::vector<SampleRecord> records;
  records.reserve(options.clips);
  const auto positives = static_cast<std::size_t>(std::llround(options.positive_fraction * options.clips));
  for (std::size_t i = 0; i < options.clips; ++i) {
    const int label = i < positives ? 1 : 0;
    const double seconds = uniform(rng, options.min_seconds, options.max_seconds);
    const AudioClip clip = synth_clip(label, options.sample_rate, seconds, rng);
    char name[32];
    std::snprintf(name, sizeof name, "audio/clip_%04zu.wav", i);
    write_wav(dir / name, clip);
    const bool verified = label == 1 && uniform(rng, 0.0, 1.0) < options.verified_fraction;
    records.push_back({name, label, verified});
  }
  write_manifest(dir / "manifest.csv", records);
  return records;
}

}  // namespace coughnet::testing
