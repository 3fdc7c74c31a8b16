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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coughnet/error.h"

namespace coughnet {

inline constexpr double kWorkingSampleRate = 48000.0;

// Decodable stream with no sample frames.
class EmptyAudioError : public DataError {
 public:
  using DataError::DataError;
};

struct AudioClip {
  Eigen::ArrayXd samples;
  double sample_rate = kWorkingSampleRate;

  Eigen::Index size() const { return samples.size(); }
  bool empty() const { return samples.size() == 0; }
  std::span<const double> view() const { return {samples.data(), static_cast<std::size_t>(samples.size())}; }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// ---- WAV

enum class SampleFormat { kInt8, kInt16, kInt24, kInt32, kFloat32 };

struct WavInfo {
  int channels = 0;
  int sample_rate = 0;
  int bits_per_sample = 0;
  bool is_float = false;
  std::size_t frames = 0;
};

// Interleaved samples scaled to [-1, 1] plus stream info.
struct DecodedWav {
  WavInfo info;
  std::vector<double> interleaved;
};

DecodedWav decode_wav(std::string_view bytes);
// Channel average of a decoded stream, clamped to [-1, 1].
AudioClip to_mono(const DecodedWav& wav);

std::string encode_wav(std::span<const double> interleaved, int channels, int sample_rate, SampleFormat format);
std::string encode_wav(const AudioClip& clip, SampleFormat format = SampleFormat::kInt16);
void write_wav(const std::filesystem::path& path, const AudioClip& clip, SampleFormat format = SampleFormat::kInt16);

// ---- Loading and length normalization

// Band-limited (Kaiser-windowed sinc) resampling. Output length is
// round(n * target_rate / sample_rate).
AudioClip resample(const AudioClip& clip, double target_rate);

// decode -> mono -> resample to target_rate.
AudioClip decode_audio(std::string_view wav_bytes, double target_rate = kWorkingSampleRate);
AudioClip load_audio(const std::filesystem::path& path, double target_rate = kWorkingSampleRate);

// Zero-pads or truncates at the end to exactly n_samples.
AudioClip pad_or_trim(const AudioClip& clip, Eigen::Index n_samples);

// ---- Augmentation

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

struct AugmentPolicy {
  std::optional<double> trim_db = -40.0;       // dBFS; nullopt disables trimming
  double shift_s = 0.5;                        // shift drawn from [-shift_s, shift_s]
  std::optional<Interval> snr_db = Interval{10.0, 30.0};  // nullopt disables noise
  Interval pitch_semitones{-2.0, 2.0};
  int copies = 5;

  // Every transform disabled or collapsed to a no-op value.
  static AugmentPolicy identity();
  void validate() const;
};

// Drops leading/trailing 2048-sample frames (hop 512) whose RMS is below
// threshold_db dBFS. A clip that is silent everywhere is returned unchanged.
AudioClip trim_silence(const AudioClip& clip, double threshold_db);
// Circular shift; positive values delay the content.
AudioClip shift(const AudioClip& clip, double seconds);
// Adds white Gaussian noise with power = signal power / 10^(snr_db / 10).
AudioClip add_gaussian_noise(const AudioClip& clip, double snr_db, std::mt19937_64& rng);
// Phase-vocoder time stretch; rate > 1 shortens the clip.
AudioClip time_stretch(const AudioClip& clip, double rate);
// Duration-preserving pitch shift: time stretch then resample.
AudioClip pitch_shift(const AudioClip& clip, double semitones);

// trim -> shift -> noise -> pitch with parameters drawn from a generator
// seeded by `seed`; output clamped to [-1, 1].
AudioClip augment(const AudioClip& clip, const AugmentPolicy& policy, std::uint64_t seed);

struct LabeledClip {
  AudioClip clip;
  int label = 0;
  std::size_t source = 0;  // index of the original clip
  int copy = 0;            // 0 = original
};

// Independent stream per (clip, copy).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// For each clip: the original followed by policy.copies augmented copies.
std::vector<LabeledClip> expand_training_set(std::span<const LabeledClip> clips, const AugmentPolicy& policy,
                                             std::uint64_t master_seed);

}  // namespace coughnet
