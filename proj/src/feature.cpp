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

#include "coughnet/feature.h"

#include "coughnet/byteio.h"

namespace coughnet {

namespace {
constexpr std::string_view kMagic = "MFC1";
}

MfccFeature extract_feature(std::span<const double> clip, const MelParams& params) {
  std::vector<float> samples(clip.begin(), clip.end());
  MfccFeature f;
  f.values = mfcc<float>(samples, params);
  f.channels = 1;
  if (!f.values.allFinite()) throw DataError("feature extraction produced non-finite values");
  return f;
}

std::string encode_feature(const MfccFeature& feature) {
  std::string out(kMagic);
  byteio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(feature.coefficients()));
  byteio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(feature.frames()));
  byteio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(feature.channels));
  out.reserve(out.size() + 4 * static_cast<std::size_t>(feature.values.size()));
  for (Eigen::Index i = 0; i < feature.values.size(); ++i) byteio::put_le<float>(out, feature.values.data()[i]);
  return out;
}

MfccFeature decode_feature(std::string_view bytes) {
  if (bytes.substr(0, 4) != kMagic) throw DataError("feature cache: bad magic");
  const auto rows = byteio::get_le<std::uint32_t>(bytes, 4);
  const auto cols = byteio::get_le<std::uint32_t>(bytes, 8);
  const auto channels = byteio::get_le<std::uint32_t>(bytes, 12);
  if (channels != 1) throw DataError("feature cache: only single-channel features are supported");
  const std::size_t count = std::size_t{rows} * cols * channels;
  if (bytes.size() != 16 + 4 * count) throw DataError("feature cache: payload size mismatch");
  MfccFeature f;
  f.channels = static_cast<int>(channels);
  f.values.resize(rows, cols);
  for (std::size_t i = 0; i < count; ++i) f.values.data()[i] = byteio::get_le<float>(bytes, 16 + 4 * i);
  return f;
}

void write_feature(const std::filesystem::path& path, const MfccFeature& feature) {
  byteio::write_file(path, encode_feature(feature));
}

MfccFeature read_feature(const std::filesystem::path& path) {
  try {
    return decode_feature(byteio::read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void copy_into(const MfccFeature& feature, nn::Tensor<float>& batch, nn::Index n) {
  const nn::Shape& s = batch.shape();
  if (s.h != feature.coefficients() || s.w != feature.frames() || s.c != feature.channels) {
    throw InvalidArgument("feature shape does not match network input " + s.str());
  }
  std::copy(feature.values.data(), feature.values.data() + feature.values.size(),
            batch.data() + n * s.sample_size());
}

nn::Tensor<float> to_tensor(const MfccFeature& feature) {
  nn::Tensor<float> t(1, feature.coefficients(), feature.frames(), feature.channels);
  copy_into(feature, t, 0);
  return t;
}

}  // namespace coughnet
