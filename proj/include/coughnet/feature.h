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
#include <string>
#include <string_view>

#include "coughnet/mfcc.h"
#include "coughnet/nn/tensor.h"

namespace coughnet {

// coefficients x frames x channels grid stored as row-major float32.
struct MfccFeature {
  using Grid = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Grid values;
  int channels = 1;

  int coefficients() const { return static_cast<int>(values.rows()); }
  int frames() const { return static_cast<int>(values.cols()); }
  bool operator==(const MfccFeature& o) const { return channels == o.channels && values == o.values; }
};

// Standard network-input extraction at single precision.
MfccFeature extract_feature(std::span<const double> clip, const MelParams& params);

// Feature cache format: "MFC1", u32 LE dims (coefficients, frames, channels),
// row-major float32 LE values.
std::string encode_feature(const MfccFeature& feature);
MfccFeature decode_feature(std::string_view bytes);
void write_feature(const std::filesystem::path& path, const MfccFeature& feature);
MfccFeature read_feature(const std::filesystem::path& path);

// Copies `feature` into sample `n` of an (N, coefficients, frames, channels) tensor.
void copy_into(const MfccFeature& feature, nn::Tensor<float>& batch, nn::Index n);
nn::Tensor<float> to_tensor(const MfccFeature& feature);

}  // namespace coughnet
