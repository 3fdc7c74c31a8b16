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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "coughnet/arch.h"
#include "coughnet/nn/adam.h"
#include "coughnet/nn/model.h"

namespace coughnet {

// Checkpoint layout:
//   "CNA1" | u32 LE header length | JSON header | float32 LE tensor data
// The header carries the architecture spec, free-form metadata and a tensor
// directory of {name, role, shape, offset, count}; offsets are in bytes from
// the start of the data section. Roles: param, state, adam_m, adam_v.
inline constexpr std::string_view kCheckpointMagic = "CNA1";

struct OptimizerState {
  std::int64_t steps = 0;
  double learning_rate = 0;
  std::vector<nn::Tensor<float>> first_moments;
  std::vector<nn::Tensor<float>> second_moments;
};

struct LoadedCheckpoint {
  nn::Model<float> model;
  nlohmann::json metadata;
  std::optional<OptimizerState> optimizer;
};

std::string encode_checkpoint(nn::Model<float>& model, const nlohmann::json& metadata = nlohmann::json::object(),
                              const nn::Adam<float>* optimizer = nullptr);
LoadedCheckpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, nn::Model<float>& model,
                     const nlohmann::json& metadata = nlohmann::json::object(),
                     const nn::Adam<float>* optimizer = nullptr);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// Header only, without reading tensors into a model.
nlohmann::json read_checkpoint_header(std::string_view bytes);

// Restores an optimizer from a decoded checkpoint.
void restore_optimizer(nn::Adam<float>& adam, const OptimizerState& state);

}  // namespace coughnet
