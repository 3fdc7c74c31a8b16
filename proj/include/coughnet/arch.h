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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coughnet/nn/layers.h"

namespace coughnet {

enum class BlockKind { kConv, kMaxPool, kBatchNorm, kResidual, kDwSep };

std::string_view to_string(BlockKind kind);
BlockKind block_kind_from_string(std::string_view name);

// One cell of a seed-design row: "filter size, number of filters, stride".
struct BlockSpec {
  BlockKind kind = BlockKind::kConv;
  int kernel = 0;   // unused by max-pool / batch-norm
  int filters = 0;  // unused by max-pool / batch-norm (they keep channels)
  int stride = 1;
  bool dropout = false;
  int stage = 1;

  bool operator==(const BlockSpec&) const = default;
};

struct InputShape {
  int height = 32;
  int width = 328;
  int channels = 1;

  bool operator==(const InputShape&) const = default;
};

// Feature extractor; the global-average-pool + dense-sigmoid head is implicit.
struct ArchitectureSpec {
  std::string name;
  std::vector<BlockSpec> blocks;
  InputShape input;
  nn::Activation activation = nn::Activation::kRelu;
  double dropout_rate = 0.2;

  bool operator==(const ArchitectureSpec&) const = default;
};

// Throws InvalidArgument naming the first violated invariant.
void validate(const ArchitectureSpec& spec);

const std::vector<std::string>& seed_names();
ArchitectureSpec build_seed(std::string_view name);

// "Conv 3x3, 32, s2, d/o" style label.
std::string describe_block(const BlockSpec& block);

nlohmann::json to_json(const ArchitectureSpec& spec);
ArchitectureSpec spec_from_json(const nlohmann::json& j);

// Hex SHA-256 of the canonical JSON form.
std::string spec_digest(const ArchitectureSpec& spec);

// Cost accounting convention:
//   conv output element:        2*k*k*c_in + 1 (2 ops per MAC plus the bias add)
//   depthwise output element:   2*k*k + 1
//   dense output:               2*n_in + 1
//   batch-norm (folded scale and shift): 2 per output element
//   ReLU / residual add / sigmoid: 1 per output element; linear activation: 0
//   max-pool: 1 per input element; global-average-pool: 1 per input element
//   spatial dropout: 0 (identity at inference)
// Params count trainable scalars only; batch-norm moving statistics are
// reported separately as state.
struct LayerCost {
  std::string label;
  nn::Shape output;  // batch 1
  std::int64_t params = 0;
  std::int64_t state = 0;
  std::int64_t flops = 0;
};

std::vector<LayerCost> layer_costs(const ArchitectureSpec& spec);
std::vector<LayerCost> layer_costs(const ArchitectureSpec& spec, const InputShape& input);
std::int64_t count_params(const ArchitectureSpec& spec);
std::int64_t count_state(const ArchitectureSpec& spec);
std::int64_t count_flops(const ArchitectureSpec& spec);
std::int64_t count_flops(const ArchitectureSpec& spec, const InputShape& input);

// Spatial shape after the feature extractor (batch 1); throws when a block
// cannot be applied.
nn::Shape feature_shape(const ArchitectureSpec& spec);

}  // namespace coughnet
