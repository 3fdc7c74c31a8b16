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

#include "coughnet/arch.h"

#include <map>

#include "coughnet/digest.h"

namespace coughnet {

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::kConv: return "conv";
    case BlockKind::kMaxPool: return "max_pool";
    case BlockKind::kBatchNorm: return "batch_norm";
    case BlockKind::kResidual: return "residual";
    case BlockKind::kDwSep: return "dwsep";
  }
  return "?";
}

BlockKind block_kind_from_string(std::string_view name) {
  for (BlockKind k : {BlockKind::kConv, BlockKind::kMaxPool, BlockKind::kBatchNorm, BlockKind::kResidual,
                      BlockKind::kDwSep}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown block kind '" + std::string(name) + "'");
}

namespace {

bool has_weights(BlockKind k) {
  return k == BlockKind::kConv || k == BlockKind::kResidual || k == BlockKind::kDwSep;
}

BlockSpec conv(int k, int f, int s, int stage) { return {BlockKind::kConv, k, f, s, false, stage}; }
BlockSpec res(int k, int f, int s, int stage) { return {BlockKind::kResidual, k, f, s, s == 2, stage}; }
BlockSpec dw(int k, int f, int s, int stage) { return {BlockKind::kDwSep, k, f, s, s == 2, stage}; }
BlockSpec maxpool(int stage) { return {BlockKind::kMaxPool, 2, 0, 2, false, stage}; }
BlockSpec batchnorm(int stage) { return {BlockKind::kBatchNorm, 0, 0, 1, false, stage}; }

std::map<std::string, std::vector<BlockSpec>, std::less<>> seed_table() {
  return {
      {"cnn",
       {conv(3, 32, 1, 1), conv(3, 32, 1, 1), maxpool(1), conv(3, 64, 1, 2), conv(3, 64, 1, 2), maxpool(2),
        batchnorm(3)}},
      {"res_s", {conv(3, 64, 2, 1), res(3, 64, 2, 2), res(3, 64, 1, 2)}},
      {"res_m", {conv(3, 64, 2, 1), res(3, 64, 2, 2), res(3, 64, 1, 2), res(3, 64, 2, 3), res(3, 64, 1, 3)}},
      {"res_l",
       {conv(7, 64, 2, 1), res(5, 64, 2, 2), res(5, 64, 1, 2), res(3, 64, 2, 3), res(3, 64, 1, 3),
        res(3, 64, 2, 4), res(3, 64, 1, 4)}},
      {"dw_s", {conv(3, 32, 2, 1), dw(3, 64, 2, 2), dw(3, 64, 1, 2), dw(3, 128, 1, 3)}},
      {"dw_m",
       {conv(3, 32, 1, 1), dw(3, 64, 2, 2), dw(3, 64, 1, 2), dw(3, 128, 2, 3), dw(3, 128, 1, 3),
        dw(3, 256, 2, 4), dw(3, 256, 1, 4)}},
      {"dw_l",
       {conv(9, 32, 1, 1), dw(9, 64, 2, 2), dw(9, 64, 1, 2), dw(7, 128, 2, 3), dw(7, 128, 1, 3),
        dw(3, 256, 2, 4), dw(3, 256, 1, 4)}},
  };
}

struct Cursor {
  std::int64_t h, w, c;
  std::int64_t volume() const { return h * w * c; }
};

}  // namespace

const std::vector<std::string>& seed_names() {
  static const std::vector<std::string> names = {"cnn", "res_s", "res_m", "res_l", "dw_s", "dw_m", "dw_l"};
  return names;
}

ArchitectureSpec build_seed(std::string_view name) {
  const auto table = seed_table();
  const auto it = table.find(name);
  if (it == table.end()) throw InvalidArgument("unknown seed design '" + std::string(name) + "'");
  ArchitectureSpec spec;
  spec.name = std::string(name);
  spec.blocks = it->second;
  validate(spec);
  return spec;
}

std::string describe_block(const BlockSpec& b) {
  const std::string k = std::to_string(b.kernel) + "x" + std::to_string(b.kernel);
  std::string out;
  switch (b.kind) {
    case BlockKind::kMaxPool: return "Maxpool 2x2";
    case BlockKind::kBatchNorm: return "Batch Normalization";
    case BlockKind::kConv: out = "Conv "; break;
    case BlockKind::kResidual: out = "Res "; break;
    case BlockKind::kDwSep: out = "DW "; break;
  }
  out += k + ", " + std::to_string(b.filters);
  if (b.stride == 2) out += ", s2";
  if (b.dropout) out += ", d/o";
  return out;
}

void validate(const ArchitectureSpec& spec) {
  const auto fail = [&](std::size_t i, const std::string& what) {
    throw InvalidArgument("architecture '" + spec.name + "' block " + std::to_string(i) + ": " + what);
  };
  if (spec.input.height < 1 || spec.input.width < 1 || spec.input.channels < 1) {
    throw InvalidArgument("architecture '" + spec.name + "': input shape must be positive");
  }
  if (!spec.blocks.empty() && spec.input.channels != 1) {
    throw InvalidArgument("architecture '" + spec.name + "': first block must consume 1 input channel");
  }
  if (!(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0)) {
    throw InvalidArgument("architecture '" + spec.name + "': dropout rate must be in [0, 1)");
  }
  int stage = 1;
  Cursor cur{spec.input.height, spec.input.width, spec.input.channels};
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const BlockSpec& b = spec.blocks[i];
    if (b.stage < stage) fail(i, "stages must be non-decreasing");
    stage = b.stage;
    if (b.stride != 1 && b.stride != 2) fail(i, "stride must be 1 or 2");
    if (b.dropout && !(b.stride == 2 && b.stage > 1 && has_weights(b.kind))) {
      fail(i, "dropout is only placed after stride-2 blocks beyond stage 1");
    }
    switch (b.kind) {
      case BlockKind::kMaxPool:
        if (b.stride != 2 || b.kernel != 2) fail(i, "max-pool must be 2x2 with stride 2");
        if (cur.h < 2 || cur.w < 2) fail(i, "max-pool input smaller than its window");
        cur.h = nn::same_out(cur.h, 2);
        cur.w = nn::same_out(cur.w, 2);
        break;
      case BlockKind::kBatchNorm:
        if (b.stride != 1) fail(i, "batch-norm has no stride");
        break;
      default:
        if (b.kernel < 1) fail(i, "kernel size must be positive");
        if (b.filters < 1) fail(i, "filter count must be positive");
        cur.h = nn::same_out(cur.h, b.stride);
        cur.w = nn::same_out(cur.w, b.stride);
        cur.c = b.filters;
    }
  }
}

nlohmann::json to_json(const ArchitectureSpec& spec) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : spec.blocks) {
    blocks.push_back({{"kind", to_string(b.kind)},
                      {"kernel", b.kernel},
                      {"filters", b.filters},
                      {"stride", b.stride},
                      {"dropout", b.dropout},
                      {"stage", b.stage}});
  }
  return {{"name", spec.name},
          {"input", {spec.input.height, spec.input.width, spec.input.channels}},
          {"activation", nn::to_string(spec.activation)},
          {"dropout_rate", spec.dropout_rate},
          {"blocks", blocks}};
}

ArchitectureSpec spec_from_json(const nlohmann::json& j) {
  try {
    ArchitectureSpec spec;
    spec.name = j.at("name").get<std::string>();
    const auto& in = j.at("input");
    spec.input = {in.at(0).get<int>(), in.at(1).get<int>(), in.at(2).get<int>()};
    spec.activation = nn::activation_from_string(j.at("activation").get<std::string>());
    spec.dropout_rate = j.at("dropout_rate").get<double>();
    for (const auto& b : j.at("blocks")) {
      spec.blocks.push_back({block_kind_from_string(b.at("kind").get<std::string>()), b.at("kernel").get<int>(),
                             b.at("filters").get<int>(), b.at("stride").get<int>(), b.at("dropout").get<bool>(),
                             b.at("stage").get<int>()});
    }
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed architecture description: ") + e.what());
  }
}

std::string spec_digest(const ArchitectureSpec& spec) { return sha256_hex(to_json(spec).dump()); }

std::vector<LayerCost> layer_costs(const ArchitectureSpec& spec) { return layer_costs(spec, spec.input); }

std::vector<LayerCost> layer_costs(const ArchitectureSpec& spec, const InputShape& input) {
  ArchitectureSpec shaped = spec;
  shaped.input = input;
  validate(shaped);
  const std::int64_t act = spec.activation == nn::Activation::kRelu ? 1 : 0;
  std::vector<LayerCost> costs;
  Cursor cur{input.height, input.width, input.channels};
  for (const auto& b : spec.blocks) {
    LayerCost lc;
    lc.label = describe_block(b);
    const std::int64_t k2 = std::int64_t(b.kernel) * b.kernel;
    const std::int64_t cin = cur.c;
    switch (b.kind) {
      case BlockKind::kMaxPool: {
        lc.flops = cur.volume();
        cur.h = nn::same_out(cur.h, 2);
        cur.w = nn::same_out(cur.w, 2);
        break;
      }
      case BlockKind::kBatchNorm: {
        lc.params = 2 * cur.c;
        lc.state = 2 * cur.c;
        lc.flops = 2 * cur.volume();
        break;
      }
      case BlockKind::kConv: {
        cur = {nn::same_out(cur.h, b.stride), nn::same_out(cur.w, b.stride), b.filters};
        lc.params = (k2 * cin + 1) * b.filters;
        lc.flops = (2 * k2 * cin + 1) * cur.volume() + act * cur.volume();
        break;
      }
      case BlockKind::kDwSep: {
        const std::int64_t h = nn::same_out(cur.h, b.stride), w = nn::same_out(cur.w, b.stride);
        lc.params = k2 * cin + cin + (cin + 1) * b.filters;
        lc.flops = (2 * k2 + 1) * h * w * cin + act * h * w * cin + (2 * cin + 1) * h * w * b.filters +
                   act * h * w * b.filters;
        cur = {h, w, b.filters};
        break;
      }
      case BlockKind::kResidual: {
        cur = {nn::same_out(cur.h, b.stride), nn::same_out(cur.w, b.stride), b.filters};
        const std::int64_t f = b.filters, v = cur.volume();
        const bool projection = b.stride != 1 || cin != f;
        lc.params = (k2 * cin + 1) * f + 2 * f + (k2 * f + 1) * f + 2 * f + (projection ? (cin + 1) * f : 0);
        lc.state = 4 * f;
        lc.flops = (2 * k2 * cin + 1) * v + 2 * v + act * v + (2 * k2 * f + 1) * v + 2 * v +
                   (projection ? (2 * cin + 1) * v : 0) + v + act * v;
        break;
      }
    }
    lc.output = {1, cur.h, cur.w, cur.c};
    costs.push_back(lc);
    if (b.dropout) costs.push_back({"SpatialDropout", lc.output, 0, 0, 0});
  }
  LayerCost head;
  head.label = "GlobalAvgPool + Dense + Sigmoid";
  head.output = {1, 1, 1, 1};
  head.params = cur.c + 1;
  head.flops = cur.volume() + (2 * cur.c + 1) + 1;
  costs.push_back(head);
  return costs;
}

std::int64_t count_params(const ArchitectureSpec& spec) {
  std::int64_t total = 0;
  for (const auto& c : layer_costs(spec)) total += c.params;
  return total;
}

std::int64_t count_state(const ArchitectureSpec& spec) {
  std::int64_t total = 0;
  for (const auto& c : layer_costs(spec)) total += c.state;
  return total;
}

std::int64_t count_flops(const ArchitectureSpec& spec) { return count_flops(spec, spec.input); }

std::int64_t count_flops(const ArchitectureSpec& spec, const InputShape& input) {
  std::int64_t total = 0;
  for (const auto& c : layer_costs(spec, input)) total += c.flops;
  return total;
}

nn::Shape feature_shape(const ArchitectureSpec& spec) {
  const auto costs = layer_costs(spec);
  if (costs.size() == 1) return {1, spec.input.height, spec.input.width, spec.input.channels};
  return costs[costs.size() - 2].output;
}

}  // namespace coughnet
