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

#include <gtest/gtest.h>

#include <random>

#include "coughnet/arch.h"
#include "coughnet/nn/model.h"
#include "reference.h"

namespace coughnet {
namespace {

TEST(Arch, SeedCatalogue) {
  ASSERT_EQ(seed_names().size(), 7u);
  for (const auto& name : seed_names()) {
    const ArchitectureSpec spec = build_seed(name);
    EXPECT_EQ(spec.name, name);
    EXPECT_NO_THROW(validate(spec));
    EXPECT_EQ(feature_shape(spec).n, 1);
  }
  EXPECT_THROW(build_seed("vgg"), InvalidArgument);
}

TEST(Arch, CnnSeedCounts) {
  const ArchitectureSpec cnn = build_seed("cnn");
  EXPECT_EQ(count_params(cnn), 65185);
  // Moving mean and variance for every batch-norm channel, residual blocks holding two.
  std::int64_t state = 0, channels = cnn.input.channels;
  for (const auto& b : cnn.blocks) {
    if (b.kind == BlockKind::kBatchNorm) state += 2 * channels;
    if (b.kind == BlockKind::kResidual) state += 4 * b.filters;
    if (b.filters > 0) channels = b.filters;
  }
  EXPECT_GT(state, 0);
  EXPECT_EQ(count_state(cnn), state);
}

TEST(Arch, LayerCostsSumToTotals) {
  for (const auto& name : seed_names()) {
    const ArchitectureSpec spec = build_seed(name);
    std::int64_t params = 0, flops = 0;
    for (const auto& c : layer_costs(spec)) {
      params += c.params;
      flops += c.flops;
    }
    EXPECT_EQ(params, count_params(spec)) << name;
    EXPECT_EQ(flops, count_flops(spec)) << name;
  }
}

TEST(Arch, FlopsMatchInstrumentedCountOnSmallInputs) {
  std::mt19937_64 rng(1);
  for (const auto& name : seed_names()) {
    ArchitectureSpec spec = build_seed(name);
    spec.input = {21, 37, 1};  // odd sizes exercise asymmetric padding
    nn::Model<double> model(spec, 2);
    testing::NamedTensors named;
    for (auto& p : model.params()) named[p.name] = p.value;
    for (auto& s : model.state()) named[s.name] = s.value;
    nn::Tensor<double> x(model.input_shape(1));
    for (nn::Index i = 0; i < x.size(); ++i) x[i] = std::uniform_real_distribution<double>(-3, 3)(rng);
    testing::OpCounter counter;
    const double logit = testing::reference_logit(spec, named, x, counter);
    EXPECT_EQ(counter.events, count_flops(spec)) << name;
    EXPECT_NEAR(logit, model.logits(x)[0], 1e-9 * std::max(1.0, std::abs(logit))) << name;
  }
}

TEST(Arch, DepthwiseSmallAndMediumAreCheapest) {
  const auto f = [](const char* n) { return count_flops(build_seed(n)); };
  for (const char* other : {"cnn", "res_s", "res_m", "res_l", "dw_l"}) {
    EXPECT_LT(f("dw_s"), f(other));
    EXPECT_LT(f("dw_m"), f(other));
  }
}

TEST(Arch, JsonRoundTripAndDigest) {
  for (const auto& name : seed_names()) {
    const ArchitectureSpec spec = build_seed(name);
    const ArchitectureSpec back = spec_from_json(to_json(spec));
    EXPECT_EQ(back, spec);
    EXPECT_EQ(spec_digest(back), spec_digest(spec));
  }
  ArchitectureSpec changed = build_seed("cnn");
  changed.blocks[0].filters += 1;
  EXPECT_NE(spec_digest(changed), spec_digest(build_seed("cnn")));
  EXPECT_THROW(spec_from_json(nlohmann::json{{"name", "x"}}), DataError);
}

TEST(Arch, ValidationRejectsIllegalDesigns) {
  ArchitectureSpec s = build_seed("cnn");
  s.blocks[0].stride = 3;
  EXPECT_THROW(validate(s), InvalidArgument);

  s = build_seed("cnn");
  s.blocks[0].dropout = true;  // stage 1
  EXPECT_THROW(validate(s), InvalidArgument);

  s = build_seed("cnn");
  s.input.channels = 2;
  EXPECT_THROW(validate(s), InvalidArgument);

  s = build_seed("cnn");
  s.dropout_rate = 1.0;
  EXPECT_THROW(validate(s), InvalidArgument);

  // Eleven stride-2 stages shrink a 32-row input below a pooling window.
  s = build_seed("cnn");
  s.blocks.clear();
  for (int i = 0; i < 11; ++i) s.blocks.push_back({BlockKind::kMaxPool, 2, 0, 2, false, 1});
  EXPECT_THROW(validate(s), InvalidArgument);
}

TEST(Arch, DescribeBlockLabels) {
  EXPECT_EQ(describe_block({BlockKind::kConv, 3, 32, 2, true, 2}), "Conv 3x3, 32, s2, d/o");
  EXPECT_EQ(describe_block({BlockKind::kDwSep, 5, 64, 1, false, 3}), "DW 5x5, 64");
  EXPECT_EQ(describe_block({BlockKind::kMaxPool, 2, 0, 2, false, 1}), "Maxpool 2x2");
  EXPECT_EQ(to_string(block_kind_from_string("residual")), "residual");
}

}  // namespace
}  // namespace coughnet
