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
#include <vector>

#include "coughnet/nn/layers.h"

namespace coughnet::nn {

struct AdamOptions {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

// Adam with bias correction. Moments are allocated on the first step and
// matched to parameters by position.
template <typename Scalar>
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  void step(const std::vector<ParamRef<Scalar>>& params);

  const AdamOptions& options() const { return options_; }
  double learning_rate() const { return options_.learning_rate; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  std::int64_t steps() const { return steps_; }

  // Exposed for checkpointing.
  std::vector<Tensor<Scalar>>& first_moments() { return m_; }
  std::vector<Tensor<Scalar>>& second_moments() { return v_; }
  const std::vector<Tensor<Scalar>>& first_moments() const { return m_; }
  const std::vector<Tensor<Scalar>>& second_moments() const { return v_; }
  void restore(std::int64_t steps, std::vector<Tensor<Scalar>> m, std::vector<Tensor<Scalar>> v);

 private:
  AdamOptions options_;
  std::int64_t steps_ = 0;
  std::vector<Tensor<Scalar>> m_, v_;
};

}  // namespace coughnet::nn
