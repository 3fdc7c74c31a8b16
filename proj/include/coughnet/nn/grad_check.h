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
#include <functional>
#include <string>
#include <vector>

#include "coughnet/nn/layers.h"
#include "coughnet/nn/model.h"

namespace coughnet::nn {

struct GradCheckOptions {
  double step = 1e-5;           // central-difference half step
  double denominator_floor = 1e-3;
  Index max_per_tensor = 0;     // 0 checks every element; otherwise a seeded sample
  bool check_input = true;
  std::uint64_t seed = 0;
};

struct GradCheckEntry {
  std::string name;
  Index checked = 0;
  double max_abs_error = 0;
  double max_rel_error = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;

  double max_rel_error() const;
  double max_abs_error() const;
};

// |a - n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor);

// A tensor whose elements are perturbed in place, and the analytic gradient
// of the loss with respect to it.
struct Probe {
  std::string name;
  Tensor<double>* value;
  Tensor<double> analytic;
};

// Compares each probe's analytic gradient against central differences of `loss`.
GradCheckReport compare_gradients(const std::function<double()>& loss, std::vector<Probe>& probes,
                                  const GradCheckOptions& options);

enum class CheckHead {
  kProjection,  // L = sum(r * y) with fixed random r
  kSigmoidBce,  // L = mean BCE(sigmoid(y), labels) over a (n, 1, 1, 1) output
};

// Checks a single layer on input `x`. Dropout masks should be frozen first.
GradCheckReport check_layer(Layer<double>& layer, const Tensor<double>& x, Mode mode, const GradCheckOptions& options,
                            CheckHead head = CheckHead::kProjection, const std::vector<double>& labels = {});

// Whole-model check under mean BCE with dropout masks frozen.
GradCheckReport check_model(Model<double>& model, const Tensor<double>& x, const std::vector<double>& labels,
                            const GradCheckOptions& options);

}  // namespace coughnet::nn
