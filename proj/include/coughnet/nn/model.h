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
#include <vector>

#include "coughnet/arch.h"
#include "coughnet/nn/layers.h"

namespace coughnet::nn {

// A seed design instantiated as layers: feature extractor, global average
// pool and a single-unit dense head. Outputs are logits; `predict` applies
// the sigmoid.
template <typename Scalar>
class Model {
 public:
  explicit Model(ArchitectureSpec spec, std::uint64_t seed = 0);

  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ArchitectureSpec& spec() const { return spec_; }
  Shape input_shape(Index batch) const {
    return {batch, spec_.input.height, spec_.input.width, spec_.input.channels};
  }

  // Const inference; safe to call concurrently.
  Tensor<Scalar> logits(const Tensor<Scalar>& x) const;
  std::vector<Scalar> predict(const Tensor<Scalar>& x) const;

  // Recording pass for training; returns logits (n, 1, 1, 1).
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode);
  // Backpropagates dL/dlogits, accumulating parameter gradients.
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_logits);

  std::vector<ParamRef<Scalar>> params();
  std::vector<StateRef<Scalar>> state();
  void zero_grad();
  Index param_count();
  Index state_count();

  // Dropout layers reuse their last mask; used by finite-difference checks.
  void freeze_dropout(bool frozen);

  // Copies of every parameter and state tensor, in params()/state() order.
  struct Snapshot {
    std::vector<Tensor<Scalar>> params;
    std::vector<Tensor<Scalar>> state;
  };
  Snapshot snapshot();
  void restore(const Snapshot& snap);

 private:
  struct Named {
    std::string name;
    Layer<Scalar>* layer;
  };

  ArchitectureSpec spec_;
  Sequential<Scalar> net_;
  std::vector<Named> named_;
  std::vector<SpatialDropout<Scalar>*> dropouts_;
};

}  // namespace coughnet::nn
