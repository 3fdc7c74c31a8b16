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

#include "coughnet/nn/adam.h"

#include <cmath>

namespace coughnet::nn {

template <typename Scalar>
void Adam<Scalar>::step(const std::vector<ParamRef<Scalar>>& params) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.value->shape());
      v_.emplace_back(p.value->shape());
    }
  }
  if (m_.size() != params.size()) throw InvalidArgument("adam: parameter list changed size");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (!(p.value->shape() == p.grad->shape()) || !(m_[i].shape() == p.value->shape())) {
      throw InvalidArgument("adam: shape mismatch for " + p.name);
    }
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const Scalar b1 = static_cast<Scalar>(options_.beta1);
  const Scalar b2 = static_cast<Scalar>(options_.beta2);
  const Scalar c1 = static_cast<Scalar>(1.0 / (1.0 - std::pow(options_.beta1, t)));
  const Scalar c2 = static_cast<Scalar>(1.0 / (1.0 - std::pow(options_.beta2, t)));
  const Scalar lr = static_cast<Scalar>(options_.learning_rate);
  const Scalar eps = static_cast<Scalar>(options_.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& g = params[i].grad->array();
    auto& m = m_[i].array();
    auto& v = v_[i].array();
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.square();
    params[i].value->array() -= lr * (m * c1) / ((v * c2).sqrt() + eps);
  }
}

template <typename Scalar>
void Adam<Scalar>::restore(std::int64_t steps, std::vector<Tensor<Scalar>> m,
                           std::vector<Tensor<Scalar>> v) {
  if (m.size() != v.size()) throw InvalidArgument("adam: moment lists differ in length");
  steps_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

template class Adam<float>;
template class Adam<double>;

}  // namespace coughnet::nn
