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

#include <algorithm>
#include <cmath>
#include <span>

#include "coughnet/error.h"

namespace coughnet::nn {

inline constexpr double kProbClip = 1e-7;

template <typename Scalar>
Scalar clip_probability(Scalar p) {
  return std::clamp(p, Scalar(kProbClip), Scalar(1 - kProbClip));
}

// Binary cross-entropy on a probability clipped to [1e-7, 1 - 1e-7].
template <typename Scalar>
Scalar bce_loss(Scalar p, Scalar y) {
  const Scalar q = clip_probability(p);
  return -(y * std::log(q) + (Scalar(1) - y) * std::log(Scalar(1) - q));
}

// dL/dp; zero where the clip is active.
template <typename Scalar>
Scalar bce_loss_grad(Scalar p, Scalar y) {
  if (p < Scalar(kProbClip) || p > Scalar(1 - kProbClip)) return Scalar(0);
  return -y / p + (Scalar(1) - y) / (Scalar(1) - p);
}

template <typename Scalar>
Scalar bce_mean(std::span<const Scalar> p, std::span<const Scalar> y) {
  if (p.size() != y.size()) throw InvalidArgument("bce: size mismatch");
  if (p.empty()) return Scalar(0);
  Scalar sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += bce_loss(p[i], y[i]);
  return sum / static_cast<Scalar>(p.size());
}

}  // namespace coughnet::nn
