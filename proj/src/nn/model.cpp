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

#include "coughnet/nn/model.h"

namespace coughnet::nn {

template <typename Scalar>
Model<Scalar>::Model(ArchitectureSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  validate(spec_);
  Index channels = spec_.input.channels;
  const auto add = [&](LayerPtr<Scalar> layer, std::string name) {
    if (!name.empty()) named_.push_back({std::move(name), layer.get()});
    net_.add(std::move(layer));
  };
  for (std::size_t i = 0; i < spec_.blocks.size(); ++i) {
    const BlockSpec& b = spec_.blocks[i];
    const std::string prefix = "block" + std::to_string(i) + ".";
    switch (b.kind) {
      case BlockKind::kConv:
        add(std::make_unique<Conv2d<Scalar>>(b.kernel, channels, b.filters, b.stride), prefix + "conv.");
        add(std::make_unique<ActivationLayer<Scalar>>(spec_.activation), "");
        channels = b.filters;
        break;
      case BlockKind::kDwSep:
        add(std::make_unique<DwSepConv2d<Scalar>>(b.kernel, channels, b.filters, b.stride, spec_.activation),
            prefix + "dwsep.");
        channels = b.filters;
        break;
      case BlockKind::kResidual:
        add(std::make_unique<ResidualBlock<Scalar>>(b.kernel, channels, b.filters, b.stride, spec_.activation),
            prefix + "res.");
        channels = b.filters;
        break;
      case BlockKind::kMaxPool:
        add(std::make_unique<MaxPool2d<Scalar>>(), "");
        break;
      case BlockKind::kBatchNorm:
        add(std::make_unique<BatchNorm<Scalar>>(channels), prefix + "bn.");
        break;
    }
    if (b.dropout) {
      auto drop = std::make_unique<SpatialDropout<Scalar>>(spec_.dropout_rate, seed * 1000003u + i);
      dropouts_.push_back(drop.get());
      add(std::move(drop), "");
    }
  }
  add(std::make_unique<GlobalAvgPool<Scalar>>(), "");
  add(std::make_unique<Dense<Scalar>>(channels, 1), "head.dense.");
  Rng rng(seed);
  net_.initialize(rng);
}

template <typename Scalar>
Tensor<Scalar> Model<Scalar>::logits(const Tensor<Scalar>& x) const {
  check_shape(x.shape(), input_shape(x.shape().n), "model input");
  return net_.infer(x);
}

template <typename Scalar>
std::vector<Scalar> Model<Scalar>::predict(const Tensor<Scalar>& x) const {
  const Tensor<Scalar> z = logits(x);
  std::vector<Scalar> p(static_cast<std::size_t>(z.size()));
  for (Index i = 0; i < z.size(); ++i) p[static_cast<std::size_t>(i)] = stable_sigmoid(z[i]);
  return p;
}

template <typename Scalar>
Tensor<Scalar> Model<Scalar>::forward(const Tensor<Scalar>& x, Mode mode) {
  check_shape(x.shape(), input_shape(x.shape().n), "model input");
  return net_.forward(x, mode);
}

template <typename Scalar>
Tensor<Scalar> Model<Scalar>::backward(const Tensor<Scalar>& grad_logits) {
  return net_.backward(grad_logits);
}

template <typename Scalar>
std::vector<ParamRef<Scalar>> Model<Scalar>::params() {
  std::vector<ParamRef<Scalar>> out;
  for (auto& n : named_) n.layer->collect_params(n.name, out);
  return out;
}

template <typename Scalar>
std::vector<StateRef<Scalar>> Model<Scalar>::state() {
  std::vector<StateRef<Scalar>> out;
  for (auto& n : named_) n.layer->collect_state(n.name, out);
  return out;
}

template <typename Scalar>
void Model<Scalar>::zero_grad() {
  for (auto& p : params()) p.grad->setZero();
}

template <typename Scalar>
Index Model<Scalar>::param_count() {
  Index total = 0;
  for (auto& p : params()) total += p.value->size();
  return total;
}

template <typename Scalar>
Index Model<Scalar>::state_count() {
  Index total = 0;
  for (auto& s : state()) total += s.value->size();
  return total;
}

template <typename Scalar>
void Model<Scalar>::freeze_dropout(bool frozen) {
  for (auto* d : dropouts_) d->freeze_mask(frozen);
}

template <typename Scalar>
typename Model<Scalar>::Snapshot Model<Scalar>::snapshot() {
  Snapshot snap;
  for (auto& p : params()) snap.params.push_back(*p.value);
  for (auto& s : state()) snap.state.push_back(*s.value);
  return snap;
}

template <typename Scalar>
void Model<Scalar>::restore(const Snapshot& snap) {
  auto ps = params();
  auto ss = state();
  if (ps.size() != snap.params.size() || ss.size() != snap.state.size()) {
    throw InvalidArgument("model restore: snapshot does not match architecture");
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    check_shape(snap.params[i].shape(), ps[i].value->shape(), "model restore");
    *ps[i].value = snap.params[i];
  }
  for (std::size_t i = 0; i < ss.size(); ++i) {
    check_shape(snap.state[i].shape(), ss[i].value->shape(), "model restore");
    *ss[i].value = snap.state[i];
  }
}

template class Model<float>;
template class Model<double>;

}  // namespace coughnet::nn
