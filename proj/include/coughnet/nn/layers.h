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

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "coughnet/nn/tensor.h"

namespace coughnet::nn {

enum class Mode { kTrain, kInfer };
enum class Activation { kRelu, kLinear };

std::string_view to_string(Activation act);
Activation activation_from_string(std::string_view name);

template <typename Scalar>
struct ParamRef {
  std::string name;
  Tensor<Scalar>* value;
  Tensor<Scalar>* grad;
};

template <typename Scalar>
struct StateRef {
  std::string name;
  Tensor<Scalar>* value;
};

using Rng = std::mt19937_64;

// Every layer offers a pure `infer` (no mutation, safe to share across
// threads) and a recording `forward` whose cache feeds `backward`.
// `backward` returns dL/dx and accumulates into the parameter gradients.
template <typename Scalar>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string_view kind() const = 0;
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual Tensor<Scalar> infer(const Tensor<Scalar>& x) const = 0;
  virtual Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) = 0;
  virtual Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) = 0;

  virtual void initialize(Rng& /*rng*/) {}
  virtual void collect_params(const std::string& /*prefix*/, std::vector<ParamRef<Scalar>>& /*out*/) {}
  virtual void collect_state(const std::string& /*prefix*/, std::vector<StateRef<Scalar>>& /*out*/) {}
};

template <typename Scalar>
using LayerPtr = std::unique_ptr<Layer<Scalar>>;

template <typename Scalar>
class Conv2d final : public Layer<Scalar> {
 public:
  Conv2d(Index kernel, Index in_channels, Index filters, Index stride);

  std::string_view kind() const override { return "conv2d"; }
  Shape output_shape(const Shape& in) const override;
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;
  void initialize(Rng& rng) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) override;

  Tensor<Scalar>& kernel() { return kernel_; }
  Tensor<Scalar>& bias() { return bias_; }
  Index kernel_size() const { return k_; }
  Index stride() const { return stride_; }

 private:
  using RowMatrix = typename Tensor<Scalar>::RowMatrix;
  void im2col(const Tensor<Scalar>& x, Index n, RowMatrix& col) const;
  void col2im(const RowMatrix& col, Index n, Tensor<Scalar>& dx) const;
  void check_input(const Shape& in) const;

  Index k_, c_in_, c_out_, stride_;
  Tensor<Scalar> kernel_, bias_, kernel_grad_, bias_grad_;
  Tensor<Scalar> input_;
};

// Per-channel k x k convolution (channel multiplier 1).
template <typename Scalar>
class DepthwiseConv2d final : public Layer<Scalar> {
 public:
  DepthwiseConv2d(Index kernel, Index channels, Index stride);

  std::string_view kind() const override { return "depthwise_conv2d"; }
  Shape output_shape(const Shape& in) const override;
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;
  void initialize(Rng& rng) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) override;

  Tensor<Scalar>& kernel() { return kernel_; }
  Tensor<Scalar>& bias() { return bias_; }

 private:
  void check_input(const Shape& in) const;

  Index k_, channels_, stride_;
  Tensor<Scalar> kernel_, bias_, kernel_grad_, bias_grad_;
  Tensor<Scalar> input_;
};

template <typename Scalar>
class ActivationLayer final : public Layer<Scalar> {
 public:
  explicit ActivationLayer(Activation act) : act_(act) {}

  std::string_view kind() const override { return "activation"; }
  Shape output_shape(const Shape& in) const override { return in; }
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;

 private:
  Activation act_;
  Tensor<Scalar> output_;
};

template <typename Scalar>
class BatchNorm final : public Layer<Scalar> {
 public:
  explicit BatchNorm(Index channels, Scalar momentum = Scalar(0.99), Scalar epsilon = Scalar(1e-3));

  std::string_view kind() const override { return "batch_norm"; }
  Shape output_shape(const Shape& in) const override { return in; }
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;
  void initialize(Rng& rng) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) override;
  void collect_state(const std::string& prefix, std::vector<StateRef<Scalar>>& out) override;

  Tensor<Scalar>& gamma() { return gamma_; }
  Tensor<Scalar>& beta() { return beta_; }
  Tensor<Scalar>& moving_mean() { return moving_mean_; }
  Tensor<Scalar>& moving_variance() { return moving_var_; }

 private:
  using RowVector = Eigen::Array<Scalar, 1, Eigen::Dynamic>;

  Index channels_;
  Scalar momentum_, epsilon_;
  Tensor<Scalar> gamma_, beta_, gamma_grad_, beta_grad_, moving_mean_, moving_var_;
  // Cache of the last forward.
  Mode mode_ = Mode::kInfer;
  Tensor<Scalar> xhat_;
  RowVector inv_std_;
};

// Zeroes whole channels; inverted scaling keeps the expectation unchanged.
template <typename Scalar>
class SpatialDropout final : public Layer<Scalar> {
 public:
  SpatialDropout(double rate, std::uint64_t seed);

  std::string_view kind() const override { return "spatial_dropout"; }
  Shape output_shape(const Shape& in) const override { return in; }
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override { return x; }
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;

  double rate() const { return rate_; }
  void reseed(std::uint64_t seed) { rng_.seed(seed); }
  // Reuse the previous mask instead of drawing a new one (finite-difference checks).
  void freeze_mask(bool frozen) { frozen_ = frozen; }
  const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& mask() const { return mask_; }

 private:
  double rate_;
  Rng rng_;
  bool frozen_ = false;
  Mode mode_ = Mode::kInfer;
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> mask_;  // batch x channels
};

// 2x2 window, stride 2, `same` padding (padded cells never win).
template <typename Scalar>
class MaxPool2d final : public Layer<Scalar> {
 public:
  MaxPool2d() = default;

  std::string_view kind() const override { return "max_pool"; }
  Shape output_shape(const Shape& in) const override;
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;

 private:
  Tensor<Scalar> pool(const Tensor<Scalar>& x, std::vector<Index>* argmax) const;

  Shape input_shape_;
  std::vector<Index> argmax_;
};

template <typename Scalar>
class GlobalAvgPool final : public Layer<Scalar> {
 public:
  std::string_view kind() const override { return "global_avg_pool"; }
  Shape output_shape(const Shape& in) const override { return {in.n, 1, 1, in.c}; }
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;

 private:
  Shape input_shape_;
};

// Fully connected on the flattened sample; output (n, 1, 1, units).
template <typename Scalar>
class Dense final : public Layer<Scalar> {
 public:
  Dense(Index inputs, Index units);

  std::string_view kind() const override { return "dense"; }
  Shape output_shape(const Shape& in) const override { return {in.n, 1, 1, units_}; }
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;
  void initialize(Rng& rng) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) override;

  Tensor<Scalar>& weights() { return weights_; }
  Tensor<Scalar>& bias() { return bias_; }

 private:
  Index inputs_, units_;
  Tensor<Scalar> weights_, bias_, weights_grad_, bias_grad_;
  Tensor<Scalar> input_;
};

template <typename Scalar>
class Sequential : public Layer<Scalar> {
 public:
  Sequential() = default;

  void add(LayerPtr<Scalar> layer) { layers_.push_back(std::move(layer)); }
  std::size_t size() const { return layers_.size(); }
  Layer<Scalar>& at(std::size_t i) { return *layers_.at(i); }
  const Layer<Scalar>& at(std::size_t i) const { return *layers_.at(i); }

  std::string_view kind() const override { return "sequential"; }
  Shape output_shape(const Shape& in) const override;
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;
  void initialize(Rng& rng) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) override;
  void collect_state(const std::string& prefix, std::vector<StateRef<Scalar>>& out) override;

 private:
  std::vector<LayerPtr<Scalar>> layers_;
};

// Depthwise k x k (stride here) -> act -> pointwise 1x1 -> act.
template <typename Scalar>
class DwSepConv2d final : public Layer<Scalar> {
 public:
  DwSepConv2d(Index kernel, Index in_channels, Index filters, Index stride, Activation act);

  std::string_view kind() const override { return "dwsep_conv2d"; }
  Shape output_shape(const Shape& in) const override { return body_.output_shape(in); }
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override { return body_.infer(x); }
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override { return body_.forward(x, mode); }
  Tensor<Scalar> backward(const Tensor<Scalar>& g) override { return body_.backward(g); }
  void initialize(Rng& rng) override { body_.initialize(rng); }
  void collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) override;

  DepthwiseConv2d<Scalar>& depthwise() { return static_cast<DepthwiseConv2d<Scalar>&>(body_.at(0)); }
  Conv2d<Scalar>& pointwise() { return static_cast<Conv2d<Scalar>&>(body_.at(2)); }

 private:
  Sequential<Scalar> body_;
};

// y = act(BN(conv2(act(BN(conv1(x))))) + shortcut(x)); the shortcut is a 1x1
// projection with the block's stride whenever stride != 1 or channels change.
template <typename Scalar>
class ResidualBlock final : public Layer<Scalar> {
 public:
  ResidualBlock(Index kernel, Index in_channels, Index filters, Index stride, Activation act);

  std::string_view kind() const override { return "residual_block"; }
  Shape output_shape(const Shape& in) const override { return main_.output_shape(in); }
  Tensor<Scalar> infer(const Tensor<Scalar>& x) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override;
  void initialize(Rng& rng) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) override;
  void collect_state(const std::string& prefix, std::vector<StateRef<Scalar>>& out) override;

  bool has_projection() const { return projection_ != nullptr; }
  Sequential<Scalar>& main_branch() { return main_; }
  Conv2d<Scalar>* projection() { return projection_.get(); }

 private:
  Sequential<Scalar> main_;  // conv1, bn1, act, conv2, bn2
  std::unique_ptr<Conv2d<Scalar>> projection_;
  ActivationLayer<Scalar> out_act_;
};

template <typename Scalar>
Scalar stable_sigmoid(Scalar z) {
  if (z >= 0) {
    return Scalar(1) / (Scalar(1) + std::exp(-z));
  }
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

}  // namespace coughnet::nn
