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

#include "coughnet/nn/layers.h"

#include <cmath>
#include <limits>

namespace coughnet::nn {

std::string_view to_string(Activation act) {
  return act == Activation::kRelu ? "relu" : "linear";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "linear") return Activation::kLinear;
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

namespace {

template <typename Scalar>
using ArrayMap = Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, 1>>;
template <typename Scalar>
using ConstArrayMap = Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, 1>>;
template <typename Scalar>
using RowArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
void glorot_uniform(Tensor<Scalar>& t, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Index i = 0; i < t.size(); ++i) t[i] = static_cast<Scalar>(dist(rng));
}

void check_stride(Index stride) {
  if (stride != 1 && stride != 2) throw InvalidArgument("stride must be 1 or 2");
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

template <typename Scalar>
Conv2d<Scalar>::Conv2d(Index kernel, Index in_channels, Index filters, Index stride)
    : k_(kernel),
      c_in_(in_channels),
      c_out_(filters),
      stride_(stride),
      kernel_(kernel, kernel, in_channels, filters),
      bias_(1, 1, 1, filters),
      kernel_grad_(kernel, kernel, in_channels, filters),
      bias_grad_(1, 1, 1, filters) {
  if (kernel < 1 || in_channels < 1 || filters < 1) throw InvalidArgument("conv2d: bad dimensions");
  check_stride(stride);
}

template <typename Scalar>
void Conv2d<Scalar>::check_input(const Shape& in) const {
  if (in.c != c_in_) {
    throw InvalidArgument("conv2d: expected " + std::to_string(c_in_) + " input channels, got " +
                          std::to_string(in.c));
  }
}

template <typename Scalar>
Shape Conv2d<Scalar>::output_shape(const Shape& in) const {
  check_input(in);
  return {in.n, same_out(in.h, stride_), same_out(in.w, stride_), c_out_};
}

template <typename Scalar>
void Conv2d<Scalar>::im2col(const Tensor<Scalar>& x, Index n, RowMatrix& col) const {
  const Shape& s = x.shape();
  const Index ho = same_out(s.h, stride_), wo = same_out(s.w, stride_);
  const Index ph = same_pad_begin(s.h, k_, stride_), pw = same_pad_begin(s.w, k_, stride_);
  const Index cols = k_ * k_ * c_in_;
  col.resize(ho * wo, cols);
  const Scalar* src = x.data() + n * s.sample_size();
  for (Index oh = 0; oh < ho; ++oh) {
    for (Index ow = 0; ow < wo; ++ow) {
      Scalar* row = col.data() + (oh * wo + ow) * cols;
      for (Index u = 0; u < k_; ++u) {
        const Index ih = oh * stride_ + u - ph;
        for (Index v = 0; v < k_; ++v) {
          const Index iw = ow * stride_ + v - pw;
          Scalar* dst = row + (u * k_ + v) * c_in_;
          if (ih < 0 || ih >= s.h || iw < 0 || iw >= s.w) {
            std::fill(dst, dst + c_in_, Scalar(0));
          } else {
            const Scalar* p = src + (ih * s.w + iw) * c_in_;
            std::copy(p, p + c_in_, dst);
          }
        }
      }
    }
  }
}

template <typename Scalar>
void Conv2d<Scalar>::col2im(const RowMatrix& col, Index n, Tensor<Scalar>& dx) const {
  const Shape& s = dx.shape();
  const Index ho = same_out(s.h, stride_), wo = same_out(s.w, stride_);
  const Index ph = same_pad_begin(s.h, k_, stride_), pw = same_pad_begin(s.w, k_, stride_);
  const Index cols = k_ * k_ * c_in_;
  Scalar* dst = dx.data() + n * s.sample_size();
  for (Index oh = 0; oh < ho; ++oh) {
    for (Index ow = 0; ow < wo; ++ow) {
      const Scalar* row = col.data() + (oh * wo + ow) * cols;
      for (Index u = 0; u < k_; ++u) {
        const Index ih = oh * stride_ + u - ph;
        if (ih < 0 || ih >= s.h) continue;
        for (Index v = 0; v < k_; ++v) {
          const Index iw = ow * stride_ + v - pw;
          if (iw < 0 || iw >= s.w) continue;
          ArrayMap<Scalar>(dst + (ih * s.w + iw) * c_in_, c_in_) +=
              ConstArrayMap<Scalar>(row + (u * k_ + v) * c_in_, c_in_);
        }
      }
    }
  }
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::infer(const Tensor<Scalar>& x) const {
  Tensor<Scalar> out(output_shape(x.shape()));
  typename Tensor<Scalar>::ConstMatrixMap w(kernel_.data(), k_ * k_ * c_in_, c_out_);
  Eigen::Map<const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>> b(bias_.data(), c_out_);
  RowMatrix col;
  for (Index n = 0; n < x.shape().n; ++n) {
    auto y = out.sample(n);
    if (k_ == 1 && stride_ == 1) {
      y.noalias() = x.sample(n) * w;
    } else {
      im2col(x, n, col);
      y.noalias() = col * w;
    }
    y.rowwise() += b;
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::forward(const Tensor<Scalar>& x, Mode /*mode*/) {
  input_ = x;
  return infer(x);
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  check_shape(grad_out.shape(), output_shape(input_.shape()), "conv2d backward");
  Tensor<Scalar> dx(input_.shape());
  typename Tensor<Scalar>::ConstMatrixMap w(kernel_.data(), k_ * k_ * c_in_, c_out_);
  typename Tensor<Scalar>::MatrixMap dw(kernel_grad_.data(), k_ * k_ * c_in_, c_out_);
  Eigen::Map<Eigen::Matrix<Scalar, 1, Eigen::Dynamic>> db(bias_grad_.data(), c_out_);
  RowMatrix col, dcol;
  for (Index n = 0; n < input_.shape().n; ++n) {
    const auto g = grad_out.sample(n);
    if (k_ == 1 && stride_ == 1) {
      dw.noalias() += input_.sample(n).transpose() * g;
      dx.sample(n).noalias() = g * w.transpose();
    } else {
      im2col(input_, n, col);
      dw.noalias() += col.transpose() * g;
      dcol.noalias() = g * w.transpose();
      col2im(dcol, n, dx);
    }
    db += g.colwise().sum();
  }
  return dx;
}

template <typename Scalar>
void Conv2d<Scalar>::initialize(Rng& rng) {
  glorot_uniform(kernel_, double(k_ * k_ * c_in_), double(k_ * k_ * c_out_), rng);
  bias_.setZero();
}

template <typename Scalar>
void Conv2d<Scalar>::collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) {
  out.push_back({prefix + "kernel", &kernel_, &kernel_grad_});
  out.push_back({prefix + "bias", &bias_, &bias_grad_});
}

// ------------------------------------------------------- DepthwiseConv2d

template <typename Scalar>
DepthwiseConv2d<Scalar>::DepthwiseConv2d(Index kernel, Index channels, Index stride)
    : k_(kernel),
      channels_(channels),
      stride_(stride),
      kernel_(kernel, kernel, channels, 1),
      bias_(1, 1, 1, channels),
      kernel_grad_(kernel, kernel, channels, 1),
      bias_grad_(1, 1, 1, channels) {
  if (kernel < 1 || channels < 1) throw InvalidArgument("depthwise_conv2d: bad dimensions");
  check_stride(stride);
}

template <typename Scalar>
void DepthwiseConv2d<Scalar>::check_input(const Shape& in) const {
  if (in.c != channels_) throw InvalidArgument("depthwise_conv2d: channel mismatch");
}

template <typename Scalar>
Shape DepthwiseConv2d<Scalar>::output_shape(const Shape& in) const {
  check_input(in);
  return {in.n, same_out(in.h, stride_), same_out(in.w, stride_), channels_};
}

template <typename Scalar>
Tensor<Scalar> DepthwiseConv2d<Scalar>::infer(const Tensor<Scalar>& x) const {
  const Shape s = x.shape();
  Tensor<Scalar> out(output_shape(s));
  const Index ho = out.shape().h, wo = out.shape().w, c = channels_;
  const Index ph = same_pad_begin(s.h, k_, stride_), pw = same_pad_begin(s.w, k_, stride_);
  const ConstArrayMap<Scalar> b(bias_.data(), c);
  for (Index n = 0; n < s.n; ++n) {
    const Scalar* src = x.data() + n * s.sample_size();
    Scalar* dst = out.data() + n * out.shape().sample_size();
    for (Index oh = 0; oh < ho; ++oh) {
      for (Index ow = 0; ow < wo; ++ow) {
        ArrayMap<Scalar> acc(dst + (oh * wo + ow) * c, c);
        acc = b;
        for (Index u = 0; u < k_; ++u) {
          const Index ih = oh * stride_ + u - ph;
          if (ih < 0 || ih >= s.h) continue;
          for (Index v = 0; v < k_; ++v) {
            const Index iw = ow * stride_ + v - pw;
            if (iw < 0 || iw >= s.w) continue;
            acc += ConstArrayMap<Scalar>(src + (ih * s.w + iw) * c, c) *
                   ConstArrayMap<Scalar>(kernel_.data() + (u * k_ + v) * c, c);
          }
        }
      }
    }
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> DepthwiseConv2d<Scalar>::forward(const Tensor<Scalar>& x, Mode /*mode*/) {
  input_ = x;
  return infer(x);
}

template <typename Scalar>
Tensor<Scalar> DepthwiseConv2d<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  const Shape s = input_.shape();
  check_shape(grad_out.shape(), output_shape(s), "depthwise_conv2d backward");
  Tensor<Scalar> dx(s);
  const Index ho = grad_out.shape().h, wo = grad_out.shape().w, c = channels_;
  const Index ph = same_pad_begin(s.h, k_, stride_), pw = same_pad_begin(s.w, k_, stride_);
  ArrayMap<Scalar> db(bias_grad_.data(), c);
  for (Index n = 0; n < s.n; ++n) {
    const Scalar* src = input_.data() + n * s.sample_size();
    Scalar* dsrc = dx.data() + n * s.sample_size();
    const Scalar* g = grad_out.data() + n * grad_out.shape().sample_size();
    for (Index oh = 0; oh < ho; ++oh) {
      for (Index ow = 0; ow < wo; ++ow) {
        const ConstArrayMap<Scalar> go(g + (oh * wo + ow) * c, c);
        db += go;
        for (Index u = 0; u < k_; ++u) {
          const Index ih = oh * stride_ + u - ph;
          if (ih < 0 || ih >= s.h) continue;
          for (Index v = 0; v < k_; ++v) {
            const Index iw = ow * stride_ + v - pw;
            if (iw < 0 || iw >= s.w) continue;
            const Index tap = (u * k_ + v) * c;
            const Index at = (ih * s.w + iw) * c;
            ArrayMap<Scalar>(kernel_grad_.data() + tap, c) += ConstArrayMap<Scalar>(src + at, c) * go;
            ArrayMap<Scalar>(dsrc + at, c) += ConstArrayMap<Scalar>(kernel_.data() + tap, c) * go;
          }
        }
      }
    }
  }
  return dx;
}

template <typename Scalar>
void DepthwiseConv2d<Scalar>::initialize(Rng& rng) {
  glorot_uniform(kernel_, double(k_ * k_), double(k_ * k_), rng);
  bias_.setZero();
}

template <typename Scalar>
void DepthwiseConv2d<Scalar>::collect_params(const std::string& prefix,
                                             std::vector<ParamRef<Scalar>>& out) {
  out.push_back({prefix + "kernel", &kernel_, &kernel_grad_});
  out.push_back({prefix + "bias", &bias_, &bias_grad_});
}

// ------------------------------------------------------- ActivationLayer

template <typename Scalar>
Tensor<Scalar> ActivationLayer<Scalar>::infer(const Tensor<Scalar>& x) const {
  if (act_ == Activation::kLinear) return x;
  Tensor<Scalar> out(x.shape());
  out.array() = x.array().max(Scalar(0));
  return out;
}

template <typename Scalar>
Tensor<Scalar> ActivationLayer<Scalar>::forward(const Tensor<Scalar>& x, Mode /*mode*/) {
  output_ = infer(x);
  return output_;
}

template <typename Scalar>
Tensor<Scalar> ActivationLayer<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  check_shape(grad_out.shape(), output_.shape(), "activation backward");
  if (act_ == Activation::kLinear) return grad_out;
  Tensor<Scalar> dx(grad_out.shape());
  dx.array() = (output_.array() > Scalar(0)).select(grad_out.array(), Scalar(0));
  return dx;
}

// ------------------------------------------------------------- BatchNorm

template <typename Scalar>
BatchNorm<Scalar>::BatchNorm(Index channels, Scalar momentum, Scalar epsilon)
    : channels_(channels),
      momentum_(momentum),
      epsilon_(epsilon),
      gamma_(Tensor<Scalar>::Constant({1, 1, 1, channels}, Scalar(1))),
      beta_(1, 1, 1, channels),
      gamma_grad_(1, 1, 1, channels),
      beta_grad_(1, 1, 1, channels),
      moving_mean_(1, 1, 1, channels),
      moving_var_(Tensor<Scalar>::Constant({1, 1, 1, channels}, Scalar(1))) {
  if (channels < 1) throw InvalidArgument("batch_norm: bad channel count");
  if (!(epsilon > 0)) throw InvalidArgument("batch_norm: epsilon must be positive");
}

template <typename Scalar>
Tensor<Scalar> BatchNorm<Scalar>::infer(const Tensor<Scalar>& x) const {
  if (x.shape().c != channels_) throw InvalidArgument("batch_norm: channel mismatch");
  const RowVector inv_std = (moving_var_.array().transpose() + epsilon_).rsqrt();
  const RowVector scale = inv_std * gamma_.array().transpose();
  const RowVector shift = beta_.array().transpose() - moving_mean_.array().transpose() * scale;
  Tensor<Scalar> out(x.shape());
  out.matrix().array() = (x.matrix().array().rowwise() * scale).rowwise() + shift;
  return out;
}

template <typename Scalar>
Tensor<Scalar> BatchNorm<Scalar>::forward(const Tensor<Scalar>& x, Mode mode) {
  if (x.shape().c != channels_) throw InvalidArgument("batch_norm: channel mismatch");
  mode_ = mode;
  const auto xs = x.matrix().array();
  const RowVector gamma = gamma_.array().transpose();
  const RowVector beta = beta_.array().transpose();
  xhat_ = Tensor<Scalar>(x.shape());
  auto xhat = xhat_.matrix().array();
  if (mode == Mode::kTrain) {
    const Index m = xs.rows();
    if (x.shape().n == 0 || m == 0) throw InvalidArgument("batch_norm: empty batch in train mode");
    const RowVector mean = xs.colwise().mean();
    xhat = xs.rowwise() - mean;
    const RowVector var = xhat.square().colwise().mean();
    inv_std_ = (var + epsilon_).rsqrt();
    xhat.rowwise() *= inv_std_;
    moving_mean_.array() = momentum_ * moving_mean_.array() + (Scalar(1) - momentum_) * mean.transpose();
    moving_var_.array() = momentum_ * moving_var_.array() + (Scalar(1) - momentum_) * var.transpose();
  } else {
    inv_std_ = (moving_var_.array().transpose() + epsilon_).rsqrt();
    xhat = (xs.rowwise() - moving_mean_.array().transpose()).rowwise() * inv_std_;
  }
  Tensor<Scalar> out(x.shape());
  out.matrix().array() = (xhat.rowwise() * gamma).rowwise() + beta;
  return out;
}

template <typename Scalar>
Tensor<Scalar> BatchNorm<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  check_shape(grad_out.shape(), xhat_.shape(), "batch_norm backward");
  const auto g = grad_out.matrix().array();
  const auto xhat = xhat_.matrix().array();
  beta_grad_.array() += g.colwise().sum().transpose();
  gamma_grad_.array() += (g * xhat).colwise().sum().transpose();
  const RowVector gamma = gamma_.array().transpose();
  RowArray<Scalar> dxhat = g.rowwise() * gamma;
  Tensor<Scalar> dx(grad_out.shape());
  auto d = dx.matrix().array();
  if (mode_ == Mode::kTrain) {
    const Scalar m = static_cast<Scalar>(g.rows());
    const RowVector sum_d = dxhat.colwise().sum();
    const RowVector sum_dx = (dxhat * xhat).colwise().sum();
    d = ((dxhat * m).rowwise() - sum_d - xhat.rowwise() * sum_dx).rowwise() * (inv_std_ / m);
  } else {
    d = dxhat.rowwise() * inv_std_;
  }
  return dx;
}

template <typename Scalar>
void BatchNorm<Scalar>::initialize(Rng& /*rng*/) {
  gamma_.array().setOnes();
  beta_.setZero();
  moving_mean_.setZero();
  moving_var_.array().setOnes();
}

template <typename Scalar>
void BatchNorm<Scalar>::collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) {
  out.push_back({prefix + "gamma", &gamma_, &gamma_grad_});
  out.push_back({prefix + "beta", &beta_, &beta_grad_});
}

template <typename Scalar>
void BatchNorm<Scalar>::collect_state(const std::string& prefix, std::vector<StateRef<Scalar>>& out) {
  out.push_back({prefix + "moving_mean", &moving_mean_});
  out.push_back({prefix + "moving_variance", &moving_var_});
}

// -------------------------------------------------------- SpatialDropout

template <typename Scalar>
SpatialDropout<Scalar>::SpatialDropout(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("spatial_dropout: rate must be in [0, 1)");
}

template <typename Scalar>
Tensor<Scalar> SpatialDropout<Scalar>::forward(const Tensor<Scalar>& x, Mode mode) {
  mode_ = mode;
  if (mode == Mode::kInfer || rate_ == 0.0) return x;
  const Index n = x.shape().n, c = x.shape().c;
  if (!frozen_ || mask_.rows() != n || mask_.cols() != c) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Scalar keep_scale = static_cast<Scalar>(1.0 / (1.0 - rate_));
    mask_.resize(n, c);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < c; ++j) mask_(i, j) = u(rng_) < rate_ ? Scalar(0) : keep_scale;
    }
  }
  Tensor<Scalar> out(x.shape());
  for (Index i = 0; i < n; ++i) out.sample(i).array() = x.sample(i).array().rowwise() * mask_.row(i);
  return out;
}

template <typename Scalar>
Tensor<Scalar> SpatialDropout<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  if (mode_ == Mode::kInfer || rate_ == 0.0) return grad_out;
  Tensor<Scalar> dx(grad_out.shape());
  for (Index i = 0; i < grad_out.shape().n; ++i) {
    dx.sample(i).array() = grad_out.sample(i).array().rowwise() * mask_.row(i);
  }
  return dx;
}

// ------------------------------------------------------------- MaxPool2d

template <typename Scalar>
Shape MaxPool2d<Scalar>::output_shape(const Shape& in) const {
  if (in.h < 2 || in.w < 2) throw InvalidArgument("max_pool: input smaller than the 2x2 window");
  return {in.n, same_out(in.h, 2), same_out(in.w, 2), in.c};
}

template <typename Scalar>
Tensor<Scalar> MaxPool2d<Scalar>::pool(const Tensor<Scalar>& x, std::vector<Index>* argmax) const {
  const Shape s = x.shape();
  Tensor<Scalar> out(output_shape(s));
  const Shape o = out.shape();
  if (argmax) argmax->assign(static_cast<std::size_t>(out.size()), 0);
  for (Index n = 0; n < s.n; ++n) {
    for (Index oh = 0; oh < o.h; ++oh) {
      for (Index ow = 0; ow < o.w; ++ow) {
        for (Index c = 0; c < s.c; ++c) {
          Scalar best = -std::numeric_limits<Scalar>::infinity();
          Index best_at = -1;
          for (Index u = 0; u < 2; ++u) {
            const Index ih = 2 * oh + u;
            if (ih >= s.h) continue;
            for (Index v = 0; v < 2; ++v) {
              const Index iw = 2 * ow + v;
              if (iw >= s.w) continue;
              const Index at = ((n * s.h + ih) * s.w + iw) * s.c + c;
              if (best_at < 0 || x[at] > best) {
                best = x[at];
                best_at = at;
              }
            }
          }
          const Index dst = ((n * o.h + oh) * o.w + ow) * o.c + c;
          out[dst] = best;
          if (argmax) (*argmax)[static_cast<std::size_t>(dst)] = best_at;
        }
      }
    }
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> MaxPool2d<Scalar>::infer(const Tensor<Scalar>& x) const {
  return pool(x, nullptr);
}

template <typename Scalar>
Tensor<Scalar> MaxPool2d<Scalar>::forward(const Tensor<Scalar>& x, Mode /*mode*/) {
  input_shape_ = x.shape();
  return pool(x, &argmax_);
}

template <typename Scalar>
Tensor<Scalar> MaxPool2d<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  check_shape(grad_out.shape(), output_shape(input_shape_), "max_pool backward");
  Tensor<Scalar> dx(input_shape_);
  for (Index i = 0; i < grad_out.size(); ++i) dx[argmax_[static_cast<std::size_t>(i)]] += grad_out[i];
  return dx;
}

// --------------------------------------------------------- GlobalAvgPool

template <typename Scalar>
Tensor<Scalar> GlobalAvgPool<Scalar>::infer(const Tensor<Scalar>& x) const {
  const Shape s = x.shape();
  if (s.h * s.w == 0) throw InvalidArgument("global_avg_pool: empty spatial extent");
  Tensor<Scalar> out(output_shape(s));
  for (Index n = 0; n < s.n; ++n) out.sample(n) = x.sample(n).colwise().mean();
  return out;
}

template <typename Scalar>
Tensor<Scalar> GlobalAvgPool<Scalar>::forward(const Tensor<Scalar>& x, Mode /*mode*/) {
  input_shape_ = x.shape();
  return infer(x);
}

template <typename Scalar>
Tensor<Scalar> GlobalAvgPool<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  check_shape(grad_out.shape(), output_shape(input_shape_), "global_avg_pool backward");
  Tensor<Scalar> dx(input_shape_);
  const Scalar scale = Scalar(1) / static_cast<Scalar>(input_shape_.h * input_shape_.w);
  for (Index n = 0; n < input_shape_.n; ++n) {
    dx.sample(n).rowwise() = grad_out.sample(n).row(0) * scale;
  }
  return dx;
}

// ----------------------------------------------------------------- Dense

template <typename Scalar>
Dense<Scalar>::Dense(Index inputs, Index units)
    : inputs_(inputs),
      units_(units),
      weights_(1, 1, inputs, units),
      bias_(1, 1, 1, units),
      weights_grad_(1, 1, inputs, units),
      bias_grad_(1, 1, 1, units) {
  if (inputs < 1 || units < 1) throw InvalidArgument("dense: bad dimensions");
}

template <typename Scalar>
Tensor<Scalar> Dense<Scalar>::infer(const Tensor<Scalar>& x) const {
  if (x.shape().sample_size() != inputs_) {
    throw InvalidArgument("dense: expected " + std::to_string(inputs_) + " inputs, got " +
                          std::to_string(x.shape().sample_size()));
  }
  Tensor<Scalar> out(output_shape(x.shape()));
  typename Tensor<Scalar>::ConstMatrixMap xin(x.data(), x.shape().n, inputs_);
  typename Tensor<Scalar>::ConstMatrixMap w(weights_.data(), inputs_, units_);
  Eigen::Map<const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>> b(bias_.data(), units_);
  auto y = out.matrix();
  y.noalias() = xin * w;
  y.rowwise() += b;
  return out;
}

template <typename Scalar>
Tensor<Scalar> Dense<Scalar>::forward(const Tensor<Scalar>& x, Mode /*mode*/) {
  input_ = x;
  return infer(x);
}

template <typename Scalar>
Tensor<Scalar> Dense<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  check_shape(grad_out.shape(), output_shape(input_.shape()), "dense backward");
  const Index n = input_.shape().n;
  typename Tensor<Scalar>::ConstMatrixMap xin(input_.data(), n, inputs_);
  typename Tensor<Scalar>::ConstMatrixMap w(weights_.data(), inputs_, units_);
  typename Tensor<Scalar>::MatrixMap dw(weights_grad_.data(), inputs_, units_);
  Eigen::Map<Eigen::Matrix<Scalar, 1, Eigen::Dynamic>> db(bias_grad_.data(), units_);
  const auto g = grad_out.matrix();
  dw.noalias() += xin.transpose() * g;
  db += g.colwise().sum();
  Tensor<Scalar> dx(input_.shape());
  typename Tensor<Scalar>::MatrixMap(dx.data(), n, inputs_).noalias() = g * w.transpose();
  return dx;
}

template <typename Scalar>
void Dense<Scalar>::initialize(Rng& rng) {
  glorot_uniform(weights_, double(inputs_), double(units_), rng);
  bias_.setZero();
}

template <typename Scalar>
void Dense<Scalar>::collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) {
  out.push_back({prefix + "kernel", &weights_, &weights_grad_});
  out.push_back({prefix + "bias", &bias_, &bias_grad_});
}

// ------------------------------------------------------------ Sequential

template <typename Scalar>
Shape Sequential<Scalar>::output_shape(const Shape& in) const {
  Shape s = in;
  for (const auto& l : layers_) s = l->output_shape(s);
  return s;
}

template <typename Scalar>
Tensor<Scalar> Sequential<Scalar>::infer(const Tensor<Scalar>& x) const {
  Tensor<Scalar> y = x;
  for (const auto& l : layers_) y = l->infer(y);
  return y;
}

template <typename Scalar>
Tensor<Scalar> Sequential<Scalar>::forward(const Tensor<Scalar>& x, Mode mode) {
  Tensor<Scalar> y = x;
  for (auto& l : layers_) y = l->forward(y, mode);
  return y;
}

template <typename Scalar>
Tensor<Scalar> Sequential<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  Tensor<Scalar> g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename Scalar>
void Sequential<Scalar>::initialize(Rng& rng) {
  for (auto& l : layers_) l->initialize(rng);
}

template <typename Scalar>
void Sequential<Scalar>::collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->collect_params(prefix + std::to_string(i) + ".", out);
  }
}

template <typename Scalar>
void Sequential<Scalar>::collect_state(const std::string& prefix, std::vector<StateRef<Scalar>>& out) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->collect_state(prefix + std::to_string(i) + ".", out);
  }
}

// ----------------------------------------------------------- DwSepConv2d

template <typename Scalar>
DwSepConv2d<Scalar>::DwSepConv2d(Index kernel, Index in_channels, Index filters, Index stride,
                                 Activation act) {
  body_.add(std::make_unique<DepthwiseConv2d<Scalar>>(kernel, in_channels, stride));
  body_.add(std::make_unique<ActivationLayer<Scalar>>(act));
  body_.add(std::make_unique<Conv2d<Scalar>>(1, in_channels, filters, 1));
  body_.add(std::make_unique<ActivationLayer<Scalar>>(act));
}

template <typename Scalar>
void DwSepConv2d<Scalar>::collect_params(const std::string& prefix, std::vector<ParamRef<Scalar>>& out) {
  body_.at(0).collect_params(prefix + "depthwise.", out);
  body_.at(2).collect_params(prefix + "pointwise.", out);
}

// --------------------------------------------------------- ResidualBlock

template <typename Scalar>
ResidualBlock<Scalar>::ResidualBlock(Index kernel, Index in_channels, Index filters, Index stride,
                                     Activation act)
    : out_act_(act) {
  main_.add(std::make_unique<Conv2d<Scalar>>(kernel, in_channels, filters, stride));
  main_.add(std::make_unique<BatchNorm<Scalar>>(filters));
  main_.add(std::make_unique<ActivationLayer<Scalar>>(act));
  main_.add(std::make_unique<Conv2d<Scalar>>(kernel, filters, filters, 1));
  main_.add(std::make_unique<BatchNorm<Scalar>>(filters));
  if (stride != 1 || in_channels != filters) {
    projection_ = std::make_unique<Conv2d<Scalar>>(1, in_channels, filters, stride);
  }
}

template <typename Scalar>
Tensor<Scalar> ResidualBlock<Scalar>::infer(const Tensor<Scalar>& x) const {
  Tensor<Scalar> y = main_.infer(x);
  if (projection_) {
    y.array() += projection_->infer(x).array();
  } else {
    y.array() += x.array();
  }
  return out_act_.infer(y);
}

template <typename Scalar>
Tensor<Scalar> ResidualBlock<Scalar>::forward(const Tensor<Scalar>& x, Mode mode) {
  Tensor<Scalar> y = main_.forward(x, mode);
  if (projection_) {
    y.array() += projection_->forward(x, mode).array();
  } else {
    y.array() += x.array();
  }
  return out_act_.forward(y, mode);
}

template <typename Scalar>
Tensor<Scalar> ResidualBlock<Scalar>::backward(const Tensor<Scalar>& grad_out) {
  const Tensor<Scalar> g = out_act_.backward(grad_out);
  Tensor<Scalar> dx = main_.backward(g);
  if (projection_) {
    dx.array() += projection_->backward(g).array();
  } else {
    dx.array() += g.array();
  }
  return dx;
}

template <typename Scalar>
void ResidualBlock<Scalar>::initialize(Rng& rng) {
  main_.initialize(rng);
  if (projection_) projection_->initialize(rng);
}

template <typename Scalar>
void ResidualBlock<Scalar>::collect_params(const std::string& prefix,
                                           std::vector<ParamRef<Scalar>>& out) {
  main_.at(0).collect_params(prefix + "conv1.", out);
  main_.at(1).collect_params(prefix + "bn1.", out);
  main_.at(3).collect_params(prefix + "conv2.", out);
  main_.at(4).collect_params(prefix + "bn2.", out);
  if (projection_) projection_->collect_params(prefix + "shortcut.", out);
}

template <typename Scalar>
void ResidualBlock<Scalar>::collect_state(const std::string& prefix, std::vector<StateRef<Scalar>>& out) {
  main_.at(1).collect_state(prefix + "bn1.", out);
  main_.at(4).collect_state(prefix + "bn2.", out);
}

#define COUGHNET_INSTANTIATE_LAYERS(T) \
  template class Conv2d<T>;            \
  template class DepthwiseConv2d<T>;   \
  template class ActivationLayer<T>;   \
  template class BatchNorm<T>;         \
  template class SpatialDropout<T>;    \
  template class MaxPool2d<T>;         \
  template class GlobalAvgPool<T>;     \
  template class Dense<T>;             \
  template class Sequential<T>;        \
  template class DwSepConv2d<T>;       \
  template class ResidualBlock<T>;

COUGHNET_INSTANTIATE_LAYERS(float)
COUGHNET_INSTANTIATE_LAYERS(double)

#undef COUGHNET_INSTANTIATE_LAYERS

}  // namespace coughnet::nn
