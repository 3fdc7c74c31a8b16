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

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>

#include "coughnet/error.h"

namespace coughnet::nn {

using Index = Eigen::Index;

// Batch-height-width-channels shape. Parameters reuse the same 4-slot layout,
// e.g. a conv kernel is (k, k, c_in, c_out) and a bias is (1, 1, 1, c_out).
struct Shape {
  Index n = 0, h = 0, w = 0, c = 0;

  Index size() const { return n * h * w * c; }
  Index sample_size() const { return h * w * c; }
  bool operator==(const Shape&) const = default;
  std::array<Index, 4> dims() const { return {n, h, w, c}; }
  std::string str() const {
    return "(" + std::to_string(n) + "," + std::to_string(h) + "," + std::to_string(w) + "," +
           std::to_string(c) + ")";
  }
};

// Dense row-major NHWC tensor, channels fastest.
template <typename Scalar>
class Tensor {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<RowMatrix>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix>;

  Tensor() = default;
  explicit Tensor(Shape shape) : shape_(shape), data_(Array::Zero(shape.size())) {}
  Tensor(Index n, Index h, Index w, Index c) : Tensor(Shape{n, h, w, c}) {}

  static Tensor Constant(Shape shape, Scalar value) {
    Tensor t(shape);
    t.data_.setConstant(value);
    return t;
  }

  const Shape& shape() const { return shape_; }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Array& array() { return data_; }
  const Array& array() const { return data_; }
  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  Scalar& operator()(Index n, Index h, Index w, Index c) { return data_[offset(n, h, w, c)]; }
  Scalar operator()(Index n, Index h, Index w, Index c) const { return data_[offset(n, h, w, c)]; }
  Scalar& operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  // Sample `n` viewed as an (h*w) x c matrix.
  MatrixMap sample(Index n) {
    return MatrixMap(data_.data() + n * shape_.sample_size(), shape_.h * shape_.w, shape_.c);
  }
  ConstMatrixMap sample(Index n) const {
    return ConstMatrixMap(data_.data() + n * shape_.sample_size(), shape_.h * shape_.w, shape_.c);
  }

  // Whole tensor viewed as (n*h*w) x c.
  MatrixMap matrix() { return MatrixMap(data_.data(), shape_.n * shape_.h * shape_.w, shape_.c); }
  ConstMatrixMap matrix() const {
    return ConstMatrixMap(data_.data(), shape_.n * shape_.h * shape_.w, shape_.c);
  }

  void setZero() { data_.setZero(); }

  template <typename Other>
  Tensor<Other> cast() const {
    Tensor<Other> out(shape_);
    out.array() = data_.template cast<Other>();
    return out;
  }

  bool allFinite() const { return data_.allFinite(); }

 private:
  Index offset(Index n, Index h, Index w, Index c) const {
    return ((n * shape_.h + h) * shape_.w + w) * shape_.c + c;
  }

  Shape shape_;
  Array data_;
};

inline void check_shape(const Shape& got, const Shape& want, const char* what) {
  if (!(got == want)) {
    throw InvalidArgument(std::string(what) + ": shape mismatch, got " + got.str() + ", want " +
                          want.str());
  }
}

// Output extent of a `same`-padded op: ceil(in / stride).
inline Index same_out(Index in, Index stride) { return (in + stride - 1) / stride; }

// Leading pad of a `same`-padded window op (the extra pad goes to the trailing side).
inline Index same_pad_begin(Index in, Index kernel, Index stride) {
  const Index out = same_out(in, stride);
  const Index total = std::max<Index>((out - 1) * stride + kernel - in, 0);
  return total / 2;
}

}  // namespace coughnet::nn
