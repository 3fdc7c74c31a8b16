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

#include "coughnet/nn/grad_check.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "coughnet/nn/loss.h"
#include "coughnet/random.h"

namespace coughnet::nn {

double GradCheckReport::max_rel_error() const {
  double m = 0;
  for (const auto& e : entries) m = std::max(m, e.max_rel_error);
  return m;
}

double GradCheckReport::max_abs_error() const {
  double m = 0;
  for (const auto& e : entries) m = std::max(m, e.max_abs_error);
  return m;
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport compare_gradients(const std::function<double()>& loss, std::vector<Probe>& probes,
                                  const GradCheckOptions& options) {
  std::mt19937_64 rng(options.seed ^ 0x5DEECE66Dull);
  GradCheckReport report;
  for (auto& probe : probes) {
    check_shape(probe.analytic.shape(), probe.value->shape(), "grad check");
    const Index n = probe.value->size();
    std::vector<Index> indices(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;
    if (options.max_per_tensor > 0 && n > options.max_per_tensor) {
      shuffle(indices, rng);
      indices.resize(static_cast<std::size_t>(options.max_per_tensor));
    }
    GradCheckEntry entry{probe.name, static_cast<Index>(indices.size()), 0, 0};
    for (const Index i : indices) {
      double& v = (*probe.value)[i];
      const double saved = v;
      v = saved + options.step;
      const double up = loss();
      v = saved - options.step;
      const double down = loss();
      v = saved;
      const double numeric = (up - down) / (2 * options.step);
      const double analytic = probe.analytic[i];
      entry.max_abs_error = std::max(entry.max_abs_error, std::abs(analytic - numeric));
      entry.max_rel_error =
          std::max(entry.max_rel_error, relative_error(analytic, numeric, options.denominator_floor));
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

namespace {

struct Head {
  CheckHead kind;
  Tensor<double> weights;
  std::vector<double> labels;

  double loss(const Tensor<double>& y) const {
    if (kind == CheckHead::kProjection) return (y.array() * weights.array()).sum();
    double sum = 0;
    for (Index i = 0; i < y.size(); ++i) {
      sum += bce_loss(stable_sigmoid(y[i]), labels[static_cast<std::size_t>(i)]);
    }
    return sum / static_cast<double>(y.size());
  }

  Tensor<double> grad(const Tensor<double>& y) const {
    if (kind == CheckHead::kProjection) return weights;
    Tensor<double> g(y.shape());
    for (Index i = 0; i < y.size(); ++i) {
      const double p = stable_sigmoid(y[i]);
      g[i] = (p - labels[static_cast<std::size_t>(i)]) / static_cast<double>(y.size());
    }
    return g;
  }
};

Head make_head(CheckHead kind, const Shape& out, const std::vector<double>& labels, std::uint64_t seed) {
  Head head{kind, Tensor<double>(out), labels};
  if (kind == CheckHead::kProjection) {
    std::mt19937_64 rng(seed);
    for (Index i = 0; i < head.weights.size(); ++i) head.weights[i] = 2.0 * uniform_unit(rng) - 1.0;
  } else {
    if (out.h != 1 || out.w != 1 || out.c != 1) throw InvalidArgument("grad check: sigmoid head needs one unit");
    if (static_cast<Index>(labels.size()) != out.n) throw InvalidArgument("grad check: label count mismatch");
  }
  return head;
}

}  // namespace

GradCheckReport check_layer(Layer<double>& layer, const Tensor<double>& x_in, Mode mode,
                            const GradCheckOptions& options, CheckHead head_kind, const std::vector<double>& labels) {
  Tensor<double> x = x_in;
  const Head head = make_head(head_kind, layer.output_shape(x.shape()), labels, options.seed);

  std::vector<ParamRef<double>> params;
  layer.collect_params("", params);
  for (auto& p : params) p.grad->setZero();
  const Tensor<double> y = layer.forward(x, mode);
  const Tensor<double> dx = layer.backward(head.grad(y));

  std::vector<Probe> probes;
  if (options.check_input) probes.push_back({"input", &x, dx});
  for (auto& p : params) probes.push_back({p.name, p.value, *p.grad});
  return compare_gradients([&] { return head.loss(layer.forward(x, mode)); }, probes, options);
}

GradCheckReport check_model(Model<double>& model, const Tensor<double>& x_in, const std::vector<double>& labels,
                            const GradCheckOptions& options) {
  Tensor<double> x = x_in;
  const Head head = make_head(CheckHead::kSigmoidBce, {x.shape().n, 1, 1, 1}, labels, options.seed);
  model.freeze_dropout(false);
  model.zero_grad();
  const Tensor<double> y = model.forward(x, Mode::kTrain);
  const Tensor<double> dx = model.backward(head.grad(y));
  model.freeze_dropout(true);

  std::vector<Probe> probes;
  if (options.check_input) probes.push_back({"input", &x, dx});
  for (auto& p : model.params()) probes.push_back({p.name, p.value, *p.grad});
  const auto report =
      compare_gradients([&] { return head.loss(model.forward(x, Mode::kTrain)); }, probes, options);
  model.freeze_dropout(false);
  return report;
}

}  // namespace coughnet::nn
