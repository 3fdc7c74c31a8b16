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

#include "gradient_suite.h"

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>

#include "coughnet/nn/layers.h"
#include "coughnet/nn/loss.h"

namespace coughnet::testing {

namespace {

using nn::Index;
using nn::Mode;
using nn::Tensor;
using Rng = std::mt19937_64;

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Tensor<double> random_tensor(nn::Shape shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t(shape);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (Index i = 0; i < t.size(); ++i) t[i] = u(rng);
  return t;
}

void randomize_params(nn::Layer<double>& layer, Rng& rng) {
  nn::Rng init(rng());
  layer.initialize(init);
  std::vector<nn::ParamRef<double>> params;
  layer.collect_params("", params);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  // Initializers leave biases and BN shifts at zero; move them off it.
  for (auto& p : params) {
    for (Index i = 0; i < p.value->size(); ++i) (*p.value)[i] += u(rng);
  }
}

double min_abs(const Tensor<double>& t) {
  double m = INFINITY;
  for (Index i = 0; i < t.size(); ++i) m = std::min(m, std::abs(t[i]));
  return m;
}

Tensor<double> relu(Tensor<double> t) {
  t.array() = t.array().max(0.0);
  return t;
}

// Smallest gap between the largest and second-largest real element of any pooling window.
double max_pool_gap(const Tensor<double>& x) {
  const auto& s = x.shape();
  const Index oh = nn::same_out(s.h, 2), ow = nn::same_out(s.w, 2);
  const Index py = nn::same_pad_begin(s.h, 2, 2), px = nn::same_pad_begin(s.w, 2, 2);
  double gap = INFINITY;
  for (Index n = 0; n < s.n; ++n) {
    for (Index y = 0; y < oh; ++y) {
      for (Index xx = 0; xx < ow; ++xx) {
        for (Index c = 0; c < s.c; ++c) {
          double best = -INFINITY, second = -INFINITY;
          for (Index dy = 0; dy < 2; ++dy) {
            for (Index dx = 0; dx < 2; ++dx) {
              const Index iy = y * 2 + dy - py, ix = xx * 2 + dx - px;
              if (iy < 0 || ix < 0 || iy >= s.h || ix >= s.w) continue;
              const double v = x(n, iy, ix, c);
              if (v > best) {
                second = best;
                best = v;
              } else if (v > second) {
                second = v;
              }
            }
          }
          if (std::isfinite(second)) gap = std::min(gap, best - second);
        }
      }
    }
  }
  return gap;
}

struct Draw {
  std::string config;
  std::function<nn::GradCheckReport(const nn::GradCheckOptions&)> check;
  double margin = INFINITY;
};

std::string shape_str(const nn::Shape& s) { return s.str(); }

Draw draw_conv(Rng& rng) {
  const int k = 2 * pick(rng, 0, 2) + 1, stride = pick(rng, 1, 2), cin = pick(rng, 1, 3), cout = pick(rng, 1, 4);
  const nn::Shape in{pick(rng, 1, 2), pick(rng, k, 8), pick(rng, k, 8), cin};
  auto layer = std::make_shared<nn::Conv2d<double>>(k, cin, cout, stride);
  randomize_params(*layer, rng);
  auto x = std::make_shared<Tensor<double>>(random_tensor(in, rng));
  return {"k=" + std::to_string(k) + " s=" + std::to_string(stride) + " out=" + std::to_string(cout) + " in" +
              shape_str(in),
          [layer, x](const nn::GradCheckOptions& o) { return nn::check_layer(*layer, *x, Mode::kTrain, o); }};
}

Draw draw_dwsep(Rng& rng) {
  const int k = 2 * pick(rng, 1, 2) + 1, stride = pick(rng, 1, 2), cin = pick(rng, 1, 3), cout = pick(rng, 1, 4);
  const nn::Shape in{pick(rng, 1, 2), pick(rng, 3, 7), pick(rng, 3, 7), cin};
  auto layer = std::make_shared<nn::DwSepConv2d<double>>(k, cin, cout, stride, nn::Activation::kRelu);
  randomize_params(*layer, rng);
  auto x = std::make_shared<Tensor<double>>(random_tensor(in, rng));
  const Tensor<double> z1 = layer->depthwise().infer(*x);
  const Tensor<double> z2 = layer->pointwise().infer(relu(z1));
  return {"k=" + std::to_string(k) + " s=" + std::to_string(stride) + " out=" + std::to_string(cout) + " in" +
              shape_str(in),
          [layer, x](const nn::GradCheckOptions& o) { return nn::check_layer(*layer, *x, Mode::kTrain, o); },
          std::min(min_abs(z1), min_abs(z2))};
}

Draw draw_residual(Rng& rng) {
  const int k = 2 * pick(rng, 1, 2) + 1, stride = pick(rng, 1, 2), cin = pick(rng, 1, 3);
  const int cout = pick(rng, 0, 1) ? cin : pick(rng, 1, 4);
  const nn::Shape in{pick(rng, 2, 3), pick(rng, 3, 6), pick(rng, 3, 6), cin};
  auto layer = std::make_shared<nn::ResidualBlock<double>>(k, cin, cout, stride, nn::Activation::kRelu);
  randomize_params(*layer, rng);
  auto x = std::make_shared<Tensor<double>>(random_tensor(in, rng));
  // Pre-activations under batch statistics, as seen by the training-mode check.
  auto& main = layer->main_branch();
  const Tensor<double> z1 = main.at(1).forward(main.at(0).infer(*x), Mode::kTrain);
  const Tensor<double> z2 = main.at(4).forward(main.at(3).infer(relu(z1)), Mode::kTrain);
  Tensor<double> pre = layer->projection() ? layer->projection()->infer(*x) : *x;
  pre.array() += z2.array();
  return {"k=" + std::to_string(k) + " s=" + std::to_string(stride) + " out=" + std::to_string(cout) +
              (layer->has_projection() ? " proj" : " identity") + " in" + shape_str(in),
          [layer, x](const nn::GradCheckOptions& o) { return nn::check_layer(*layer, *x, Mode::kTrain, o); },
          std::min(min_abs(z1), min_abs(pre))};
}

Draw draw_batch_norm(Rng& rng) {
  const int c = pick(rng, 1, 4);
  const nn::Shape in{pick(rng, 2, 4), pick(rng, 1, 5), pick(rng, 2, 5), c};
  auto layer = std::make_shared<nn::BatchNorm<double>>(c);
  randomize_params(*layer, rng);
  layer->gamma().array() += 1.0;
  auto x = std::make_shared<Tensor<double>>(random_tensor(in, rng, 2.0));
  return {"c=" + std::to_string(c) + " in" + shape_str(in),
          [layer, x](const nn::GradCheckOptions& o) { return nn::check_layer(*layer, *x, Mode::kTrain, o); }};
}

Draw draw_max_pool(Rng& rng) {
  const nn::Shape in{pick(rng, 1, 2), pick(rng, 2, 9), pick(rng, 2, 9), pick(rng, 1, 3)};
  auto layer = std::make_shared<nn::MaxPool2d<double>>();
  auto x = std::make_shared<Tensor<double>>(random_tensor(in, rng));
  return {"in" + shape_str(in),
          [layer, x](const nn::GradCheckOptions& o) { return nn::check_layer(*layer, *x, Mode::kTrain, o); },
          max_pool_gap(*x)};
}

Draw draw_global_avg_pool(Rng& rng) {
  const nn::Shape in{pick(rng, 1, 3), pick(rng, 1, 7), pick(rng, 1, 7), pick(rng, 1, 4)};
  auto layer = std::make_shared<nn::GlobalAvgPool<double>>();
  auto x = std::make_shared<Tensor<double>>(random_tensor(in, rng));
  return {"in" + shape_str(in),
          [layer, x](const nn::GradCheckOptions& o) { return nn::check_layer(*layer, *x, Mode::kTrain, o); }};
}

Draw draw_dense_sigmoid(Rng& rng) {
  const int inputs = pick(rng, 1, 16), batch = pick(rng, 1, 5);
  auto layer = std::make_shared<nn::Dense<double>>(inputs, 1);
  randomize_params(*layer, rng);
  auto x = std::make_shared<Tensor<double>>(random_tensor({batch, 1, 1, inputs}, rng, 2.0));
  auto labels = std::make_shared<std::vector<double>>();
  for (int i = 0; i < batch; ++i) labels->push_back(pick(rng, 0, 1));
  return {"inputs=" + std::to_string(inputs) + " batch=" + std::to_string(batch),
          [layer, x, labels](const nn::GradCheckOptions& o) {
            return nn::check_layer(*layer, *x, Mode::kTrain, o, nn::CheckHead::kSigmoidBce, *labels);
          }};
}

// Mean BCE of clipped probabilities, checked both against p (the clip-aware
// derivative) and against logits through the sigmoid ((p - y) / N).
Draw draw_bce(Rng& rng) {
  const int n = pick(rng, 1, 12);
  auto probs = std::make_shared<Tensor<double>>(nn::Shape{n, 1, 1, 1});
  auto logits = std::make_shared<Tensor<double>>(nn::Shape{n, 1, 1, 1});
  auto labels = std::make_shared<std::vector<double>>();
  std::uniform_real_distribution<double> up(0.02, 0.98), uz(-4.0, 4.0);
  for (int i = 0; i < n; ++i) {
    (*probs)[i] = up(rng);
    (*logits)[i] = uz(rng);
    labels->push_back(pick(rng, 0, 1));
  }
  return {"n=" + std::to_string(n), [=](const nn::GradCheckOptions& o) {
            const auto mean_over = [n, labels](const Tensor<double>& t, bool from_logits) {
              double sum = 0;
              for (int i = 0; i < n; ++i) {
                const double p = from_logits ? nn::stable_sigmoid(t[i]) : t[i];
                sum += nn::bce_loss(p, (*labels)[static_cast<std::size_t>(i)]);
              }
              return sum / n;
            };
            Tensor<double> dp(probs->shape()), dz(logits->shape());
            for (int i = 0; i < n; ++i) {
              const double y = (*labels)[static_cast<std::size_t>(i)];
              dp[i] = nn::bce_loss_grad((*probs)[i], y) / n;
              dz[i] = (nn::stable_sigmoid((*logits)[i]) - y) / n;
            }
            std::vector<nn::Probe> wrt_p{{"probability", probs.get(), dp}};
            std::vector<nn::Probe> wrt_z{{"logit", logits.get(), dz}};
            auto report = nn::compare_gradients([&] { return mean_over(*probs, false); }, wrt_p, o);
            auto second = nn::compare_gradients([&] { return mean_over(*logits, true); }, wrt_z, o);
            report.entries.insert(report.entries.end(), second.entries.begin(), second.entries.end());
            return report;
          }};
}

}  // namespace

const std::vector<std::string>& gradient_kinds() {
  static const std::vector<std::string> kinds{"conv2d",          "dwsep",         "residual_block", "batch_norm",
                                              "max_pool",        "global_avg_pool", "dense_sigmoid",  "bce"};
  return kinds;
}

std::vector<GradientCase> run_gradient_cases(const std::string& kind, int count, std::uint64_t seed, double step,
                                             double kink_margin) {
  static const std::map<std::string, Draw (*)(Rng&)> drawers{
      {"conv2d", draw_conv},         {"dwsep", draw_dwsep},
      {"residual_block", draw_residual}, {"batch_norm", draw_batch_norm},
      {"max_pool", draw_max_pool},   {"global_avg_pool", draw_global_avg_pool},
      {"dense_sigmoid", draw_dense_sigmoid}, {"bce", draw_bce}};
  const auto it = drawers.find(kind);
  if (it == drawers.end()) throw std::invalid_argument("unknown layer kind: " + kind);

  Rng rng(seed);
  std::vector<GradientCase> cases;
  for (int i = 0; i < count; ++i) {
    int redraws = 0;
    Draw draw = it->second(rng);
    while (draw.margin < kink_margin) {
      if (++redraws > 1000) throw std::runtime_error("gradient suite: no draw clears the kink margin");
      draw = it->second(rng);
    }
    nn::GradCheckOptions opts;
    opts.step = step;
    opts.seed = rng();
    cases.push_back({kind, draw.config, draw.check(opts), redraws});
  }
  return cases;
}

}  // namespace coughnet::testing
