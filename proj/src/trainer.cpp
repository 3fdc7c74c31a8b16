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

#include "coughnet/trainer.h"

#include <chrono>
#include <cmath>
#include <random>

#ifdef __linux__
#include <sched.h>
#endif

#include "coughnet/csv.h"
#include "coughnet/error.h"
#include "coughnet/nn/loss.h"
#include "coughnet/random.h"

namespace coughnet {

using nlohmann::json;
using nn::Index;
using nn::Tensor;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Tensor<float> make_batch(const nn::Model<float>& model, std::span<const MfccFeature> features,
                         std::span<const std::size_t> indices) {
  Tensor<float> batch(model.input_shape(static_cast<Index>(indices.size())));
  for (std::size_t j = 0; j < indices.size(); ++j) copy_into(features[indices[j]], batch, static_cast<Index>(j));
  return batch;
}

void check_set(const LabeledFeatures& set, const char* what) {
  if (set.features.size() != set.labels.size()) throw InvalidArgument(std::string(what) + ": label count mismatch");
  if (set.features.empty()) throw DataError(std::string(what) + " set is empty");
}

// Restores the thread's CPU affinity on scope exit.
class ThreadPin {
 public:
  explicit ThreadPin(bool enable) {
#ifdef __linux__
    if (!enable) return;
    if (sched_getaffinity(0, sizeof(saved_), &saved_) != 0) return;
    const int cpu = sched_getcpu();
    if (cpu < 0) return;
    cpu_set_t one;
    CPU_ZERO(&one);
    CPU_SET(cpu, &one);
    pinned_ = sched_setaffinity(0, sizeof(one), &one) == 0;
#else
    (void)enable;
#endif
  }
  ~ThreadPin() {
#ifdef __linux__
    if (pinned_) sched_setaffinity(0, sizeof(saved_), &saved_);
#endif
  }
  ThreadPin(const ThreadPin&) = delete;
  ThreadPin& operator=(const ThreadPin&) = delete;

 private:
#ifdef __linux__
  cpu_set_t saved_{};
#endif
  bool pinned_ = false;
};

}  // namespace

LabeledFeatures LabeledFeatures::from(const FeatureSet& set) { return {set.features, set.labels()}; }

json to_json(const TrainConfig& c) {
  return {{"initial_lr", c.initial_lr},
          {"lr_factor", c.lr_factor},
          {"lr_patience", c.lr_patience},
          {"early_stop_patience", c.early_stop_patience},
          {"max_epochs", c.max_epochs},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"min_lr", c.min_lr},
          {"deterministic", c.deterministic}};
}

json to_json(const TrainReport& r) {
  json epochs = json::array();
  json lr_trace = json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_loss", e.val_loss},
                      {"learning_rate", e.learning_rate},
                      {"improved", e.improved},
                      {"seconds", e.seconds}});
    lr_trace.push_back(e.learning_rate);
  }
  return {{"arch", r.arch},
          {"config", to_json(r.config)},
          {"seed", r.config.seed},
          {"epochs", epochs},
          {"lr_trace", lr_trace},
          {"best_epoch", r.best_epoch},
          {"best_val_loss", r.best_val_loss},
          {"stop_epoch", r.stop_epoch},
          {"stopped_early", r.stopped_early},
          {"train_size", r.train_size},
          {"validation_size", r.validation_size},
          {"seconds", r.seconds}};
}

std::vector<double> score_features(const nn::Model<float>& model, std::span<const MfccFeature> features,
                                   int batch_size) {
  if (batch_size < 1) throw InvalidArgument("score_features: batch_size must be >= 1");
  std::vector<double> out;
  out.reserve(features.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < features.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(features.size(), start + static_cast<std::size_t>(batch_size));
    idx.clear();
    for (std::size_t i = start; i < end; ++i) idx.push_back(i);
    const Tensor<float> logits = model.logits(make_batch(model, features, idx));
    for (Index i = 0; i < logits.size(); ++i) out.push_back(nn::stable_sigmoid<double>(logits[i]));
  }
  return out;
}

double mean_loss(const nn::Model<float>& model, const LabeledFeatures& data, int batch_size) {
  const auto p = score_features(model, data.features, batch_size);
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += nn::bce_loss<double>(p[i], data.labels[i]);
  return p.empty() ? 0.0 : sum / static_cast<double>(p.size());
}

TrainResult train(const ArchitectureSpec& spec, const LabeledFeatures& train_set,
                  const LabeledFeatures& validation_set, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  check_set(train_set, "training");
  check_set(validation_set, "validation");
  const auto start = Clock::now();

  TrainResult result{nn::Model<float>(spec, config.seed), nn::Adam<float>(nn::AdamOptions{config.initial_lr}), {}};
  nn::Model<float>& model = result.model;
  nn::Adam<float>& adam = result.optimizer;
  TrainReport& report = result.report;
  report.arch = spec.name;
  report.config = config;
  report.train_size = train_set.size();
  report.validation_size = validation_set.size();

  PlateauScheduler plateau(config);
  EarlyStopping stopper(config);
  std::mt19937_64 order_rng(config.seed ^ 0xA0761D6478BD642Full);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::optional<nn::Model<float>::Snapshot> best;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = adam.learning_rate();

    shuffle(order, order_rng);
    double loss_sum = 0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(config.batch_size));
      const std::span<const std::size_t> idx(order.data() + b, e - b);
      const Tensor<float> x = make_batch(model, train_set.features, idx);
      model.zero_grad();
      const Tensor<float> logits = model.forward(x, nn::Mode::kTrain);
      Tensor<float> grad(logits.shape());
      const auto n = static_cast<float>(idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto i = static_cast<Index>(j);
        const float y = static_cast<float>(train_set.labels[idx[j]]);
        const float p = nn::stable_sigmoid(logits[i]);
        loss_sum += nn::bce_loss<double>(p, y);
        grad[i] = (p - y) / n;
      }
      model.backward(grad);
      adam.step(model.params());
    }
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.val_loss = mean_loss(model, validation_set, config.batch_size);
    if (!std::isfinite(rec.val_loss) || !std::isfinite(rec.train_loss)) {
      throw DataError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
    }

    const bool stop = stopper.update(rec.val_loss);
    rec.improved = stopper.improved();
    if (rec.improved) best = model.snapshot();
    adam.set_learning_rate(plateau.update(rec.val_loss));
    rec.seconds = seconds_since(epoch_start);
    report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stop) {
      report.stop_epoch = epoch;
      report.stopped_early = epoch < config.max_epochs;
      break;
    }
  }

  if (best) model.restore(*best);
  report.best_epoch = stopper.best_epoch();
  report.best_val_loss = report.best_epoch ? stopper.best_loss() : 0.0;
  if (report.stop_epoch == 0) report.stop_epoch = static_cast<int>(report.epochs.size());
  report.seconds = seconds_since(start);
  return result;
}

std::vector<SampleRecord> filter_verified(std::span<const SampleRecord> records) {
  std::vector<SampleRecord> out;
  for (const auto& r : records) {
    if (r.label == 0 || r.verified) out.push_back(r);
  }
  return out;
}

EvalReport evaluate(const nn::Model<float>& model, std::span<const SampleRecord> records, const FeatureCache& cache,
                    const EvalOptions& options) {
  const std::vector<SampleRecord> kept =
      options.filtered ? filter_verified(records) : std::vector<SampleRecord>(records.begin(), records.end());
  const FeatureSet set = load_features(cache, kept, /*augmented=*/false);
  const std::vector<double> scores = score_features(model, set.features);

  EvalReport report;
  report.split = options.split_name;
  report.filtered = options.filtered;
  report.model_id = options.model_id;
  report.arch = model.spec().name;
  report.params = count_params(model.spec());
  report.flops = count_flops(model.spec());
  std::vector<int> labels;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    report.samples.push_back({kept[i], scores[i]});
    labels.push_back(kept[i].label);
    (kept[i].label ? report.positives : report.negatives) += 1;
  }
  if (report.positives == 0 || report.negatives == 0) {
    throw DataError("evaluation set needs at least one positive and one negative");
  }
  report.auc = auc(scores, labels);
  return report;
}

json to_json(const EvalReport& r) {
  json j = {{"auc", r.auc},
            {"params", r.params},
            {"flops", r.flops},
            {"split", r.split},
            {"filtered", r.filtered},
            {"positives", r.positives},
            {"negatives", r.negatives},
            {"model_id", r.model_id},
            {"arch", r.arch}};
  if (!r.regime.empty()) j["regime"] = r.regime;
  j["latency"] = r.latency ? to_json(*r.latency) : json(nullptr);
  return j;
}

std::string format_scores(const EvalReport& report) {
  std::string out = "path,label,verified,score\n";
  char buf[64];
  for (const auto& s : report.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.score);
    out += csv::join({s.record.path, std::to_string(s.record.label), s.record.verified ? "1" : "0", buf});
    out += '\n';
  }
  return out;
}

std::vector<ScoredSample> parse_scores(std::string_view text) {
  std::vector<ScoredSample> out;
  for (const auto& row : csv::parse(text, {"path", "label", "verified", "score"}, "scores")) {
    ScoredSample s;
    s.record.path = row.fields[0];
    try {
      s.record.label = std::stoi(row.fields[1]);
      s.record.verified = std::stoi(row.fields[2]) == 1;
      s.score = std::stod(row.fields[3]);
    } catch (const std::exception&) {
      throw DataError("scores: line " + std::to_string(row.line) + ": malformed number");
    }
    out.push_back(std::move(s));
  }
  return out;
}

LatencyStats benchmark_latency(const nn::Model<float>& model, const BenchmarkOptions& options) {
  if (options.passes < 10) throw InvalidArgument("benchmark: at least 10 passes required");
  if (options.warmup < 0) throw InvalidArgument("benchmark: warmup must be >= 0");
  trim_count(static_cast<std::size_t>(options.passes), options.trim_fraction);

  Tensor<float> x(model.input_shape(1));
  std::mt19937_64 rng(options.seed);
  for (Index i = 0; i < x.size(); ++i) x[i] = static_cast<float>(2.0 * uniform_unit(rng) - 1.0);

  const ThreadPin pin(options.pin_thread);
  volatile float sink = 0;
  for (int i = 0; i < options.warmup; ++i) sink = sink + model.logits(x)[0];
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(options.passes));
  for (int i = 0; i < options.passes; ++i) {
    const auto t0 = Clock::now();
    const Tensor<float> y = model.logits(x);
    const auto t1 = Clock::now();
    sink = sink + y[0];
    samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return latency_stats(samples, options.trim_fraction);
}

}  // namespace coughnet
