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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coughnet/arch.h"
#include "coughnet/cache.h"
#include "coughnet/dataset.h"
#include "coughnet/feature.h"
#include "coughnet/metrics.h"
#include "coughnet/nn/adam.h"
#include "coughnet/nn/model.h"
#include "coughnet/schedule.h"

namespace coughnet {

// Network inputs with binary labels.
struct LabeledFeatures {
  std::vector<MfccFeature> features;
  std::vector<int> labels;

  std::size_t size() const { return features.size(); }
  static LabeledFeatures from(const FeatureSet& set);
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0;
  double val_loss = 0;
  double learning_rate = 0;  // rate used during this epoch
  bool improved = false;
  double seconds = 0;

  bool same_trajectory(const EpochRecord& o) const {
    return epoch == o.epoch && train_loss == o.train_loss && val_loss == o.val_loss &&
           learning_rate == o.learning_rate && improved == o.improved;
  }
};

struct TrainReport {
  std::string arch;
  TrainConfig config;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_loss = 0;
  int stop_epoch = 0;
  bool stopped_early = false;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  double seconds = 0;
};

nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const TrainReport& report);

struct TrainResult {
  nn::Model<float> model;
  nn::Adam<float> optimizer;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch Adam on mean BCE. Validation loss drives the plateau schedule
// and early stopping; the best-validation weights are restored on return.
TrainResult train(const ArchitectureSpec& spec, const LabeledFeatures& train_set,
                  const LabeledFeatures& validation_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Probabilities for every feature, in batches, without touching model state.
std::vector<double> score_features(const nn::Model<float>& model, std::span<const MfccFeature> features,
                                   int batch_size = 32);

// Mean BCE of the model's predictions.
double mean_loss(const nn::Model<float>& model, const LabeledFeatures& data, int batch_size = 32);

struct EvalOptions {
  bool filtered = false;  // drop unverified positives before scoring
  std::string split_name = "test";
  std::string model_id;
};

struct ScoredSample {
  SampleRecord record;
  double score = 0;
};

struct EvalReport {
  double auc = 0;
  std::int64_t params = 0;
  std::int64_t flops = 0;
  std::optional<LatencyStats> latency;
  std::string split;
  std::string regime;
  bool filtered = false;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::string model_id;
  std::string arch;
  std::vector<ScoredSample> samples;
};

nlohmann::json to_json(const EvalReport& report);
// Score dump with header `path,label,verified,score`.
std::string format_scores(const EvalReport& report);
std::vector<ScoredSample> parse_scores(std::string_view text);

// Scores `records` with features from `cache`; the model is not modified.
EvalReport evaluate(const nn::Model<float>& model, std::span<const SampleRecord> records, const FeatureCache& cache,
                    const EvalOptions& options);

// Keeps verified positives and all negatives.
std::vector<SampleRecord> filter_verified(std::span<const SampleRecord> records);

struct BenchmarkOptions {
  int passes = 1000;
  int warmup = 10;
  double trim_fraction = 0.05;
  std::uint64_t seed = 0;
  bool pin_thread = true;
};

// Timed single-input forward passes on a fixed random input.
LatencyStats benchmark_latency(const nn::Model<float>& model, const BenchmarkOptions& options = {});

}  // namespace coughnet
