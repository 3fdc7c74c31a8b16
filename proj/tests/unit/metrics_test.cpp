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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "coughnet/error.h"
#include "coughnet/metrics.h"
#include "coughnet/schedule.h"

namespace coughnet {
namespace {

TEST(Auc, HandValues) {
  const std::vector<int> y{0, 0, 1, 1};
  EXPECT_EQ(auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, y), 0.75);
  EXPECT_EQ(auc(std::vector<double>{0.1, 0.2, 0.3, 0.4}, y), 1.0);
  EXPECT_EQ(auc(std::vector<double>{0.4, 0.3, 0.2, 0.1}, y), 0.0);
  EXPECT_EQ(auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y), 0.5);
  // One tied cross-class pair counts half.
  EXPECT_EQ(auc(std::vector<double>{0.1, 0.3, 0.3, 0.9}, y), 0.875);
}

TEST(Auc, MatchesPairwiseWithHeavyTies) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 60);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 7) / 7.0;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_EQ(auc(s, y), auc_pairwise(s, y));
  }
}

TEST(Auc, RejectsDegenerateInput) {
  EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), InvalidArgument);
  EXPECT_THROW(auc(std::vector<double>{0.1}, std::vector<int>{1, 0}), InvalidArgument);
  EXPECT_THROW(auc_pairwise(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 0}), InvalidArgument);
}

TEST(TrimmedMean, DropsTails) {
  EXPECT_EQ(trim_count(1000, 0.05), 50u);
  EXPECT_EQ(trim_count(19, 0.05), 0u);
  EXPECT_EQ(trim_count(20, 0.05), 1u);
  std::vector<double> v(20);
  for (int i = 0; i < 20; ++i) v[i] = i;
  v[0] = -1000;
  v[19] = 1e9;
  // 1..18 remain.
  EXPECT_DOUBLE_EQ(trimmed_mean(v, 0.05), 9.5);
  EXPECT_DOUBLE_EQ(trimmed_mean(std::vector<double>{3, 1, 2}, 0.0), 2.0);
}

TEST(TrimmedMean, StatsAreConsistent) {
  std::vector<double> v{5, 1, 4, 2, 3};
  const LatencyStats s = latency_stats(v, 0.2);
  EXPECT_EQ(s.count, 5u);
  EXPECT_EQ(s.trimmed_each_side, 1u);
  EXPECT_DOUBLE_EQ(s.trimmed_mean_ms, 3.0);
  EXPECT_DOUBLE_EQ(s.median_ms, 3.0);
  EXPECT_DOUBLE_EQ(s.min_ms, 1.0);
  EXPECT_DOUBLE_EQ(s.max_ms, 5.0);
  const auto j = to_json(s);
  EXPECT_EQ(j.at("count"), 5);
  EXPECT_DOUBLE_EQ(j.at("trimmed_mean_ms").get<double>(), 3.0);
}

TrainConfig schedule_config() {
  TrainConfig c;
  c.initial_lr = 1.0;
  c.lr_factor = 0.5;
  c.lr_patience = 2;
  c.early_stop_patience = 3;
  c.max_epochs = 20;
  return c;
}

TEST(Schedule, PlateauDecaysAfterPatience) {
  const std::vector<double> losses{1.0, 0.9, 0.9, 0.95, 0.8, 0.8, 0.8, 0.8, 0.8};
  const auto lr = reduce_lr_on_plateau(losses, schedule_config());
  EXPECT_EQ(lr, (std::vector<double>{1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.25, 0.25, 0.125}));
}

TEST(Schedule, MinLrIsAFloor) {
  TrainConfig c = schedule_config();
  c.min_lr = 0.3;
  const auto lr = reduce_lr_on_plateau(std::vector<double>(10, 1.0), c);
  EXPECT_EQ(lr.back(), 0.3);
}

TEST(Schedule, EarlyStopCountsNonImprovingEpochs) {
  const TrainConfig c = schedule_config();
  EXPECT_EQ(early_stop(std::vector<double>{1.0, 0.9, 0.95, 0.91, 0.92}, c), 5);
  // An improvement resets the wait.
  EXPECT_EQ(early_stop(std::vector<double>{1.0, 1.1, 1.1, 0.5, 0.6, 0.6}, c), std::nullopt);
  EXPECT_EQ(early_stop(std::vector<double>{1.0, 1.0, 1.0, 1.0}, c), 4);
}

TEST(Schedule, MaxEpochsStops) {
  TrainConfig c = schedule_config();
  std::vector<double> falling;
  for (int i = 0; i < 30; ++i) falling.push_back(1.0 / (i + 1));
  EXPECT_EQ(early_stop(falling, c), 20);
  EarlyStopping stop(c);
  for (int i = 0; i < 4; ++i) stop.update(falling[i]);
  EXPECT_EQ(stop.best_epoch(), 4);
  EXPECT_TRUE(stop.improved());
}

TEST(Schedule, ConfigValidation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.lr_factor = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.initial_lr = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.lr_patience = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

}  // namespace
}  // namespace coughnet
