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
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace coughnet {

// Exact ROC AUC as the Mann-Whitney statistic: P(s+ > s-) + P(s+ = s-) / 2.
// Tied scores receive midranks; the rank sum is carried in doubled integers
// so the result equals the brute-force pair count bit for bit.
double auc(std::span<const double> scores, std::span<const int> labels);

// O(n^2) pairwise reference.
double auc_pairwise(std::span<const double> scores, std::span<const int> labels);

struct LatencyStats {
  double trimmed_mean_ms = 0;
  double mean_ms = 0;
  double median_ms = 0;
  double min_ms = 0;
  double max_ms = 0;
  std::size_t count = 0;
  double trim_fraction = 0;  // dropped from each tail
  std::size_t trimmed_each_side = 0;
};

// Elements dropped from each tail: floor(n * trim_fraction).
std::size_t trim_count(std::size_t n, double trim_fraction);

// Mean of the order statistics left after dropping trim_count() from each end.
double trimmed_mean(std::span<const double> samples, double trim_fraction);

LatencyStats latency_stats(std::span<const double> samples_ms, double trim_fraction);

nlohmann::json to_json(const LatencyStats& stats);

}  // namespace coughnet
