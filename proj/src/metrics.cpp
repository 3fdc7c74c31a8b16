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

#include "coughnet/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coughnet/error.h"

namespace coughnet {

namespace {

void check_scores(std::span<const double> scores, std::span<const int> labels, std::int64_t& pos,
                  std::int64_t& neg) {
  if (scores.size() != labels.size()) throw InvalidArgument("auc: scores and labels differ in length");
  pos = neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw InvalidArgument("auc: NaN score");
    if (labels[i] == 1) {
      ++pos;
    } else if (labels[i] == 0) {
      ++neg;
    } else {
      throw InvalidArgument("auc: labels must be 0 or 1");
    }
  }
  if (pos == 0 || neg == 0) throw InvalidArgument("auc: needs at least one positive and one negative");
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  std::int64_t pos = 0, neg = 0;
  check_scores(scores, labels, pos, neg);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the positive rank sum; a tie group spanning ranks [lo, hi] has midrank (lo + hi) / 2.
  std::int64_t rank_sum2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const auto lo = static_cast<std::int64_t>(i + 1), hi = static_cast<std::int64_t>(j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) rank_sum2 += lo + hi;
    }
    i = j + 1;
  }
  // 2U = 2R - n+(n+ + 1)
  const std::int64_t u2 = rank_sum2 - pos * (pos + 1);
  return static_cast<double>(u2) / static_cast<double>(2 * pos * neg);
}

double auc_pairwise(std::span<const double> scores, std::span<const int> labels) {
  std::int64_t pos = 0, neg = 0;
  check_scores(scores, labels, pos, neg);
  std::int64_t count2 = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j]) {
        count2 += 2;
      } else if (scores[i] == scores[j]) {
        count2 += 1;
      }
    }
  }
  return static_cast<double>(count2) / static_cast<double>(2 * pos * neg);
}

std::size_t trim_count(std::size_t n, double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) throw InvalidArgument("trim fraction must be in [0, 0.5)");
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * trim_fraction + 1e-9));
}

double trimmed_mean(std::span<const double> samples, double trim_fraction) {
  if (samples.empty()) throw InvalidArgument("trimmed_mean: no samples");
  const std::size_t k = trim_count(samples.size(), trim_fraction);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  long double sum = 0;
  for (std::size_t i = k; i < sorted.size() - k; ++i) sum += sorted[i];
  return static_cast<double>(sum / static_cast<long double>(sorted.size() - 2 * k));
}

LatencyStats latency_stats(std::span<const double> samples_ms, double trim_fraction) {
  if (samples_ms.empty()) throw InvalidArgument("latency_stats: no samples");
  std::vector<double> sorted(samples_ms.begin(), samples_ms.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  LatencyStats s;
  s.count = n;
  s.trim_fraction = trim_fraction;
  s.trimmed_each_side = trim_count(n, trim_fraction);
  s.trimmed_mean_ms = trimmed_mean(sorted, trim_fraction);
  long double sum = 0;
  for (const double v : sorted) sum += v;
  s.mean_ms = static_cast<double>(sum / static_cast<long double>(n));
  s.median_ms = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.min_ms = sorted.front();
  s.max_ms = sorted.back();
  return s;
}

nlohmann::json to_json(const LatencyStats& s) {
  return {{"trimmed_mean_ms", s.trimmed_mean_ms}, {"mean_ms", s.mean_ms},   {"median_ms", s.median_ms},
          {"min_ms", s.min_ms},                   {"max_ms", s.max_ms},     {"count", s.count},
          {"trim_fraction", s.trim_fraction},     {"trimmed_each_side", s.trimmed_each_side}};
}

}  // namespace coughnet
