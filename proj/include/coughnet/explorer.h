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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coughnet/arch.h"

namespace coughnet {

// score = 20 log10(auc^kappa / (params^beta * flops^gamma))
struct ScoreCoefficients {
  double kappa = 2.0;
  double beta = 0.5;
  double gamma = 0.5;

  void validate() const;
};

double performance_score(double auc, double params, double flops, const ScoreCoefficients& coeffs = {});

struct SearchBudget {
  int max_candidates = 20;
  int epochs_cap = 15;
  std::optional<std::int64_t> max_params;
  std::optional<std::int64_t> max_flops;

  void validate() const;
};

struct CandidateRecord {
  int index = 0;  // proposal order; the seed is -1
  ArchitectureSpec spec;
  std::string digest;
  std::string mutation;
  std::int64_t params = 0;
  std::int64_t flops = 0;
  std::optional<double> auc;
  std::optional<double> score;
  std::string status;  // seed, evaluated, duplicate, rejected, degenerate, skipped
  std::string reason;
};

struct ExploreResult {
  ArchitectureSpec best;
  std::optional<double> best_score;
  bool warning = false;
  std::string warning_message;
  CandidateRecord seed;
  std::vector<CandidateRecord> log;  // one entry per proposed candidate
};

// Trains a candidate for at most `epochs_cap` epochs and returns its
// validation AUC.
using CandidateEvaluator = std::function<double(const ArchitectureSpec& spec, int epochs_cap)>;

// Hill climb from the best feasible design so far. Each proposal perturbs one
// weighted block of that design: filters x{0.5, 0.75, 1.25}, kernel +-2 within
// [3, 9], or stride 1 <-> 2. Proposals that break a constraint are logged and
// never trained; a repeated design reuses its earlier result.
ExploreResult explore(const ArchitectureSpec& seed_spec, const SearchBudget& budget, const ScoreCoefficients& coeffs,
                      std::uint64_t rng_seed, const CandidateEvaluator& evaluate);

nlohmann::json to_json(const CandidateRecord& record);
nlohmann::json to_json(const ExploreResult& result);

}  // namespace coughnet
