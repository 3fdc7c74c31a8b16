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

#include "coughnet/explorer.h"

#include <cmath>
#include <map>
#include <random>

#include "coughnet/error.h"
#include "coughnet/random.h"

namespace coughnet {

using nlohmann::json;

void ScoreCoefficients::validate() const {
  if (!(kappa >= 0 && beta >= 0 && gamma >= 0)) throw InvalidArgument("score coefficients must be >= 0");
  if (kappa == 0 && beta == 0 && gamma == 0) throw InvalidArgument("score coefficients must not all be zero");
}

double performance_score(double auc, double params, double flops, const ScoreCoefficients& coeffs) {
  coeffs.validate();
  if (!(auc > 0 && auc <= 1)) throw InvalidArgument("performance_score: auc must be in (0, 1]");
  if (!(params >= 1 && flops >= 1)) throw InvalidArgument("performance_score: params and flops must be >= 1");
  return 20.0 * (coeffs.kappa * std::log10(auc) - coeffs.beta * std::log10(params) -
                 coeffs.gamma * std::log10(flops));
}

void SearchBudget::validate() const {
  if (max_candidates < 0) throw InvalidArgument("search budget: max_candidates must be >= 0");
  if (epochs_cap < 1) throw InvalidArgument("search budget: epochs_cap must be >= 1");
  if (max_params && *max_params < 1) throw InvalidArgument("search budget: max_params must be positive");
  if (max_flops && *max_flops < 1) throw InvalidArgument("search budget: max_flops must be positive");
}

namespace {

constexpr int kMaxDraws = 200;

bool weighted(const BlockSpec& b) {
  return b.kind == BlockKind::kConv || b.kind == BlockKind::kResidual || b.kind == BlockKind::kDwSep;
}

// Canonical identity of a design, ignoring its name.
std::string structure_digest(ArchitectureSpec spec) {
  spec.name.clear();
  return spec_digest(spec);
}

bool legal(const ArchitectureSpec& spec) {
  try {
    validate(spec);
    feature_shape(spec);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

std::optional<std::pair<ArchitectureSpec, std::string>> propose(const ArchitectureSpec& base, std::mt19937_64& rng) {
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < base.blocks.size(); ++i) {
    if (weighted(base.blocks[i])) slots.push_back(i);
  }
  if (slots.empty()) return std::nullopt;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    ArchitectureSpec spec = base;
    const std::size_t at = slots[uniform_below(rng, slots.size())];
    BlockSpec& b = spec.blocks[at];
    std::string what = "block " + std::to_string(at) + ": ";
    switch (uniform_below(rng, 3)) {
      case 0: {
        static constexpr double kFactors[] = {0.5, 0.75, 1.25};
        const double f = kFactors[uniform_below(rng, 3)];
        const int filters = std::max(1, static_cast<int>(std::lround(b.filters * f)));
        if (filters == b.filters) continue;
        what += "filters " + std::to_string(b.filters) + "->" + std::to_string(filters);
        b.filters = filters;
        break;
      }
      case 1: {
        const int kernel = b.kernel + (uniform_below(rng, 2) ? 2 : -2);
        if (kernel < 3 || kernel > 9) continue;
        what += "kernel " + std::to_string(b.kernel) + "->" + std::to_string(kernel);
        b.kernel = kernel;
        break;
      }
      default: {
        const int stride = b.stride == 1 ? 2 : 1;
        what += "stride " + std::to_string(b.stride) + "->" + std::to_string(stride);
        b.stride = stride;
        if (stride == 1) b.dropout = false;
        break;
      }
    }
    if (legal(spec)) return std::make_pair(std::move(spec), std::move(what));
  }
  return std::nullopt;
}

std::string check_constraints(const CandidateRecord& c, const SearchBudget& budget) {
  if (budget.max_params && c.params > *budget.max_params) {
    return "params " + std::to_string(c.params) + " > " + std::to_string(*budget.max_params);
  }
  if (budget.max_flops && c.flops > *budget.max_flops) {
    return "flops " + std::to_string(c.flops) + " > " + std::to_string(*budget.max_flops);
  }
  return {};
}

CandidateRecord describe(const ArchitectureSpec& spec, int index) {
  CandidateRecord c;
  c.index = index;
  c.spec = spec;
  c.digest = structure_digest(spec);
  c.params = count_params(spec);
  c.flops = count_flops(spec);
  return c;
}

void score_candidate(CandidateRecord& c, double auc, const ScoreCoefficients& coeffs) {
  c.auc = auc;
  if (auc > 0 && auc <= 1) {
    c.score = performance_score(auc, static_cast<double>(c.params), static_cast<double>(c.flops), coeffs);
  } else {
    c.status = "degenerate";
    c.reason = "auc outside (0, 1]";
  }
}

}  // namespace

ExploreResult explore(const ArchitectureSpec& seed_spec, const SearchBudget& budget, const ScoreCoefficients& coeffs,
                      std::uint64_t rng_seed, const CandidateEvaluator& evaluate) {
  validate(seed_spec);
  budget.validate();
  coeffs.validate();

  ExploreResult result;
  result.best = seed_spec;
  result.seed = describe(seed_spec, -1);
  result.seed.status = "seed";
  if (budget.max_candidates == 0) return result;

  std::map<std::string, const CandidateRecord*> seen;
  const std::string seed_violation = check_constraints(result.seed, budget);
  const CandidateRecord* best = nullptr;
  if (seed_violation.empty()) {
    score_candidate(result.seed, evaluate(seed_spec, budget.epochs_cap), coeffs);
    if (result.seed.score) best = &result.seed;
  } else {
    result.seed.reason = seed_violation;
  }
  seen.emplace(result.seed.digest, &result.seed);

  std::mt19937_64 rng(rng_seed);
  result.log.reserve(static_cast<std::size_t>(budget.max_candidates));
  for (int i = 0; i < budget.max_candidates; ++i) {
    const ArchitectureSpec& base = best ? best->spec : seed_spec;
    auto proposal = propose(base, rng);
    if (!proposal) {
      CandidateRecord c = describe(base, i);
      c.status = "skipped";
      c.reason = "no shape-legal perturbation";
      result.log.push_back(std::move(c));
      continue;
    }
    proposal->first.name = seed_spec.name + "-x" + std::to_string(i);
    CandidateRecord c = describe(proposal->first, i);
    c.mutation = proposal->second;
    if (const std::string why = check_constraints(c, budget); !why.empty()) {
      c.status = "rejected";
      c.reason = why;
    } else if (const auto it = seen.find(c.digest); it != seen.end() && it->second->auc) {
      c.status = "duplicate";
      c.reason = "same design as " + (it->second->index < 0 ? std::string("seed") : "#" + std::to_string(it->second->index));
      c.auc = it->second->auc;
      c.score = it->second->score;
    } else {
      c.status = "evaluated";
      score_candidate(c, evaluate(c.spec, budget.epochs_cap), coeffs);
    }
    result.log.push_back(std::move(c));
    const CandidateRecord& added = result.log.back();
    if (added.status == "evaluated") seen.emplace(added.digest, &added);
    if (added.score && (!best || *added.score > *best->score)) best = &added;
  }

  bool any_feasible = false;
  for (const auto& c : result.log) any_feasible = any_feasible || c.score.has_value();
  if (!any_feasible) {
    result.warning = true;
    result.warning_message = "no feasible candidate within the budget; returning the seed design";
    result.best = seed_spec;
    result.best_score = result.seed.score;
    return result;
  }
  result.best = best->spec;
  result.best_score = best->score;
  return result;
}

json to_json(const CandidateRecord& c) {
  return {{"index", c.index},
          {"name", c.spec.name},
          {"digest", c.digest},
          {"mutation", c.mutation},
          {"params", c.params},
          {"flops", c.flops},
          {"auc", c.auc ? json(*c.auc) : json(nullptr)},
          {"score", c.score ? json(*c.score) : json(nullptr)},
          {"status", c.status},
          {"reason", c.reason}};
}

json to_json(const ExploreResult& r) {
  json log = json::array();
  for (const auto& c : r.log) log.push_back(to_json(c));
  return {{"best", to_json(r.best)},
          {"best_score", r.best_score ? json(*r.best_score) : json(nullptr)},
          {"warning", r.warning},
          {"warning_message", r.warning_message},
          {"seed", to_json(r.seed)},
          {"log", log}};
}

}  // namespace coughnet
