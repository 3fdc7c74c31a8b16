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

#include "coughnet/dataset.h"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "coughnet/byteio.h"
#include "coughnet/csv.h"
#include "coughnet/error.h"
#include "coughnet/random.h"

namespace coughnet {

namespace {

int parse_flag(const std::string& field, const char* name, std::string_view source, std::size_t line) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw DataError(std::string(source) + ": line " + std::to_string(line) + ": " + name + " must be 0 or 1, got `" +
                  field + "`");
}

bool admitted(const SampleRecord& r, Regime regime) {
  return regime == Regime::kAllData || r.label == 0 || r.verified;
}

}  // namespace

std::string to_string(Regime regime) { return regime == Regime::kAllData ? "all-data" : "verified-only"; }

Regime regime_from_string(std::string_view name) {
  if (name == "all-data") return Regime::kAllData;
  if (name == "verified-only") return Regime::kVerifiedOnly;
  throw InvalidArgument("unknown regime `" + std::string(name) + "` (expected all-data or verified-only)");
}

std::string to_string(Subsplit subsplit) {
  switch (subsplit) {
    case Subsplit::kTrain: return "train";
    case Subsplit::kValidation: return "validation";
    case Subsplit::kTest: return "test";
  }
  return "?";
}

Subsplit subsplit_from_string(std::string_view name) {
  if (name == "train") return Subsplit::kTrain;
  if (name == "validation") return Subsplit::kValidation;
  if (name == "test") return Subsplit::kTest;
  throw InvalidArgument("unknown subsplit `" + std::string(name) + "`");
}

const std::vector<SampleRecord>& DatasetSplit::part(Subsplit s) const {
  switch (s) {
    case Subsplit::kTrain: return train;
    case Subsplit::kValidation: return validation;
    case Subsplit::kTest: return test;
  }
  return test;
}

ClassCounts count_classes(std::span<const SampleRecord> records) {
  ClassCounts c;
  for (const auto& r : records) {
    (r.label ? c.positives : c.negatives) += 1;
    if (r.verified) ++c.verified;
  }
  return c;
}

std::vector<SampleRecord> parse_manifest(std::string_view text, std::string_view source) {
  std::vector<SampleRecord> out;
  for (const auto& row : csv::parse(text, {"path", "label", "verified"}, source)) {
    SampleRecord r;
    r.path = row.fields[0];
    if (r.path.empty()) throw DataError(std::string(source) + ": line " + std::to_string(row.line) + ": empty path");
    r.label = parse_flag(row.fields[1], "label", source, row.line);
    r.verified = parse_flag(row.fields[2], "verified", source, row.line) == 1;
    if (r.verified && r.label == 0) {
      throw DataError(std::string(source) + ": line " + std::to_string(row.line) +
                      ": verified=1 requires label=1");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SampleRecord> load_manifest(const std::filesystem::path& path) {
  return parse_manifest(byteio::read_file(path), path.string());
}

std::string format_manifest(std::span<const SampleRecord> records) {
  std::string out = "path,label,verified\n";
  for (const auto& r : records) {
    out += csv::join({r.path, std::to_string(r.label), r.verified ? "1" : "0"});
    out += '\n';
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, std::span<const SampleRecord> records) {
  byteio::write_file(path, format_manifest(records));
}

std::vector<SampleRecord> eligible_records(std::span<const SampleRecord> records, Regime regime) {
  std::vector<SampleRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (admitted(r, regime)) out.push_back(r);
  }
  return out;
}

DatasetSplit make_split(std::span<const SampleRecord> records, const SplitRatios& ratios, std::uint64_t seed,
                        Regime regime) {
  if (!(ratios.train >= 0 && ratios.validation >= 0 && ratios.test >= 0)) {
    throw InvalidArgument("split ratios must be non-negative");
  }
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw InvalidArgument("split ratios must sum to 1");
  }
  std::vector<SampleRecord> pool = eligible_records(records, regime);
  if (pool.empty()) throw InvalidArgument("make_split: no eligible records");
  std::mt19937_64 rng(seed);
  shuffle(pool, rng);

  const double n = static_cast<double>(pool.size());
  const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * n + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(ratios.validation * n + 1e-9));

  DatasetSplit split;
  split.regime = regime;
  split.seed = seed;
  const auto first = pool.begin();
  split.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(first + static_cast<std::ptrdiff_t>(n_train),
                          first + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val), pool.end());
  return split;
}

DatasetSplit parse_fixed_split(std::string_view text, std::span<const SampleRecord> manifest, Regime regime,
                               std::string_view source) {
  std::unordered_map<std::string, const SampleRecord*> by_path;
  for (const auto& r : manifest) by_path.emplace(r.path, &r);

  DatasetSplit split;
  split.regime = regime;
  split.fixed = true;
  std::set<std::string> seen;
  for (const auto& row : csv::parse(text, {"path", "subsplit"}, source)) {
    const std::string where = std::string(source) + ": line " + std::to_string(row.line) + ": ";
    const auto it = by_path.find(row.fields[0]);
    if (it == by_path.end()) throw DataError(where + "`" + row.fields[0] + "` is not in the manifest");
    if (!seen.insert(row.fields[0]).second) throw DataError(where + "duplicate assignment of `" + row.fields[0] + "`");
    Subsplit part{};
    try {
      part = subsplit_from_string(row.fields[1]);
    } catch (const InvalidArgument& e) {
      throw DataError(where + e.what());
    }
    if (!admitted(*it->second, regime)) {
      throw DataError(where + "unverified positive `" + row.fields[0] + "` in a verified-only split");
    }
    switch (part) {
      case Subsplit::kTrain: split.train.push_back(*it->second); break;
      case Subsplit::kValidation: split.validation.push_back(*it->second); break;
      case Subsplit::kTest: split.test.push_back(*it->second); break;
    }
  }
  return split;
}

DatasetSplit load_fixed_split(const std::filesystem::path& path, std::span<const SampleRecord> manifest,
                              Regime regime) {
  return parse_fixed_split(byteio::read_file(path), manifest, regime, path.string());
}

std::string format_fixed_split(const DatasetSplit& split) {
  std::string out = "path,subsplit\n";
  for (const Subsplit s : {Subsplit::kTrain, Subsplit::kValidation, Subsplit::kTest}) {
    for (const auto& r : split.part(s)) {
      out += csv::join({r.path, to_string(s)});
      out += '\n';
    }
  }
  return out;
}

void write_fixed_split(const std::filesystem::path& path, const DatasetSplit& split) {
  byteio::write_file(path, format_fixed_split(split));
}

void validate_partition(const DatasetSplit& split, std::span<const SampleRecord> eligible) {
  std::map<std::string, int> owner;
  for (const Subsplit s : {Subsplit::kTrain, Subsplit::kValidation, Subsplit::kTest}) {
    for (const auto& r : split.part(s)) {
      if (!admitted(r, split.regime)) throw DataError("unverified positive `" + r.path + "` in a verified-only split");
      if (!owner.emplace(r.path, static_cast<int>(s)).second) {
        throw DataError("record `" + r.path + "` assigned more than once");
      }
    }
  }
  std::set<std::string> expected;
  for (const auto& r : eligible) expected.insert(r.path);
  if (expected.size() != owner.size()) {
    throw DataError("split covers " + std::to_string(owner.size()) + " records, eligible set has " +
                    std::to_string(expected.size()));
  }
  for (const auto& [path, part] : owner) {
    if (!expected.count(path)) throw DataError("record `" + path + "` is not in the eligible set");
  }
}

DatasetSplit filter_verified_test(const DatasetSplit& split) {
  DatasetSplit out = split;
  out.test.clear();
  for (const auto& r : split.test) {
    if (r.label == 0 || r.verified) out.test.push_back(r);
  }
  out.filtered = true;
  return out;
}

}  // namespace coughnet
