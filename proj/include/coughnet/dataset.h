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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coughnet {

struct SampleRecord {
  std::string path;
  int label = 0;          // 1 = positive
  bool verified = false;  // PCR-confirmed positive

  bool operator==(const SampleRecord&) const = default;
};

enum class Regime { kAllData, kVerifiedOnly };

std::string to_string(Regime regime);
// Accepts "all-data" and "verified-only".
Regime regime_from_string(std::string_view name);

enum class Subsplit { kTrain, kValidation, kTest };

std::string to_string(Subsplit subsplit);
Subsplit subsplit_from_string(std::string_view name);

struct DatasetSplit {
  std::vector<SampleRecord> train;
  std::vector<SampleRecord> validation;
  std::vector<SampleRecord> test;
  Regime regime = Regime::kAllData;
  std::uint64_t seed = 0;
  bool fixed = false;     // loaded from a split file
  bool filtered = false;  // unverified test positives removed

  const std::vector<SampleRecord>& part(Subsplit s) const;
  std::size_t size() const { return train.size() + validation.size() + test.size(); }
};

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t verified = 0;

  std::size_t total() const { return positives + negatives; }
  bool operator==(const ClassCounts&) const = default;
};

ClassCounts count_classes(std::span<const SampleRecord> records);

// Manifest CSV with header `path,label,verified`; label and verified in {0,1}.
std::vector<SampleRecord> parse_manifest(std::string_view text, std::string_view source = "manifest");
std::vector<SampleRecord> load_manifest(const std::filesystem::path& path);
std::string format_manifest(std::span<const SampleRecord> records);
void write_manifest(const std::filesystem::path& path, std::span<const SampleRecord> records);

// Records admitted by `regime`: everything, or everything except unverified positives.
std::vector<SampleRecord> eligible_records(std::span<const SampleRecord> records, Regime regime);

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

// Seeded uniform shuffle of the eligible set, then contiguous partition with
// floor-sized train/validation parts and the remainder in test.
DatasetSplit make_split(std::span<const SampleRecord> records, const SplitRatios& ratios, std::uint64_t seed,
                        Regime regime);

// Split CSV with header `path,subsplit`. Paths must name manifest records.
DatasetSplit parse_fixed_split(std::string_view text, std::span<const SampleRecord> manifest,
                               Regime regime = Regime::kAllData, std::string_view source = "split");
DatasetSplit load_fixed_split(const std::filesystem::path& path, std::span<const SampleRecord> manifest,
                              Regime regime = Regime::kAllData);
std::string format_fixed_split(const DatasetSplit& split);
void write_fixed_split(const std::filesystem::path& path, const DatasetSplit& split);

// Throws DataError unless the sub-lists are pairwise disjoint, their union
// equals `eligible`, and the regime admits every record.
void validate_partition(const DatasetSplit& split, std::span<const SampleRecord> eligible);

// Test keeps verified positives and all negatives; train/validation untouched.
DatasetSplit filter_verified_test(const DatasetSplit& split);

}  // namespace coughnet
