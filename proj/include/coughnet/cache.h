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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coughnet/audio.h"
#include "coughnet/dataset.h"
#include "coughnet/feature.h"
#include "coughnet/pipeline.h"

namespace coughnet {

nlohmann::json to_json(const AugmentPolicy& policy);
AugmentPolicy augment_policy_from_json(const nlohmann::json& j);

struct PrepareOptions {
  FeaturePipeline pipeline;
  AugmentPolicy policy;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// One cached feature: copy 0 is the untouched clip, copies 1..k are augmented.
struct CacheEntry {
  SampleRecord record;
  int copy = 0;
  std::string feature;  // relative to the cache directory
};

// On-disk layout of a feature cache directory:
//   cache.json    pipeline, augmentation policy, seed, dropped records
//   records.csv   manifest of the records that decoded successfully
//   index.csv     path,label,verified,copy,feature
//   features/     one MFC1 file per (record, copy)
struct FeatureCache {
  std::filesystem::path dir;
  FeaturePipeline pipeline;
  AugmentPolicy policy;
  std::uint64_t seed = 0;
  std::vector<SampleRecord> records;
  std::vector<CacheEntry> entries;
  std::vector<std::string> dropped;
};

// Decodes every record (relative paths resolve against `audio_root`),
// extracts the original feature and policy.copies augmented features, and
// writes the cache. Undecodable records are dropped with a warning.
FeatureCache prepare_cache(std::span<const SampleRecord> records, const std::filesystem::path& audio_root,
                           const std::filesystem::path& out_dir, const PrepareOptions& options);

FeatureCache open_cache(const std::filesystem::path& dir);

// Features in record order. With `augmented`, each record's copies follow
// its original.
struct FeatureSet {
  std::vector<SampleRecord> records;
  std::vector<int> copies;
  std::vector<MfccFeature> features;

  std::size_t size() const { return features.size(); }
  std::vector<int> labels() const;
};

// Throws DataError when a record has no cached feature.
FeatureSet load_features(const FeatureCache& cache, std::span<const SampleRecord> records, bool augmented);

}  // namespace coughnet
