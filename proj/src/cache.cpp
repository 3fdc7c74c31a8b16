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

#include "coughnet/cache.h"

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "coughnet/byteio.h"
#include "coughnet/csv.h"
#include "coughnet/digest.h"
#include "coughnet/error.h"

namespace coughnet {

using nlohmann::json;

json to_json(const AugmentPolicy& p) {
  json j = {{"shift_s", p.shift_s},
            {"pitch_semitones", {p.pitch_semitones.lo, p.pitch_semitones.hi}},
            {"copies", p.copies}};
  j["trim_db"] = p.trim_db ? json(*p.trim_db) : json(nullptr);
  j["snr_db"] = p.snr_db ? json({p.snr_db->lo, p.snr_db->hi}) : json(nullptr);
  return j;
}

AugmentPolicy augment_policy_from_json(const json& j) {
  try {
    AugmentPolicy p;
    p.shift_s = j.at("shift_s").get<double>();
    const auto pitch = j.at("pitch_semitones").get<std::vector<double>>();
    if (pitch.size() != 2) throw DataError("augment policy: pitch_semitones needs two values");
    p.pitch_semitones = {pitch[0], pitch[1]};
    p.copies = j.at("copies").get<int>();
    if (j.at("trim_db").is_null()) {
      p.trim_db.reset();
    } else {
      p.trim_db = j.at("trim_db").get<double>();
    }
    if (j.at("snr_db").is_null()) {
      p.snr_db.reset();
    } else {
      const auto snr = j.at("snr_db").get<std::vector<double>>();
      if (snr.size() != 2) throw DataError("augment policy: snr_db needs two values");
      p.snr_db = Interval{snr[0], snr[1]};
    }
    return p;
  } catch (const json::exception& e) {
    throw DataError(std::string("augment policy: ") + e.what());
  }
}

namespace {

constexpr const char* kCacheFormat = "coughnet-feature-cache";

std::string feature_name(const std::string& path, int copy) {
  return "features/" + sha256_hex(path).substr(0, 20) + "_c" + std::to_string(copy) + ".mfc";
}

std::filesystem::path resolve(const std::filesystem::path& root, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() || root.empty() ? p : root / p;
}

}  // namespace

FeatureCache prepare_cache(std::span<const SampleRecord> records, const std::filesystem::path& audio_root,
                           const std::filesystem::path& out_dir, const PrepareOptions& options) {
  options.pipeline.validate();
  options.policy.validate();
  std::filesystem::create_directories(out_dir / "features");

  const std::size_t n = records.size();
  const int copies = options.policy.copies;
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex first_error_mutex;
  std::exception_ptr first_error;

  const auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const SampleRecord& r = records[i];
        AudioClip clip;
        try {
          clip = load_audio(resolve(audio_root, r.path), options.pipeline.mel.sample_rate);
        } catch (const DataError& e) {
          errors[i] = e.what();
          continue;
        }
        write_feature(out_dir / feature_name(r.path, 0), featurize(clip, options.pipeline));
        for (int c = 1; c <= copies; ++c) {
          const AudioClip aug = augment(clip, options.policy, derive_seed(options.seed, i, static_cast<std::uint64_t>(c)));
          write_feature(out_dir / feature_name(r.path, c), featurize(aug, options.pipeline));
        }
      } catch (...) {
        const std::lock_guard lock(first_error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  FeatureCache cache;
  cache.dir = out_dir;
  cache.pipeline = options.pipeline;
  cache.policy = options.policy;
  cache.seed = options.seed;
  std::string index = "path,label,verified,copy,feature\n";
  for (std::size_t i = 0; i < n; ++i) {
    const SampleRecord& r = records[i];
    if (!errors[i].empty()) {
      spdlog::warn("dropping {}: {}", r.path, errors[i]);
      cache.dropped.push_back(r.path);
      continue;
    }
    cache.records.push_back(r);
    for (int c = 0; c <= copies; ++c) {
      cache.entries.push_back({r, c, feature_name(r.path, c)});
      index += csv::join({r.path, std::to_string(r.label), r.verified ? "1" : "0", std::to_string(c),
                          feature_name(r.path, c)});
      index += '\n';
    }
  }

  const json meta = {{"format", kCacheFormat},
                     {"version", 1},
                     {"pipeline", to_json(cache.pipeline)},
                     {"augment", to_json(cache.policy)},
                     {"seed", cache.seed},
                     {"records", cache.records.size()},
                     {"dropped", cache.dropped}};
  byteio::write_file(out_dir / "cache.json", meta.dump(2) + "\n");
  write_manifest(out_dir / "records.csv", cache.records);
  byteio::write_file(out_dir / "index.csv", index);
  return cache;
}

FeatureCache open_cache(const std::filesystem::path& dir) {
  FeatureCache cache;
  cache.dir = dir;
  json meta;
  try {
    meta = json::parse(byteio::read_file(dir / "cache.json"));
    if (meta.at("format") != kCacheFormat) throw DataError(dir.string() + ": not a feature cache");
    cache.pipeline = pipeline_from_json(meta.at("pipeline"));
    cache.policy = augment_policy_from_json(meta.at("augment"));
    cache.seed = meta.at("seed").get<std::uint64_t>();
    cache.dropped = meta.at("dropped").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw DataError((dir / "cache.json").string() + ": " + e.what());
  }
  cache.records = load_manifest(dir / "records.csv");
  const auto source = (dir / "index.csv").string();
  for (const auto& row :
       csv::parse(byteio::read_file(dir / "index.csv"), {"path", "label", "verified", "copy", "feature"}, source)) {
    CacheEntry e;
    e.record.path = row.fields[0];
    try {
      e.record.label = std::stoi(row.fields[1]);
      e.record.verified = std::stoi(row.fields[2]) == 1;
      e.copy = std::stoi(row.fields[3]);
    } catch (const std::exception&) {
      throw DataError(source + ": line " + std::to_string(row.line) + ": malformed number");
    }
    e.feature = row.fields[4];
    cache.entries.push_back(std::move(e));
  }
  return cache;
}

std::vector<int> FeatureSet::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

FeatureSet load_features(const FeatureCache& cache, std::span<const SampleRecord> records, bool augmented) {
  std::map<std::string, std::vector<const CacheEntry*>> by_path;
  for (const auto& e : cache.entries) by_path[e.record.path].push_back(&e);

  FeatureSet set;
  for (const auto& r : records) {
    const auto it = by_path.find(r.path);
    if (it == by_path.end()) throw DataError("feature cache " + cache.dir.string() + " has no entry for " + r.path);
    for (const CacheEntry* e : it->second) {
      if (e->copy != 0 && !augmented) continue;
      if (e->record.label != r.label || e->record.verified != r.verified) {
        throw DataError("feature cache " + cache.dir.string() + ": labels for " + r.path + " differ from the manifest");
      }
      set.records.push_back(r);
      set.copies.push_back(e->copy);
      set.features.push_back(read_feature(cache.dir / e->feature));
    }
  }
  return set;
}

}  // namespace coughnet
