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

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "coughnet/checkpoint.h"
#include "coughnet/pipeline.h"

namespace coughnet {

inline constexpr int kResponseSchemaVersion = 1;
inline constexpr std::string_view kDisclaimer =
    "Research prototype. This result is not a diagnosis and must not be used as medical advice. "
    "If you have symptoms or have been exposed, consult a health professional and follow local testing guidance.";
inline constexpr std::string_view kSignsDetected = "signs_detected_seek_testing";
inline constexpr std::string_view kNoSignsDetected = "no_signs_detected";

struct Prediction {
  double probability = 0;
  std::string recommendation;
  double threshold = 0.5;
  std::string model_id;
  double feature_ms = 0;
  double inference_ms = 0;
};

nlohmann::json to_json(const Prediction& p);
std::string_view recommendation_for(double probability, double threshold);

// A frozen checkpoint plus the feature pipeline it was trained with. Safe to
// share across threads.
class PredictionEngine {
 public:
  PredictionEngine(LoadedCheckpoint checkpoint, std::string model_id, std::string digest, double threshold = 0.5);
  static std::unique_ptr<PredictionEngine> from_file(const std::filesystem::path& path, double threshold = 0.5);

  // decode -> mono -> resample -> pad_or_trim -> MFCC -> forward.
  Prediction predict_wav(std::string_view wav_bytes) const;
  Prediction predict_feature(const MfccFeature& feature) const;

  const std::string& model_id() const { return model_id_; }
  const std::string& digest() const { return digest_; }
  const FeaturePipeline& pipeline() const { return pipeline_; }
  const nn::Model<float>& model() const { return checkpoint_.model; }
  double threshold() const { return threshold_; }

 private:
  LoadedCheckpoint checkpoint_;
  FeaturePipeline pipeline_;
  std::string model_id_;
  std::string digest_;
  double threshold_;
};

// Model id recorded in checkpoint metadata, else the file stem.
std::string checkpoint_model_id(const std::filesystem::path& path, const nlohmann::json& metadata);

struct ServiceOptions {
  std::filesystem::path model_path;
  std::filesystem::path models_dir;  // listed by /api/models; empty = model_path's directory
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  double threshold = 0.5;
  std::size_t max_body_bytes = 10u << 20;
  std::string cors_origin = "*";
  int threads = 4;
  std::filesystem::path audit_log;  // empty disables
};

// HTTP front end:
//   POST /api/predict   raw WAV body or multipart upload
//   GET  /api/health    {status, model_id, checkpoint_sha256}
//   GET  /api/models    checkpoints available in models_dir
class PredictionService {
 public:
  explicit PredictionService(ServiceOptions options);
  ~PredictionService();
  PredictionService(const PredictionService&) = delete;
  PredictionService& operator=(const PredictionService&) = delete;

  // Binds the socket; returns the bound port. Throws on failure.
  int bind();
  // Serves until stop(); bind() must have succeeded.
  void listen();
  // bind() + listen() on a background thread.
  int start();
  void stop();

  // Loads the checkpoint on a background thread; health reports "loading" until done.
  void load_model_async();
  void load_model();
  void wait_until_loaded();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace coughnet
