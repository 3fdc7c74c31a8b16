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

#include "coughnet/service.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "coughnet/byteio.h"
#include "coughnet/digest.h"
#include "coughnet/error.h"
#include "coughnet/nn/layers.h"

namespace coughnet {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Media type without parameters, lower-cased.
std::string media_type(const std::string& content_type) {
  const auto semi = content_type.find(';');
  std::string t = content_type.substr(0, semi);
  t.erase(0, t.find_first_not_of(" \t"));
  t.erase(t.find_last_not_of(" \t") + 1);
  return lower(t);
}

bool is_wav_type(const std::string& type) {
  return type == "audio/wav" || type == "audio/x-wav" || type == "audio/wave" || type == "audio/vnd.wave";
}

}  // namespace

std::string_view recommendation_for(double probability, double threshold) {
  return probability >= threshold ? kSignsDetected : kNoSignsDetected;
}

json to_json(const Prediction& p) {
  return {{"v", kResponseSchemaVersion},
          {"probability", p.probability},
          {"recommendation", p.recommendation},
          {"threshold", p.threshold},
          {"model_id", p.model_id},
          {"timing_ms",
           {{"feature", p.feature_ms}, {"inference", p.inference_ms}, {"total", p.feature_ms + p.inference_ms}}},
          {"disclaimer", kDisclaimer}};
}

std::string checkpoint_model_id(const std::filesystem::path& path, const json& metadata) {
  if (metadata.is_object() && metadata.contains("model_id") && metadata["model_id"].is_string()) {
    return metadata["model_id"].get<std::string>();
  }
  return path.stem().string();
}

PredictionEngine::PredictionEngine(LoadedCheckpoint checkpoint, std::string model_id, std::string digest,
                                   double threshold)
    : checkpoint_(std::move(checkpoint)),
      model_id_(std::move(model_id)),
      digest_(std::move(digest)),
      threshold_(threshold) {
  if (!(threshold >= 0 && threshold <= 1)) throw InvalidArgument("threshold must be in [0, 1]");
  if (checkpoint_.metadata.contains("pipeline")) pipeline_ = pipeline_from_json(checkpoint_.metadata["pipeline"]);
  const auto& in = checkpoint_.model.spec().input;
  if (in.height != pipeline_.mel.n_mfcc || in.channels != 1) {
    throw DataError("checkpoint input shape does not match its feature pipeline");
  }
}

std::unique_ptr<PredictionEngine> PredictionEngine::from_file(const std::filesystem::path& path, double threshold) {
  const std::string bytes = byteio::read_file(path);
  LoadedCheckpoint ckpt = [&] {
    try {
      return decode_checkpoint(bytes);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }();
  std::string id = checkpoint_model_id(path, ckpt.metadata);
  return std::make_unique<PredictionEngine>(std::move(ckpt), std::move(id), sha256_hex(bytes), threshold);
}

Prediction PredictionEngine::predict_feature(const MfccFeature& feature) const {
  const auto t0 = Clock::now();
  const nn::Tensor<float> logits = checkpoint_.model.logits(to_tensor(feature));
  Prediction p;
  p.inference_ms = ms_since(t0);
  p.probability = nn::stable_sigmoid<double>(logits[0]);
  p.threshold = threshold_;
  p.recommendation = std::string(recommendation_for(p.probability, threshold_));
  p.model_id = model_id_;
  return p;
}

Prediction PredictionEngine::predict_wav(std::string_view wav_bytes) const {
  const auto t0 = Clock::now();
  const MfccFeature feature = featurize_wav(wav_bytes, pipeline_);
  const double feature_ms = ms_since(t0);
  Prediction p = predict_feature(feature);
  p.feature_ms = feature_ms;
  return p;
}

struct PredictionService::Impl {
  ServiceOptions options;
  httplib::Server server;
  int port = -1;
  std::thread listener;
  std::thread loader;

  std::mutex mutex;
  std::condition_variable loaded_cv;
  std::shared_ptr<const PredictionEngine> engine;
  std::string status = "loading";
  std::string load_error;
  std::mutex audit_mutex;

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) { routes(); }

  std::shared_ptr<const PredictionEngine> current() {
    const std::lock_guard lock(mutex);
    return engine;
  }

  static void reply(httplib::Response& res, int status, json body) {
    body["disclaimer"] = kDisclaimer;
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
  }

  static void error(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, {{"v", kResponseSchemaVersion}, {"error", {{"code", status}, {"message", message}}}});
  }

  void audit(std::string_view body, const Prediction& p) {
    if (options.audit_log.empty()) return;
    const std::lock_guard lock(audit_mutex);
    std::ofstream out(options.audit_log, std::ios::app);
    out << std::time(nullptr) << ',' << sha256_hex(body) << ',' << p.model_id << ',' << p.probability << '\n';
  }

  void predict(const httplib::Request& req, httplib::Response& res) {
    const auto engine_now = current();
    if (!engine_now) {
      std::string message;
      {
        const std::lock_guard lock(mutex);
        message = status == "error" ? "model failed to load: " + load_error : "model is still loading";
      }
      error(res, 503, message);
      return;
    }
    std::string_view audio;
    if (req.is_multipart_form_data()) {
      if (req.files.empty()) {
        error(res, 400, "multipart request has no file part");
        return;
      }
      const auto& part = req.files.begin()->second;
      const std::string type = media_type(part.content_type);
      if (!type.empty() && !is_wav_type(type) && type != "application/octet-stream") {
        error(res, 415, "uploaded file must be WAV audio, got " + type);
        return;
      }
      audio = part.content;
    } else {
      const std::string type = media_type(req.get_header_value("Content-Type"));
      if (!is_wav_type(type)) {
        error(res, 415, "expected a WAV body (audio/wav) or a multipart upload");
        return;
      }
      audio = req.body;
    }
    if (audio.size() > options.max_body_bytes) {
      error(res, 400, "audio exceeds the upload limit");
      return;
    }
    try {
      const Prediction p = engine_now->predict_wav(audio);
      audit(audio, p);
      reply(res, 200, to_json(p));
    } catch (const EmptyAudioError& e) {
      error(res, 422, e.what());
    } catch (const DataError& e) {
      error(res, 400, e.what());
    } catch (const std::exception& e) {
      spdlog::error("predict failed: {}", e.what());
      error(res, 500, "internal error");
    }
  }

  std::filesystem::path models_dir() const {
    if (!options.models_dir.empty()) return options.models_dir;
    const auto parent = options.model_path.parent_path();
    return parent.empty() ? std::filesystem::path(".") : parent;
  }

  json list_models() {
    json models = json::array();
    const auto active = current();
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(models_dir(), ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".cna") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      try {
        const std::string bytes = byteio::read_file(path);
        const json header = read_checkpoint_header(bytes);
        const std::string digest = sha256_hex(bytes);
        models.push_back({{"id", checkpoint_model_id(path, header.value("metadata", json::object()))},
                          {"file", path.filename().string()},
                          {"arch", header.at("spec").value("name", "")},
                          {"sha256", digest},
                          {"active", active && active->digest() == digest}});
      } catch (const std::exception& e) {
        spdlog::warn("skipping {}: {}", path.string(), e.what());
      }
    }
    return models;
  }

  void routes() {
    server.set_payload_max_length(options.max_body_bytes);
    const int threads = std::max(1, options.threads);
    server.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Post("/api/predict", [this](const httplib::Request& req, httplib::Response& res) { predict(req, res); });
    server.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
      const auto e = current();
      std::string s;
      {
        const std::lock_guard lock(mutex);
        s = status;
      }
      json body = {{"v", kResponseSchemaVersion}, {"status", s}};
      body["model_id"] = e ? json(e->model_id()) : json(nullptr);
      body["checkpoint_sha256"] = e ? json(e->digest()) : json(nullptr);
      reply(res, 200, std::move(body));
    });
    server.Get("/api/models", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"v", kResponseSchemaVersion}, {"models", list_models()}});
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      if (res.status == 413) {
        error(res, 400, "audio exceeds the upload limit");
      } else {
        error(res, res.status, httplib::status_message(res.status));
      }
      return httplib::Server::HandlerResponse::Handled;
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
      error(res, 500, "internal error");
    });
  }
};

PredictionService::PredictionService(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

PredictionService::~PredictionService() {
  stop();
  if (impl_->loader.joinable()) impl_->loader.join();
}

int PredictionService::bind() {
  auto& s = *impl_;
  if (s.options.port == 0) {
    s.port = s.server.bind_to_any_port(s.options.host);
  } else {
    s.port = s.server.bind_to_port(s.options.host, s.options.port) ? s.options.port : -1;
  }
  if (s.port < 0) {
    throw std::runtime_error("cannot bind " + s.options.host + ":" + std::to_string(s.options.port));
  }
  return s.port;
}

void PredictionService::listen() { impl_->server.listen_after_bind(); }

int PredictionService::start() {
  const int port = bind();
  impl_->listener = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
  return port;
}

void PredictionService::stop() {
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

void PredictionService::load_model() {
  auto& s = *impl_;
  try {
    std::shared_ptr<const PredictionEngine> e =
        PredictionEngine::from_file(s.options.model_path, s.options.threshold);
    const std::lock_guard lock(s.mutex);
    s.engine = std::move(e);
    s.status = "ok";
  } catch (const std::exception& ex) {
    spdlog::error("cannot load model {}: {}", s.options.model_path.string(), ex.what());
    const std::lock_guard lock(s.mutex);
    s.status = "error";
    s.load_error = ex.what();
  }
  s.loaded_cv.notify_all();
}

void PredictionService::load_model_async() {
  if (impl_->loader.joinable()) impl_->loader.join();
  impl_->loader = std::thread([this] { load_model(); });
}

void PredictionService::wait_until_loaded() {
  std::unique_lock lock(impl_->mutex);
  impl_->loaded_cv.wait(lock, [this] { return impl_->status != "loading"; });
}

}  // namespace coughnet
