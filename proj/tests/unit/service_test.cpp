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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <cstdio>
#include <sstream>
#include <thread>

#include "coughnet/audio.h"
#include "coughnet/byteio.h"
#include "coughnet/cli.h"
#include "coughnet/service.h"
#include "helpers.h"

// After Eigen: <resolv.h> defines a `_res` macro.
#include <httplib.h>

namespace coughnet {
namespace {

using nlohmann::json;

ArchitectureSpec small_spec() {
  ArchitectureSpec s;
  s.name = "small";
  s.blocks = {{BlockKind::kConv, 3, 4, 2, false, 1}};
  return s;
}

std::string tone_wav(double seconds, double rate = 16000) {
  std::vector<double> v(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.3 * std::sin(2 * std::numbers::pi * 440 * i / rate);
  return encode_wav(v, 1, static_cast<int>(rate), SampleFormat::kInt16);
}

// Digest from coreutils, independent of the library's OpenSSL path.
std::string sha256sum(const std::filesystem::path& file) {
  const std::string cmd = "sha256sum '" + file.string() + "'";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(::popen(cmd.c_str(), "r"), ::pclose);
  if (!pipe) return {};
  char buf[65] = {};
  if (std::fread(buf, 1, 64, pipe.get()) != 64) return {};
  return buf;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    nn::Model<float> model(small_spec(), 5);
    model_path_ = dir_ / "small.cna";
    save_checkpoint(model_path_, model, {{"pipeline", to_json(FeaturePipeline{})}, {"model_id", "small-test"}});
  }

  std::unique_ptr<PredictionService> make(std::size_t max_body = 1u << 20) {
    ServiceOptions o;
    o.model_path = model_path_;
    o.port = 0;
    o.max_body_bytes = max_body;
    o.threads = 2;
    o.cors_origin = "http://example.test";
    return std::make_unique<PredictionService>(o);
  }

  testing::TempDir dir_;
  std::filesystem::path model_path_;
};

TEST_F(ServiceTest, HealthMovesFromLoadingToOk) {
  auto svc = make();
  const int port = svc->start();
  httplib::Client cli("127.0.0.1", port);
  auto before = cli.Get("/api/health");
  ASSERT_TRUE(before);
  EXPECT_EQ(before->status, 200);
  EXPECT_EQ(json::parse(before->body).at("status"), "loading");

  // Predict before the model is ready.
  auto early = cli.Post("/api/predict", tone_wav(0.5), "audio/wav");
  ASSERT_TRUE(early);
  EXPECT_EQ(early->status, 503);

  svc->load_model_async();
  svc->wait_until_loaded();
  auto after = cli.Get("/api/health");
  const json h = json::parse(after->body);
  EXPECT_EQ(h.at("status"), "ok");
  EXPECT_EQ(h.at("model_id"), "small-test");
  EXPECT_EQ(h.at("checkpoint_sha256"), sha256sum(model_path_));
  EXPECT_TRUE(h.contains("disclaimer"));
  EXPECT_EQ(json::parse(cli.Get("/api/models")->body).at("models").size(), 1u);
  svc->stop();
}

TEST_F(ServiceTest, PredictRawAndMultipartAgreeWithCli) {
  auto svc = make();
  svc->load_model();
  const int port = svc->start();
  httplib::Client cli("127.0.0.1", port);
  const std::string wav = tone_wav(1.0);

  auto raw = cli.Post("/api/predict", wav, "audio/wav");
  ASSERT_TRUE(raw);
  ASSERT_EQ(raw->status, 200) << raw->body;
  const json r = json::parse(raw->body);
  const double p = r.at("probability").get<double>();
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
  EXPECT_EQ(r.at("recommendation"), std::string(recommendation_for(p, 0.5)));
  EXPECT_EQ(raw->get_header_value("Access-Control-Allow-Origin"), "http://example.test");

  httplib::MultipartFormDataItems items{{"file", wav, "clip.wav", "audio/wav"}};
  auto multi = cli.Post("/api/predict", items);
  ASSERT_TRUE(multi);
  ASSERT_EQ(multi->status, 200) << multi->body;
  EXPECT_EQ(json::parse(multi->body).at("probability").get<double>(), p);
  EXPECT_EQ(json::parse(cli.Post("/api/predict", wav, "audio/wav")->body).at("probability").get<double>(), p);

  // Concurrent identical requests share the frozen model.
  std::vector<double> got(4, -1.0);
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < got.size(); ++i) {
    workers.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      if (auto r = c.Post("/api/predict", wav, "audio/wav"); r && r->status == 200) {
        got[i] = json::parse(r->body).at("probability").get<double>();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const double g : got) EXPECT_EQ(g, p);

  byteio::write_file(dir_ / "clip.wav", wav);
  std::ostringstream out, err;
  ASSERT_EQ(run_cli({"cna", "--log-level", "off", "predict", (dir_ / "clip.wav").string(), "--model",
                     model_path_.string()},
                    out, err),
            kExitOk)
      << err.str();
  EXPECT_EQ(json::parse(out.str()).at("probability").get<double>(), p);
  svc->stop();
}

TEST_F(ServiceTest, RejectsBadUploads) {
  auto svc = make(64 * 1024);
  svc->load_model();
  const int port = svc->start();
  httplib::Client cli("127.0.0.1", port);

  auto wrong_type = cli.Post("/api/predict", "hello", "text/plain");
  ASSERT_TRUE(wrong_type);
  EXPECT_EQ(wrong_type->status, 415);

  httplib::MultipartFormDataItems mp3{{"file", "ID3....", "a.mp3", "audio/mpeg"}};
  EXPECT_EQ(cli.Post("/api/predict", mp3)->status, 415);

  auto garbage = cli.Post("/api/predict", "RIFF garbage that is not a wav", "audio/wav");
  EXPECT_EQ(garbage->status, 400);
  EXPECT_EQ(json::parse(garbage->body).at("error").at("code"), 400);

  const std::string empty = encode_wav(std::vector<double>{}, 1, 16000, SampleFormat::kInt16);
  EXPECT_EQ(cli.Post("/api/predict", empty, "audio/wav")->status, 422);

  auto big = cli.Post("/api/predict", tone_wav(5.0), "audio/wav");  // 160 kB > 64 KiB
  ASSERT_TRUE(big);
  EXPECT_EQ(big->status, 400);
  svc->stop();
}

TEST_F(ServiceTest, CorsPreflightAndModelList) {
  nn::Model<float> other(small_spec(), 6);
  save_checkpoint(dir_ / "other.cna", other, {{"pipeline", to_json(FeaturePipeline{})}});
  auto svc = make();
  svc->load_model();
  const int port = svc->start();
  httplib::Client cli("127.0.0.1", port);

  auto pre = cli.Options("/api/predict");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "http://example.test");
  EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);

  auto models = cli.Get("/api/models");
  ASSERT_TRUE(models);
  const json list = json::parse(models->body).at("models");
  ASSERT_EQ(list.size(), 2u);
  int active = 0;
  for (const auto& m : list) active += m.at("active").get<bool>();
  EXPECT_EQ(active, 1);
  EXPECT_EQ(list[0].at("id"), "other");
  EXPECT_EQ(list[1].at("id"), "small-test");

  EXPECT_EQ(cli.Get("/api/nothing")->status, 404);
  svc->stop();
}

TEST_F(ServiceTest, BrokenCheckpointReportsError) {
  byteio::write_file(model_path_, "CNA1 but truncated");
  auto svc = make();
  const int port = svc->start();
  svc->load_model();
  httplib::Client cli("127.0.0.1", port);
  EXPECT_EQ(json::parse(cli.Get("/api/health")->body).at("status"), "error");
  EXPECT_EQ(cli.Post("/api/predict", tone_wav(0.5), "audio/wav")->status, 503);
  svc->stop();
}

TEST(Recommendation, Threshold) {
  EXPECT_EQ(recommendation_for(0.5, 0.5), kSignsDetected);
  EXPECT_EQ(recommendation_for(0.49, 0.5), kNoSignsDetected);
}

}  // namespace
}  // namespace coughnet
