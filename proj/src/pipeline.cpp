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

#include "coughnet/pipeline.h"

#include "coughnet/error.h"

namespace coughnet {

using nlohmann::json;

void FeaturePipeline::validate() const {
  mel.validate();
  if (clip_samples <= 0) throw InvalidArgument("pipeline: clip_samples must be positive");
}

json to_json(const MelParams& p) {
  return {{"sample_rate", p.sample_rate}, {"n_fft", p.n_fft},
          {"hop", p.hop},                 {"n_mels", p.n_mels},
          {"n_mfcc", p.n_mfcc},           {"f_min", p.f_min},
          {"f_max", p.f_max},             {"mel_scale_a", p.mel_scale_a},
          {"mel_break_hz", p.mel_break_hz}, {"log_floor", p.log_floor},
          {"normalize_area", p.normalize_area}};
}

MelParams mel_params_from_json(const json& j) {
  try {
    MelParams p;
    p.sample_rate = j.at("sample_rate").get<double>();
    p.n_fft = j.at("n_fft").get<int>();
    p.hop = j.at("hop").get<int>();
    p.n_mels = j.at("n_mels").get<int>();
    p.n_mfcc = j.at("n_mfcc").get<int>();
    p.f_min = j.at("f_min").get<double>();
    p.f_max = j.at("f_max").get<double>();
    p.mel_scale_a = j.at("mel_scale_a").get<double>();
    p.mel_break_hz = j.at("mel_break_hz").get<double>();
    p.log_floor = j.at("log_floor").get<double>();
    p.normalize_area = j.at("normalize_area").get<bool>();
    return p;
  } catch (const json::exception& e) {
    throw DataError(std::string("mel parameters: ") + e.what());
  }
}

json to_json(const FeaturePipeline& pipeline) {
  return {{"mel", to_json(pipeline.mel)}, {"clip_samples", pipeline.clip_samples}};
}

FeaturePipeline pipeline_from_json(const json& j) {
  try {
    FeaturePipeline p;
    p.mel = mel_params_from_json(j.at("mel"));
    p.clip_samples = j.at("clip_samples").get<Eigen::Index>();
    return p;
  } catch (const json::exception& e) {
    throw DataError(std::string("feature pipeline: ") + e.what());
  }
}

MfccFeature featurize(const AudioClip& clip, const FeaturePipeline& pipeline) {
  const AudioClip at_rate = clip.sample_rate == pipeline.mel.sample_rate ? clip : resample(clip, pipeline.mel.sample_rate);
  return extract_feature(pad_or_trim(at_rate, pipeline.clip_samples).view(), pipeline.mel);
}

MfccFeature featurize_wav(std::string_view wav_bytes, const FeaturePipeline& pipeline) {
  return featurize(decode_audio(wav_bytes, pipeline.mel.sample_rate), pipeline);
}

}  // namespace coughnet
