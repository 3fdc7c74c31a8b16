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

#include <Eigen/Core>

#include <nlohmann/json.hpp>

#include "coughnet/audio.h"
#include "coughnet/feature.h"
#include "coughnet/mfcc.h"

namespace coughnet {

// Everything needed to turn a decoded clip into a network input.
struct FeaturePipeline {
  MelParams mel = MelParams::standard();
  Eigen::Index clip_samples = kStandardClipSamples;

  void validate() const;
  bool operator==(const FeaturePipeline&) const = default;
};

nlohmann::json to_json(const MelParams& params);
MelParams mel_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FeaturePipeline& pipeline);
FeaturePipeline pipeline_from_json(const nlohmann::json& j);

// Resamples to the pipeline rate if needed, then pad_or_trim -> MFCC.
MfccFeature featurize(const AudioClip& clip, const FeaturePipeline& pipeline);

// decode -> mono -> resample -> featurize.
MfccFeature featurize_wav(std::string_view wav_bytes, const FeaturePipeline& pipeline);

}  // namespace coughnet
