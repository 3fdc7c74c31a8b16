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

#include "fixtures.h"

#include <cstdio>

namespace coughnet::testing {

namespace {

std::string record_path(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d.wav", prefix, i);
  return buf;
}

}  // namespace

std::vector<SampleRecord> reference_manifest() {
  std::vector<SampleRecord> out;
  for (int i = 0; i < 381; ++i) out.push_back({record_path("pos_verified", i), 1, true});
  for (int i = 0; i < 300; ++i) out.push_back({record_path("pos_unverified", i), 1, false});
  for (int i = 0; i < 641; ++i) out.push_back({record_path("neg", i), 0, false});
  return out;
}

ReferencePartition reference_partition(Regime regime) {
  if (regime == Regime::kAllData) return {{424, 369}, {138, 126}, {119, 146}, 63};
  return {{238, 375}, {73, 131}, {70, 135}, 70};
}

std::string reference_split_csv(Regime regime) {
  const ReferencePartition p = reference_partition(regime);
  std::string csv = "path,subsplit\n";
  const auto emit = [&](const char* prefix, int from, int count, const char* subsplit) {
    for (int i = from; i < from + count; ++i) csv += record_path(prefix, i) + "," + subsplit + "\n";
  };
  const auto n = [](std::size_t v) { return static_cast<int>(v); };

  // Negatives in order train, validation, test.
  emit("neg", 0, n(p.train.negatives), "train");
  emit("neg", n(p.train.negatives), n(p.validation.negatives), "validation");
  emit("neg", n(p.train.negatives + p.validation.negatives), n(p.test.negatives), "test");

  if (regime == Regime::kVerifiedOnly) {
    emit("pos_verified", 0, n(p.train.positives), "train");
    emit("pos_verified", n(p.train.positives), n(p.validation.positives), "validation");
    emit("pos_verified", n(p.train.positives + p.validation.positives), n(p.test.positives), "test");
    return csv;
  }
  // All-data: the test set holds exactly `verified_test_positives` verified
  // positives; the remaining verified and unverified positives fill train and
  // validation in proportion.
  const int verified = 381, unverified = 300;
  const int test_verified = n(p.verified_test_positives);
  const int test_unverified = n(p.test.positives) - test_verified;
  const int val_verified = 68;
  const int val_unverified = n(p.validation.positives) - val_verified;
  const int train_verified = verified - test_verified - val_verified;
  const int train_unverified = unverified - test_unverified - val_unverified;
  emit("pos_verified", 0, train_verified, "train");
  emit("pos_verified", train_verified, val_verified, "validation");
  emit("pos_verified", train_verified + val_verified, test_verified, "test");
  emit("pos_unverified", 0, train_unverified, "train");
  emit("pos_unverified", train_unverified, val_unverified, "validation");
  emit("pos_unverified", train_unverified + val_unverified, test_unverified, "test");
  return csv;
}

}  // namespace coughnet::testing
