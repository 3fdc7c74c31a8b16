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

#include <string>
#include <vector>

#include "coughnet/dataset.h"

namespace coughnet::testing {

// 1322 records: 681 positives (381 verified, 300 unverified) and 641 negatives.
std::vector<SampleRecord> reference_manifest();

// Per-class sub-split sizes of the reference partition.
struct ClassSplit {
  std::size_t positives;
  std::size_t negatives;
};
struct ReferencePartition {
  ClassSplit train, validation, test;
  std::size_t verified_test_positives;  // verified among the test positives
};
ReferencePartition reference_partition(Regime regime);

// `path,subsplit` CSV that assigns the reference manifest to the reference
// partition of `regime`.
std::string reference_split_csv(Regime regime);

}  // namespace coughnet::testing
