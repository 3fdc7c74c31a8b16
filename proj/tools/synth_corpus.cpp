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

#include <CLI11.hpp>

#include <iostream>

#include "synth.h"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic two-class audio corpus with a manifest"};
  std::string out;
  coughnet::testing::SynthOptions opts;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--clips", opts.clips, "number of clips");
  app.add_option("--positive-fraction", opts.positive_fraction);
  app.add_option("--verified-fraction", opts.verified_fraction, "share of positives marked verified");
  app.add_option("--sample-rate", opts.sample_rate);
  app.add_option("--seed", opts.seed);
  CLI11_PARSE(app, argc, argv);
  const auto records = coughnet::testing::write_synthetic_corpus(out, opts);
  std::cout << "wrote " << records.size() << " clips to " << out << "\n";
  return 0;
}
