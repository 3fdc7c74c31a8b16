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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coughnet/audio.h"
#include "coughnet/schedule.h"

namespace coughnet {

// Settings from a `key = value` file, environment overrides and command-line
// flags, with flags > environment > file > built-in defaults. Lines starting
// with '#' are comments. Unknown keys are rejected.
class Config {
 public:
  struct KeyInfo {
    std::string_view key;
    std::string_view default_value;
    std::string_view help;
  };
  static const std::vector<KeyInfo>& keys();

  // Reads `file` when given, else the file named by CNA_CONFIG when set; then
  // applies CNA_MODEL as model.path.
  static Config load(const std::optional<std::filesystem::path>& file = std::nullopt);
  static Config parse(std::string_view text, std::string_view source = "config");

  // Overrides one key (used for command-line flags).
  void set(std::string_view key, std::string value);
  bool has(std::string_view key) const;
  // Source of the effective value: "default", "file", "env" or "flag".
  std::string source(std::string_view key) const;

  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  int get_int(std::string_view key) const;
  std::uint64_t get_uint(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  // "lo,hi", a single value for a point interval, or "off".
  std::optional<Interval> get_interval(std::string_view key) const;
  // A number or "off".
  std::optional<double> get_optional_double(std::string_view key) const;

  AugmentPolicy augment_policy() const;
  TrainConfig train_config() const;

 private:
  struct Value {
    std::string text;
    std::string source;
  };
  void assign(std::string_view key, std::string value, std::string source);
  const Value* find(std::string_view key) const;

  std::map<std::string, Value, std::less<>> values_;
};

}  // namespace coughnet
