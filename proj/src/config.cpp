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

#include "coughnet/config.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>

#include "coughnet/byteio.h"
#include "coughnet/error.h"

namespace coughnet {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw DataError("config: " + std::string(key) + " expects a number, got `" + s + "`");
  return v;
}

}  // namespace

const std::vector<Config::KeyInfo>& Config::keys() {
  static const std::vector<KeyInfo> kKeys = {
      {"aug.trim_db", "-40", "silence threshold for trimming in dBFS, or off"},
      {"aug.shift_s", "0.5", "maximum circular shift in seconds"},
      {"aug.snr_db", "10,30", "Gaussian-noise SNR interval in dB, or off"},
      {"aug.pitch_semitones", "-2,2", "pitch-shift interval in semitones"},
      {"aug.copies", "5", "augmented copies per training clip"},
      {"mfcc.mel_break_hz", "700", "break frequency of the mel scale"},
      {"mfcc.normalize_area", "false", "scale each mel filter to unit area"},
      {"train.initial_lr", "0.0002", "initial Adam learning rate"},
      {"train.lr_factor", "0.75", "plateau decay factor"},
      {"train.lr_patience", "2", "epochs without improvement before decay"},
      {"train.early_stop_patience", "10", "epochs without improvement before stopping"},
      {"train.max_epochs", "150", "epoch cap"},
      {"train.batch_size", "32", "mini-batch size"},
      {"train.min_lr", "0", "learning-rate floor"},
      {"train.seed", "0", "initialization and shuffling seed"},
      {"split.seed", "0", "dataset shuffle seed"},
      {"split.ratios", "0.6,0.2,0.2", "train,validation,test fractions"},
      {"model.path", "", "checkpoint used by predict and serve"},
      {"model.dropout", "0.2", "spatial-dropout rate"},
      {"bench.passes", "1000", "timed forward passes"},
      {"bench.warmup", "10", "untimed warm-up passes"},
      {"bench.trim", "0.05", "fraction trimmed from each tail"},
      {"explore.max_candidates", "20", "proposals per search"},
      {"explore.epochs_cap", "15", "training epochs per candidate"},
      {"explore.kappa", "2", "AUC exponent of the score"},
      {"explore.beta", "0.5", "parameter-count exponent of the score"},
      {"explore.gamma", "0.5", "FLOP exponent of the score"},
      {"serve.host", "127.0.0.1", "listen address"},
      {"serve.port", "8080", "listen port"},
      {"serve.threshold", "0.5", "probability at or above which signs are reported"},
      {"serve.max_body_mb", "10", "upload size limit in MiB"},
      {"serve.cors_origin", "*", "Access-Control-Allow-Origin value"},
      {"serve.threads", "4", "worker threads"},
      {"serve.audit_log", "", "append SHA-256 and result of each upload to this file; empty disables"},
      {"serve.models_dir", "", "directory listed by /api/models; defaults to the model's directory"},
  };
  return kKeys;
}

Config Config::parse(std::string_view text, std::string_view source) {
  Config c;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line = trim(text.substr(pos, (nl == std::string_view::npos ? text.size() : nl) - pos));
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError(std::string(source) + ": line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      c.assign(trim(line.substr(0, eq)), std::string(trim(line.substr(eq + 1))), "file");
    } catch (const DataError& e) {
      throw DataError(std::string(source) + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

Config Config::load(const std::optional<std::filesystem::path>& file) {
  std::optional<std::filesystem::path> path = file;
  if (!path) {
    if (const char* env = std::getenv("CNA_CONFIG"); env && *env) path = env;
  }
  Config c = path ? parse(byteio::read_file(*path), path->string()) : Config{};
  if (const char* model = std::getenv("CNA_MODEL"); model && *model) c.assign("model.path", model, "env");
  return c;
}

void Config::assign(std::string_view key, std::string value, std::string source) {
  const auto& k = keys();
  if (std::none_of(k.begin(), k.end(), [&](const KeyInfo& info) { return info.key == key; })) {
    throw DataError("unknown config key `" + std::string(key) + "`");
  }
  values_[std::string(key)] = {std::move(value), std::move(source)};
}

void Config::set(std::string_view key, std::string value) { assign(key, std::move(value), "flag"); }

const Config::Value* Config::find(std::string_view key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

bool Config::has(std::string_view key) const { return find(key) != nullptr; }

std::string Config::source(std::string_view key) const {
  const Value* v = find(key);
  return v ? v->source : "default";
}

std::string Config::get_string(std::string_view key) const {
  if (const Value* v = find(key)) return v->text;
  for (const auto& info : keys()) {
    if (info.key == key) return std::string(info.default_value);
  }
  throw InvalidArgument("unknown config key `" + std::string(key) + "`");
}

double Config::get_double(std::string_view key) const { return to_double(key, get_string(key)); }

int Config::get_int(std::string_view key) const {
  const std::string s = get_string(key);
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw DataError("config: " + std::string(key) + " expects an integer, got `" + s + "`");
  }
  return v;
}

std::uint64_t Config::get_uint(std::string_view key) const {
  const std::string s = get_string(key);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw DataError("config: " + std::string(key) + " expects a non-negative integer, got `" + s + "`");
  }
  return v;
}

bool Config::get_bool(std::string_view key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw DataError("config: " + std::string(key) + " expects a boolean, got `" + s + "`");
}

std::optional<Interval> Config::get_interval(std::string_view key) const {
  const std::string s = get_string(key);
  if (trim(s) == "off") return std::nullopt;
  const auto comma = s.find(',');
  if (comma == std::string::npos) {
    const double v = to_double(key, s);
    return Interval{v, v};
  }
  const Interval iv{to_double(key, std::string_view(s).substr(0, comma)),
                    to_double(key, std::string_view(s).substr(comma + 1))};
  if (iv.lo > iv.hi) throw DataError("config: " + std::string(key) + " interval is empty");
  return iv;
}

std::optional<double> Config::get_optional_double(std::string_view key) const {
  const std::string s = get_string(key);
  if (trim(s) == "off") return std::nullopt;
  return to_double(key, s);
}

AugmentPolicy Config::augment_policy() const {
  AugmentPolicy p;
  p.trim_db = get_optional_double("aug.trim_db");
  p.shift_s = get_double("aug.shift_s");
  p.snr_db = get_interval("aug.snr_db");
  const auto pitch = get_interval("aug.pitch_semitones");
  p.pitch_semitones = pitch.value_or(Interval{0.0, 0.0});
  p.copies = get_int("aug.copies");
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return p;
}

TrainConfig Config::train_config() const {
  TrainConfig t;
  t.initial_lr = get_double("train.initial_lr");
  t.lr_factor = get_double("train.lr_factor");
  t.lr_patience = get_int("train.lr_patience");
  t.early_stop_patience = get_int("train.early_stop_patience");
  t.max_epochs = get_int("train.max_epochs");
  t.batch_size = get_int("train.batch_size");
  t.min_lr = get_double("train.min_lr");
  t.seed = get_uint("train.seed");
  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return t;
}

}  // namespace coughnet
