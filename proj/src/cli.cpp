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

#include "coughnet/cli.h"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <csignal>
#include <deque>
#include <ctime>
#include <iostream>
#include <optional>

#include "coughnet/arch.h"
#include "coughnet/byteio.h"
#include "coughnet/cache.h"
#include "coughnet/checkpoint.h"
#include "coughnet/config.h"
#include "coughnet/dataset.h"
#include "coughnet/digest.h"
#include "coughnet/error.h"
#include "coughnet/explorer.h"
#include "coughnet/service.h"
#include "coughnet/trainer.h"

namespace coughnet {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Flags that override config keys when given.
struct Overrides {
  std::deque<std::pair<std::string, std::optional<std::string>>> items;  // CLI11 keeps pointers into it

  std::optional<std::string>& add(CLI::App* app, const std::string& flag, const std::string& key,
                                  const std::string& help) {
    items.emplace_back(key, std::nullopt);
    app->add_option(flag, items.back().second, help + " [" + key + "]");
    return items.back().second;
  }
  void apply(Config& config) const {
    for (const auto& [key, value] : items) {
      if (value) config.set(key, *value);
    }
  }
};

struct SplitChoice {
  Regime regime = Regime::kAllData;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::optional<fs::path> fixed_file;
};

SplitRatios parse_ratios(const std::string& text) {
  const auto fields = [&] {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        v.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw InvalidArgument("split ratios: `" + text + "` is not three comma-separated numbers");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return v;
  }();
  if (fields.size() != 3) throw InvalidArgument("split ratios need three values");
  return {fields[0], fields[1], fields[2]};
}

json to_json(const SplitChoice& s) {
  json j = {{"regime", to_string(s.regime)},
            {"seed", s.seed},
            {"ratios", {s.ratios.train, s.ratios.validation, s.ratios.test}}};
  if (s.fixed_file) {
    j["fixed_file"] = fs::absolute(*s.fixed_file).string();
    j["fixed_sha256"] = sha256_file(*s.fixed_file);
  } else {
    j["fixed_file"] = nullptr;
  }
  return j;
}

SplitChoice split_choice_from_json(const json& j) {
  SplitChoice s;
  s.regime = regime_from_string(j.at("regime").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  const auto r = j.at("ratios").get<std::vector<double>>();
  if (r.size() != 3) throw DataError("checkpoint split ratios need three values");
  s.ratios = {r[0], r[1], r[2]};
  if (j.contains("fixed_file") && !j["fixed_file"].is_null()) s.fixed_file = j["fixed_file"].get<std::string>();
  return s;
}

DatasetSplit resolve_split(const SplitChoice& choice, std::span<const SampleRecord> records) {
  DatasetSplit split = choice.fixed_file ? load_fixed_split(*choice.fixed_file, records, choice.regime)
                                         : make_split(records, choice.ratios, choice.seed, choice.regime);
  if (!choice.fixed_file) validate_partition(split, eligible_records(records, choice.regime));
  return split;
}

ArchitectureSpec resolve_arch(const std::string& name_or_path, const Config& config) {
  ArchitectureSpec spec;
  const auto& names = seed_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    spec = build_seed(name_or_path);
  } else if (fs::exists(name_or_path)) {
    try {
      spec = spec_from_json(json::parse(byteio::read_file(name_or_path)));
    } catch (const json::exception& e) {
      throw DataError(name_or_path + ": " + e.what());
    }
  } else {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown architecture `" + name_or_path + "` (seeds: " + known + ")");
  }
  spec.dropout_rate = config.get_double("model.dropout");
  validate(spec);
  return spec;
}

FeaturePipeline pipeline_from_config(const Config& config, bool low_break) {
  FeaturePipeline p;
  p.mel.mel_break_hz = low_break ? MelParams::low_break().mel_break_hz : config.get_double("mfcc.mel_break_hz");
  p.mel.normalize_area = config.get_bool("mfcc.normalize_area");
  p.validate();
  return p;
}

fs::path model_path(const std::optional<std::string>& flag, const Config& config) {
  if (flag) return *flag;
  const std::string p = config.get_string("model.path");
  if (p.empty()) throw InvalidArgument("no model given (use --model, CNA_MODEL or model.path)");
  return p;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void write_json(const fs::path& path, const json& j) { byteio::write_file(path, j.dump(2) + "\n"); }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json describe_json(const ArchitectureSpec& spec) {
  json layers = json::array();
  for (const auto& c : layer_costs(spec)) {
    layers.push_back({{"layer", c.label},
                      {"output", {c.output.h, c.output.w, c.output.c}},
                      {"params", c.params},
                      {"state", c.state},
                      {"flops", c.flops}});
  }
  return {{"arch", spec.name},
          {"spec", to_json(spec)},
          {"digest", spec_digest(spec)},
          {"params", count_params(spec)},
          {"state", count_state(spec)},
          {"flops", count_flops(spec)},
          {"layers", layers}};
}

void print_table(std::ostream& out, const ArchitectureSpec& spec) {
  out << spec.name << "  (input " << spec.input.height << "x" << spec.input.width << "x" << spec.input.channels
      << ", activation " << nn::to_string(spec.activation) << ", dropout " << spec.dropout_rate << ")\n";
  char line[160];
  std::snprintf(line, sizeof(line), "  %-34s %-16s %10s %14s\n", "layer", "output", "params", "flops");
  out << line;
  for (const auto& c : layer_costs(spec)) {
    const std::string shape =
        std::to_string(c.output.h) + "x" + std::to_string(c.output.w) + "x" + std::to_string(c.output.c);
    std::snprintf(line, sizeof(line), "  %-34s %-16s %10lld %14lld\n", c.label.c_str(), shape.c_str(),
                  static_cast<long long>(c.params), static_cast<long long>(c.flops));
    out << line;
  }
  std::snprintf(line, sizeof(line), "  %-34s %-16s %10lld %14lld\n", "total", "",
                static_cast<long long>(count_params(spec)), static_cast<long long>(count_flops(spec)));
  out << line;
  out << "  non-trainable state: " << count_state(spec) << "\n";
}

std::atomic<PredictionService*> g_service{nullptr};

void on_signal(int) {
  if (PredictionService* s = g_service.load()) s->stop();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("coughnet", sink);
  logger->set_pattern("[%l] %v");
  const auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct RestoreLogger {
    std::shared_ptr<spdlog::logger> prev;
    ~RestoreLogger() { spdlog::set_default_logger(prev); }
  } restore{previous};

  CLI::App app{"Cough-audio screening toolkit: features, seed CNNs, training, evaluation and serving", "coughnet"};
  app.require_subcommand(1);
  std::optional<std::string> config_file;
  std::string log_level = "info";
  app.add_option("--config", config_file, "key = value configuration file (default: $CNA_CONFIG)");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  // prepare
  Overrides prepare_ov;
  auto* prepare = app.add_subcommand("prepare", "Decode, augment and cache MFCC features for a manifest");
  std::string manifest_path, cache_out;
  std::optional<std::string> audio_root;
  std::uint64_t prepare_seed = 0;
  unsigned prepare_threads = 0;
  bool low_break = false;
  prepare->add_option("--manifest", manifest_path, "CSV with header path,label,verified")->required();
  prepare->add_option("--out", cache_out, "feature cache directory")->required();
  prepare->add_option("--audio-root", audio_root, "base for relative audio paths (default: manifest directory)");
  prepare->add_option("--seed", prepare_seed, "augmentation master seed");
  prepare->add_option("--threads", prepare_threads, "worker threads (0 = all cores)");
  prepare->add_flag("--low-mel-break", low_break, "use the 100 Hz mel break frequency");
  prepare_ov.add(prepare, "--copies", "aug.copies", "augmented copies per clip");
  prepare_ov.add(prepare, "--shift", "aug.shift_s", "maximum shift in seconds");
  prepare_ov.add(prepare, "--snr", "aug.snr_db", "noise SNR interval lo,hi or off");
  prepare_ov.add(prepare, "--pitch", "aug.pitch_semitones", "pitch interval lo,hi");
  prepare_ov.add(prepare, "--trim-db", "aug.trim_db", "trim threshold or off");

  // shared split options
  struct SplitFlags {
    std::string regime = "all-data";
    std::optional<std::string> split_file;
    Overrides ov;
  };
  const auto add_split = [](CLI::App* cmd, SplitFlags& s) {
    cmd->add_option("--regime", s.regime, "all-data or verified-only")
        ->check(CLI::IsMember({"all-data", "verified-only"}));
    cmd->add_option("--split-file", s.split_file, "fixed split CSV (path,subsplit)");
    s.ov.add(cmd, "--split-seed", "split.seed", "shuffle seed for the 60/20/20 split");
    s.ov.add(cmd, "--ratios", "split.ratios", "train,validation,test fractions");
  };
  const auto make_choice = [](const SplitFlags& s, const Config& config) {
    SplitChoice c;
    c.regime = regime_from_string(s.regime);
    c.seed = config.get_uint("split.seed");
    c.ratios = parse_ratios(config.get_string("split.ratios"));
    if (s.split_file) c.fixed_file = *s.split_file;
    return c;
  };

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a seed design on a cached split");
  SplitFlags train_split;
  Overrides train_ov;
  std::string train_cache, train_arch;
  std::optional<std::string> train_out, train_report_path;
  bool no_augment = false;
  train_cmd->add_option("--cache", train_cache, "feature cache directory")->required();
  train_cmd->add_option("--arch", train_arch, "seed name or architecture JSON file")->required();
  train_cmd->add_option("--out", train_out, "checkpoint path (default: <cache>/models/<arch>-<regime>-seed<N>.cna)");
  train_cmd->add_option("--report", train_report_path, "TrainReport JSON path (default: next to the checkpoint)");
  train_cmd->add_flag("--no-augment", no_augment, "train on original clips only");
  add_split(train_cmd, train_split);
  train_ov.add(train_cmd, "--seed", "train.seed", "initialization and shuffling seed");
  train_ov.add(train_cmd, "--epochs", "train.max_epochs", "maximum epochs");
  train_ov.add(train_cmd, "--batch-size", "train.batch_size", "mini-batch size");
  train_ov.add(train_cmd, "--lr", "train.initial_lr", "initial learning rate");
  train_ov.add(train_cmd, "--patience", "train.early_stop_patience", "early-stopping patience");
  train_ov.add(train_cmd, "--dropout", "model.dropout", "spatial-dropout rate");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a split with a trained checkpoint and report AUC");
  SplitFlags eval_split;
  std::optional<std::string> eval_model, eval_out, eval_scores, eval_regime_override;
  std::string eval_cache, eval_subsplit = "test";
  bool eval_filtered = false, eval_latency = false;
  eval_cmd->add_option("--model", eval_model, "checkpoint (default: model.path / CNA_MODEL)");
  eval_cmd->add_option("--cache", eval_cache, "feature cache directory")->required();
  eval_cmd->add_option("--subsplit", eval_subsplit, "train, validation or test")
      ->check(CLI::IsMember({"train", "validation", "test"}));
  eval_cmd->add_flag("--filtered", eval_filtered, "drop unverified positives from the scored set");
  eval_cmd->add_flag("--latency", eval_latency, "include the latency benchmark in the report");
  eval_cmd->add_option("--out", eval_out, "EvalReport JSON path");
  eval_cmd->add_option("--scores", eval_scores, "per-sample score CSV path");
  eval_cmd->add_option("--regime", eval_regime_override, "override the checkpoint's split regime")
      ->check(CLI::IsMember({"all-data", "verified-only"}));
  eval_cmd->add_option("--split-file", eval_split.split_file, "override the checkpoint's split with a fixed file");
  Overrides eval_ov;
  eval_ov.add(eval_cmd, "--passes", "bench.passes", "timed passes for --latency");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Latency benchmark: trimmed mean over timed single-input passes");
  std::vector<std::string> bench_arches;
  std::optional<std::string> bench_model, bench_out;
  bool bench_all = false;
  std::uint64_t bench_seed = 0;
  Overrides bench_ov;
  bench_cmd->add_option("--arch", bench_arches, "seed name or architecture JSON (repeatable)");
  bench_cmd->add_flag("--all", bench_all, "benchmark every seed design");
  bench_cmd->add_option("--model", bench_model, "benchmark a checkpoint");
  bench_cmd->add_option("--seed", bench_seed, "seed of the random input and weights");
  bench_cmd->add_option("--out", bench_out, "JSON output path");
  bench_ov.add(bench_cmd, "--passes", "bench.passes", "timed passes");
  bench_ov.add(bench_cmd, "--warmup", "bench.warmup", "untimed warm-up passes");
  bench_ov.add(bench_cmd, "--trim", "bench.trim", "fraction trimmed from each tail");

  // describe
  auto* describe_cmd = app.add_subcommand("describe", "Print layers, parameter and FLOP counts");
  std::vector<std::string> describe_arches;
  std::optional<std::string> describe_model;
  bool describe_all = false, describe_as_json = false;
  describe_cmd->add_option("--arch", describe_arches, "seed name or architecture JSON (repeatable)");
  describe_cmd->add_flag("--all", describe_all, "every seed design");
  describe_cmd->add_option("--model", describe_model, "describe a checkpoint's architecture");
  describe_cmd->add_flag("--json", describe_as_json, "JSON output");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Score one WAV file");
  std::string predict_wav;
  std::optional<std::string> predict_model;
  Overrides predict_ov;
  predict_cmd->add_option("wav", predict_wav, "WAV file")->required();
  predict_cmd->add_option("--model", predict_model, "checkpoint (default: model.path / CNA_MODEL)");
  predict_ov.add(predict_cmd, "--threshold", "serve.threshold", "recommendation threshold");

  // explore
  auto* explore_cmd = app.add_subcommand("explore", "Constrained perturbation search around a seed design");
  SplitFlags explore_split;
  Overrides explore_ov;
  std::string explore_cache, explore_arch;
  std::optional<std::string> explore_out;
  std::optional<std::int64_t> max_params, max_flops;
  std::uint64_t explore_seed = 0;
  explore_cmd->add_option("--cache", explore_cache, "feature cache directory")->required();
  explore_cmd->add_option("--arch", explore_arch, "seed name or architecture JSON file")->required();
  explore_cmd->add_option("--max-params", max_params, "parameter-count constraint");
  explore_cmd->add_option("--max-flops", max_flops, "FLOP constraint");
  explore_cmd->add_option("--seed", explore_seed, "search seed");
  explore_cmd->add_option("--out", explore_out, "search log JSON path");
  add_split(explore_cmd, explore_split);
  explore_ov.add(explore_cmd, "--candidates", "explore.max_candidates", "number of proposals");
  explore_ov.add(explore_cmd, "--epochs-cap", "explore.epochs_cap", "training epochs per candidate");
  explore_ov.add(explore_cmd, "--kappa", "explore.kappa", "AUC exponent");
  explore_ov.add(explore_cmd, "--beta", "explore.beta", "parameter exponent");
  explore_ov.add(explore_cmd, "--gamma", "explore.gamma", "FLOP exponent");
  explore_ov.add(explore_cmd, "--train-seed", "train.seed", "candidate training seed");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "HTTP prediction service");
  std::optional<std::string> serve_model;
  Overrides serve_ov;
  serve_cmd->add_option("--model", serve_model, "checkpoint (default: model.path / CNA_MODEL)");
  serve_ov.add(serve_cmd, "--host", "serve.host", "listen address");
  serve_ov.add(serve_cmd, "--port", "serve.port", "listen port");
  serve_ov.add(serve_cmd, "--threshold", "serve.threshold", "recommendation threshold");
  serve_ov.add(serve_cmd, "--models-dir", "serve.models_dir", "directory listed by /api/models");
  serve_ov.add(serve_cmd, "--audit-log", "serve.audit_log", "hash-only audit log path");
  serve_ov.add(serve_cmd, "--threads", "serve.threads", "worker threads");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kExitUsage;
  }
  logger->set_level(spdlog::level::from_str(log_level));

  try {
    Config config = Config::load(config_file ? std::optional<fs::path>(*config_file) : std::nullopt);

    if (prepare->parsed()) {
      prepare_ov.apply(config);
      const auto records = load_manifest(manifest_path);
      PrepareOptions opts;
      opts.pipeline = pipeline_from_config(config, low_break);
      opts.policy = config.augment_policy();
      opts.seed = prepare_seed;
      opts.threads = prepare_threads;
      const fs::path root = audio_root ? fs::path(*audio_root) : fs::path(manifest_path).parent_path();
      spdlog::info("preparing {} records with {} augmented copies each", records.size(), opts.policy.copies);
      const auto t0 = std::chrono::steady_clock::now();
      const FeatureCache cache = prepare_cache(records, root, cache_out, opts);
      const auto counts = count_classes(cache.records);
      emit(out, {{"cache", fs::absolute(cache_out).string()},
                 {"records", cache.records.size()},
                 {"positives", counts.positives},
                 {"verified", counts.verified},
                 {"features", cache.entries.size()},
                 {"dropped", cache.dropped},
                 {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}});
      return kExitOk;
    }

    if (train_cmd->parsed()) {
      train_ov.apply(config);
      train_split.ov.apply(config);
      const FeatureCache cache = open_cache(train_cache);
      const ArchitectureSpec spec = resolve_arch(train_arch, config);
      const SplitChoice choice = make_choice(train_split, config);
      const DatasetSplit split = resolve_split(choice, cache.records);
      const TrainConfig tc = config.train_config();
      const bool augmented = !no_augment;
      const auto train_set = LabeledFeatures::from(load_features(cache, split.train, augmented));
      const auto val_set = LabeledFeatures::from(load_features(cache, split.validation, false));
      spdlog::info("training {} on {} clips ({} records), validating on {}", spec.name, train_set.size(),
                   split.train.size(), val_set.size());
      TrainResult result = train(spec, train_set, val_set, tc, [](const EpochRecord& e) {
        spdlog::info("epoch {:3d}  train {:.5f}  val {:.5f}  lr {:.3g}{}  {:.1f}s", e.epoch, e.train_loss, e.val_loss,
                     e.learning_rate, e.improved ? "  *" : "", e.seconds);
      });
      const std::string model_id = spec.name + "-" + to_string(choice.regime) + "-seed" + std::to_string(tc.seed);
      const fs::path ckpt = train_out ? fs::path(*train_out) : fs::path(train_cache) / "models" / (model_id + ".cna");
      json report = to_json(result.report);
      report["regime"] = to_string(choice.regime);
      report["split"] = to_json(choice);
      report["augmented"] = augmented;
      const json meta = {{"model_id", model_id},
                         {"arch", spec.name},
                         {"created", utc_now()},
                         {"pipeline", to_json(cache.pipeline)},
                         {"split", to_json(choice)},
                         {"cache", fs::absolute(train_cache).string()},
                         {"train", {{"config", to_json(tc)},
                                    {"best_epoch", result.report.best_epoch},
                                    {"stop_epoch", result.report.stop_epoch},
                                    {"best_val_loss", result.report.best_val_loss},
                                    {"augmented", augmented}}}};
      save_checkpoint(ckpt, result.model, meta, &result.optimizer);
      report["checkpoint"] = fs::absolute(ckpt).string();
      report["checkpoint_sha256"] = sha256_file(ckpt);
      fs::path report_path = train_report_path ? fs::path(*train_report_path) : ckpt;
      if (!train_report_path) report_path.replace_extension(".train.json");
      write_json(report_path, report);
      emit(out, report);
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      eval_ov.apply(config);
      const fs::path mpath = model_path(eval_model, config);
      const LoadedCheckpoint ckpt = load_checkpoint(mpath);
      const FeatureCache cache = open_cache(eval_cache);
      if (ckpt.metadata.contains("pipeline") && pipeline_from_json(ckpt.metadata["pipeline"]) != cache.pipeline) {
        throw DataError("feature cache was built with a different pipeline than the checkpoint");
      }
      SplitChoice choice;
      if (ckpt.metadata.contains("split")) choice = split_choice_from_json(ckpt.metadata["split"]);
      if (eval_regime_override) choice.regime = regime_from_string(*eval_regime_override);
      if (eval_split.split_file) choice.fixed_file = *eval_split.split_file;
      const DatasetSplit split = resolve_split(choice, cache.records);
      EvalOptions opts;
      opts.filtered = eval_filtered;
      opts.split_name = eval_subsplit;
      opts.model_id = checkpoint_model_id(mpath, ckpt.metadata);
      EvalReport report = evaluate(ckpt.model, split.part(subsplit_from_string(eval_subsplit)), cache, opts);
      report.regime = to_string(choice.regime);
      if (eval_latency) {
        BenchmarkOptions b;
        b.passes = config.get_int("bench.passes");
        b.warmup = config.get_int("bench.warmup");
        b.trim_fraction = config.get_double("bench.trim");
        report.latency = benchmark_latency(ckpt.model, b);
      }
      json j = to_json(report);
      j["split_choice"] = to_json(choice);
      j["checkpoint_sha256"] = sha256_file(mpath);
      if (eval_scores) {
        byteio::write_file(*eval_scores, format_scores(report));
        j["scores"] = fs::absolute(*eval_scores).string();
      }
      if (eval_out) write_json(*eval_out, j);
      emit(out, j);
      return kExitOk;
    }

    if (bench_cmd->parsed()) {
      bench_ov.apply(config);
      BenchmarkOptions b;
      b.passes = config.get_int("bench.passes");
      b.warmup = config.get_int("bench.warmup");
      b.trim_fraction = config.get_double("bench.trim");
      b.seed = bench_seed;
      json results = json::array();
      const auto run = [&](const nn::Model<float>& model, const std::string& id) {
        spdlog::info("benchmarking {} ({} passes)", id, b.passes);
        const LatencyStats stats = benchmark_latency(model, b);
        results.push_back({{"model", id},
                           {"arch", model.spec().name},
                           {"params", count_params(model.spec())},
                           {"flops", count_flops(model.spec())},
                           {"latency", to_json(stats)}});
      };
      if (bench_model) {
        const LoadedCheckpoint ckpt = load_checkpoint(*bench_model);
        run(ckpt.model, checkpoint_model_id(*bench_model, ckpt.metadata));
      }
      std::vector<std::string> arches = bench_arches;
      if (bench_all) arches.insert(arches.end(), seed_names().begin(), seed_names().end());
      if (!bench_model && arches.empty()) throw InvalidArgument("bench: give --arch, --all or --model");
      for (const auto& a : arches) {
        const nn::Model<float> model(resolve_arch(a, config), bench_seed);
        run(model, a);
      }
      const json j = {{"passes", b.passes}, {"warmup", b.warmup}, {"trim_fraction", b.trim_fraction}, {"results", results}};
      if (bench_out) write_json(*bench_out, j);
      emit(out, j);
      return kExitOk;
    }

    if (describe_cmd->parsed()) {
      std::vector<ArchitectureSpec> specs;
      if (describe_model) specs.push_back(load_checkpoint(*describe_model).model.spec());
      for (const auto& a : describe_arches) specs.push_back(resolve_arch(a, config));
      if (describe_all) {
        for (const auto& n : seed_names()) specs.push_back(resolve_arch(n, config));
      }
      if (specs.empty()) throw InvalidArgument("describe: give --arch, --all or --model");
      if (describe_as_json) {
        json j = json::array();
        for (const auto& s : specs) j.push_back(describe_json(s));
        emit(out, specs.size() == 1 ? j[0] : j);
      } else {
        for (std::size_t i = 0; i < specs.size(); ++i) {
          if (i) out << '\n';
          print_table(out, specs[i]);
        }
      }
      return kExitOk;
    }

    if (predict_cmd->parsed()) {
      predict_ov.apply(config);
      const auto engine = PredictionEngine::from_file(model_path(predict_model, config),
                                                      config.get_double("serve.threshold"));
      const std::string bytes = byteio::read_file(predict_wav);
      json j = to_json(engine->predict_wav(bytes));
      j["file"] = predict_wav;
      emit(out, j);
      return kExitOk;
    }

    if (explore_cmd->parsed()) {
      explore_ov.apply(config);
      explore_split.ov.apply(config);
      const FeatureCache cache = open_cache(explore_cache);
      const ArchitectureSpec seed_spec = resolve_arch(explore_arch, config);
      const SplitChoice choice = make_choice(explore_split, config);
      const DatasetSplit split = resolve_split(choice, cache.records);
      const auto train_set = LabeledFeatures::from(load_features(cache, split.train, true));
      const auto val_set = LabeledFeatures::from(load_features(cache, split.validation, false));
      std::vector<int> val_labels = val_set.labels;
      SearchBudget budget;
      budget.max_candidates = config.get_int("explore.max_candidates");
      budget.epochs_cap = config.get_int("explore.epochs_cap");
      budget.max_params = max_params;
      budget.max_flops = max_flops;
      const ScoreCoefficients coeffs{config.get_double("explore.kappa"), config.get_double("explore.beta"),
                                     config.get_double("explore.gamma")};
      TrainConfig tc = config.train_config();
      const auto evaluator = [&](const ArchitectureSpec& spec, int cap) {
        TrainConfig c = tc;
        c.max_epochs = cap;
        const TrainResult r = train(spec, train_set, val_set, c);
        const double a = auc(score_features(r.model, val_set.features), val_labels);
        spdlog::info("candidate {}: params {} flops {} val auc {:.4f}", spec.name, count_params(spec),
                     count_flops(spec), a);
        return a;
      };
      const ExploreResult result = explore(seed_spec, budget, coeffs, explore_seed, evaluator);
      if (result.warning) spdlog::warn("{}", result.warning_message);
      json j = to_json(result);
      j["coefficients"] = {{"kappa", coeffs.kappa}, {"beta", coeffs.beta}, {"gamma", coeffs.gamma}};
      j["split"] = to_json(choice);
      if (explore_out) write_json(*explore_out, j);
      emit(out, j);
      return kExitOk;
    }

    if (serve_cmd->parsed()) {
      serve_ov.apply(config);
      ServiceOptions opts;
      opts.model_path = model_path(serve_model, config);
      opts.host = config.get_string("serve.host");
      opts.port = config.get_int("serve.port");
      opts.threshold = config.get_double("serve.threshold");
      opts.max_body_bytes = static_cast<std::size_t>(config.get_double("serve.max_body_mb") * (1 << 20));
      opts.cors_origin = config.get_string("serve.cors_origin");
      opts.threads = config.get_int("serve.threads");
      opts.audit_log = config.get_string("serve.audit_log");
      opts.models_dir = config.get_string("serve.models_dir");
      if (!fs::exists(opts.model_path)) throw DataError(opts.model_path.string() + ": no such file");
      PredictionService service(opts);
      const int port = service.bind();
      service.load_model_async();
      g_service.store(&service);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      spdlog::info("serving on http://{}:{}", opts.host, port);
      service.listen();
      g_service.store(nullptr);
      return kExitOk;
    }
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace coughnet
