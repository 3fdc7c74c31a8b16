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

#include "coughnet/checkpoint.h"

#include <map>

#include "coughnet/byteio.h"
#include "coughnet/error.h"

namespace coughnet {

namespace {

using nlohmann::json;
using nn::Index;
using nn::Shape;
using nn::Tensor;

void append_tensor(std::string& blob, json& directory, const std::string& name, const char* role,
                   const Tensor<float>& t) {
  const auto& s = t.shape();
  directory.push_back({{"name", name},
                       {"role", role},
                       {"shape", {s.n, s.h, s.w, s.c}},
                       {"offset", blob.size()},
                       {"count", t.size()}});
  for (Index i = 0; i < t.size(); ++i) byteio::put_le<float>(blob, t[i]);
}

struct Entry {
  Shape shape;
  std::size_t offset = 0;
};

Tensor<float> read_tensor(std::string_view data, const Entry& e) {
  Tensor<float> t(e.shape);
  const auto bytes = static_cast<std::size_t>(t.size()) * sizeof(float);
  if (e.offset > data.size() || bytes > data.size() - e.offset) throw DataError("checkpoint: tensor data truncated");
  for (Index i = 0; i < t.size(); ++i) {
    t[i] = byteio::get_le<float>(data, e.offset + static_cast<std::size_t>(i) * sizeof(float));
  }
  return t;
}

std::pair<json, std::string_view> split(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != kCheckpointMagic) throw DataError("checkpoint: bad magic");
  const auto header_len = byteio::get_le<std::uint32_t>(bytes, 4);
  if (header_len > bytes.size() - 8) throw DataError("checkpoint: header truncated");
  json header;
  try {
    header = json::parse(bytes.substr(8, header_len));
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: malformed header: ") + e.what());
  }
  if (!header.is_object() || header.value("format", "") != kCheckpointMagic) {
    throw DataError("checkpoint: header is not a CNA1 directory");
  }
  return {std::move(header), bytes.substr(8 + header_len)};
}

}  // namespace

std::string encode_checkpoint(nn::Model<float>& model, const json& metadata, const nn::Adam<float>* optimizer) {
  std::string blob;
  json directory = json::array();
  const auto params = model.params();
  for (const auto& p : params) append_tensor(blob, directory, p.name, "param", *p.value);
  for (const auto& s : model.state()) append_tensor(blob, directory, s.name, "state", *s.value);

  json header = {{"format", kCheckpointMagic},
                 {"version", 1},
                 {"precision", "float32"},
                 {"spec", to_json(model.spec())},
                 {"spec_digest", spec_digest(model.spec())},
                 {"metadata", metadata}};
  if (optimizer && optimizer->steps() > 0) {
    const auto& m = optimizer->first_moments();
    const auto& v = optimizer->second_moments();
    if (m.size() != params.size() || v.size() != params.size()) {
      throw InvalidArgument("checkpoint: optimizer moments do not match the model");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      append_tensor(blob, directory, params[i].name, "adam_m", m[i]);
      append_tensor(blob, directory, params[i].name, "adam_v", v[i]);
    }
    header["optimizer"] = {{"steps", optimizer->steps()}, {"learning_rate", optimizer->learning_rate()}};
  }
  header["tensors"] = std::move(directory);
  header["data_bytes"] = blob.size();

  const std::string text = header.dump();
  std::string out(kCheckpointMagic);
  byteio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  out += blob;
  return out;
}

json read_checkpoint_header(std::string_view bytes) { return split(bytes).first; }

LoadedCheckpoint decode_checkpoint(std::string_view bytes) {
  auto [header, data] = split(bytes);
  try {
    if (header.at("version") != 1) throw DataError("checkpoint: unsupported version");
    if (header.at("precision") != "float32") throw DataError("checkpoint: unsupported precision");
    if (header.at("data_bytes").get<std::size_t>() != data.size()) throw DataError("checkpoint: data size mismatch");
    ArchitectureSpec spec = spec_from_json(header.at("spec"));
    if (header.at("spec_digest") != spec_digest(spec)) throw DataError("checkpoint: spec digest mismatch");

    std::map<std::pair<std::string, std::string>, Entry> entries;
    for (const auto& t : header.at("tensors")) {
      const auto dims = t.at("shape").get<std::vector<Index>>();
      if (dims.size() != 4) throw DataError("checkpoint: tensor shape must have 4 dims");
      Entry e{{dims[0], dims[1], dims[2], dims[3]}, t.at("offset").get<std::size_t>()};
      if (e.shape.size() != t.at("count").get<Index>()) throw DataError("checkpoint: tensor count mismatch");
      const auto key = std::make_pair(t.at("role").get<std::string>(), t.at("name").get<std::string>());
      if (!entries.emplace(key, e).second) throw DataError("checkpoint: duplicate tensor " + key.second);
    }

    LoadedCheckpoint out{nn::Model<float>(spec), header.value("metadata", json::object()), std::nullopt};
    const auto take = [&](const std::string& role, const std::string& name, const Shape& want) {
      const auto it = entries.find({role, name});
      if (it == entries.end()) throw DataError("checkpoint: missing " + role + " tensor " + name);
      if (!(it->second.shape == want)) {
        throw DataError("checkpoint: " + name + " has shape " + it->second.shape.str() + ", model expects " +
                        want.str());
      }
      Tensor<float> t = read_tensor(data, it->second);
      entries.erase(it);
      return t;
    };

    const auto params = out.model.params();
    for (const auto& p : params) *p.value = take("param", p.name, p.value->shape());
    for (const auto& s : out.model.state()) *s.value = take("state", s.name, s.value->shape());
    if (header.contains("optimizer")) {
      OptimizerState opt;
      opt.steps = header["optimizer"].at("steps").get<std::int64_t>();
      opt.learning_rate = header["optimizer"].at("learning_rate").get<double>();
      for (const auto& p : params) {
        opt.first_moments.push_back(take("adam_m", p.name, p.value->shape()));
        opt.second_moments.push_back(take("adam_v", p.name, p.value->shape()));
      }
      out.optimizer = std::move(opt);
    }
    if (!entries.empty()) throw DataError("checkpoint: unexpected tensor " + entries.begin()->first.second);
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: malformed header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("checkpoint: invalid architecture: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, nn::Model<float>& model, const json& metadata,
                     const nn::Adam<float>* optimizer) {
  byteio::write_file(path, encode_checkpoint(model, metadata, optimizer));
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = byteio::read_file(path);
  try {
    return decode_checkpoint(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void restore_optimizer(nn::Adam<float>& adam, const OptimizerState& state) {
  adam.set_learning_rate(state.learning_rate);
  adam.restore(state.steps, state.first_moments, state.second_moments);
}

}  // namespace coughnet
