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

#include <cmath>

#include "coughnet/audio.h"
#include "coughnet/byteio.h"

namespace coughnet {

namespace {

using byteio::get_le;
using byteio::put_le;

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

double read_sample(std::string_view data, std::size_t at, int bits, bool is_float) {
  if (is_float) {
    return bits == 32 ? static_cast<double>(get_le<float>(data, at)) : get_le<double>(data, at);
  }
  switch (bits) {
    case 8: return (static_cast<double>(static_cast<unsigned char>(data[at])) - 128.0) / 128.0;
    case 16: return get_le<std::int16_t>(data, at) / 32768.0;
    case 24: {
      const auto b0 = static_cast<std::uint32_t>(static_cast<unsigned char>(data[at]));
      const auto b1 = static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + 1]));
      const auto b2 = static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + 2]));
      std::int32_t v = static_cast<std::int32_t>((b0 << 8) | (b1 << 16) | (b2 << 24)) >> 8;
      return v / 8388608.0;
    }
    case 32: return get_le<std::int32_t>(data, at) / 2147483648.0;
  }
  throw DataError("wav: unsupported bit depth");
}

}  // namespace

DecodedWav decode_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    throw DataError("not a RIFF/WAVE stream");
  }
  DecodedWav out;
  bool have_fmt = false;
  std::uint16_t format = 0;
  std::string_view data;
  bool have_data = false;
  std::size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(at, 4);
    const std::size_t size = get_le<std::uint32_t>(bytes, at + 4);
    const std::size_t body = at + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (id == "fmt ") {
      if (avail < 16) throw DataError("wav: truncated fmt chunk");
      format = get_le<std::uint16_t>(bytes, body);
      out.info.channels = get_le<std::uint16_t>(bytes, body + 2);
      out.info.sample_rate = static_cast<int>(get_le<std::uint32_t>(bytes, body + 4));
      out.info.bits_per_sample = get_le<std::uint16_t>(bytes, body + 14);
      if (format == kFormatExtensible) {
        if (avail < 26) throw DataError("wav: truncated extensible fmt chunk");
        format = get_le<std::uint16_t>(bytes, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.substr(body, avail);
      have_data = true;
      break;
    }
    at = body + size + (size & 1u);
  }
  if (!have_fmt) throw DataError("wav: missing fmt chunk");
  if (!have_data) throw DataError("wav: missing data chunk");
  const int bits = out.info.bits_per_sample;
  if (format == kFormatFloat) {
    if (bits != 32 && bits != 64) throw DataError("wav: unsupported float bit depth");
    out.info.is_float = true;
  } else if (format == kFormatPcm) {
    if (bits != 8 && bits != 16 && bits != 24 && bits != 32) throw DataError("wav: unsupported PCM bit depth");
  } else {
    throw DataError("wav: unsupported encoding " + std::to_string(format));
  }
  if (out.info.channels < 1) throw DataError("wav: no channels");
  if (out.info.sample_rate < 1) throw DataError("wav: invalid sample rate");
  const std::size_t frame_bytes = static_cast<std::size_t>(bits / 8) * out.info.channels;
  out.info.frames = data.size() / frame_bytes;
  if (out.info.frames == 0) throw EmptyAudioError("wav: stream contains no samples");
  const std::size_t count = out.info.frames * out.info.channels;
  out.interleaved.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = read_sample(data, i * (bits / 8), bits, out.info.is_float);
    if (!std::isfinite(v)) throw DataError("wav: non-finite sample");
    out.interleaved[i] = v;
  }
  return out;
}

AudioClip to_mono(const DecodedWav& wav) {
  const auto frames = static_cast<Eigen::Index>(wav.info.frames);
  const int ch = wav.info.channels;
  AudioClip clip;
  clip.sample_rate = wav.info.sample_rate;
  clip.samples.resize(frames);
  for (Eigen::Index f = 0; f < frames; ++f) {
    double sum = 0;
    for (int c = 0; c < ch; ++c) sum += wav.interleaved[static_cast<std::size_t>(f * ch + c)];
    clip.samples[f] = std::clamp(sum / ch, -1.0, 1.0);
  }
  return clip;
}

std::string encode_wav(std::span<const double> interleaved, int channels, int sample_rate, SampleFormat format) {
  int bits = 16;
  std::uint16_t tag = kFormatPcm;
  switch (format) {
    case SampleFormat::kInt8: bits = 8; break;
    case SampleFormat::kInt16: bits = 16; break;
    case SampleFormat::kInt24: bits = 24; break;
    case SampleFormat::kInt32: bits = 32; break;
    case SampleFormat::kFloat32: bits = 32; tag = kFormatFloat; break;
  }
  const std::size_t data_bytes = interleaved.size() * static_cast<std::size_t>(bits / 8);
  std::string out = "RIFF";
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(36 + data_bytes));
  out += "WAVEfmt ";
  put_le<std::uint32_t>(out, 16);
  put_le<std::uint16_t>(out, tag);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate * channels * bits / 8));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels * bits / 8));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(bits));
  out += "data";
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(data_bytes));
  out.reserve(out.size() + data_bytes);
  for (double v : interleaved) {
    const double x = std::clamp(v, -1.0, 1.0);
    switch (format) {
      case SampleFormat::kInt8:
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(x * 127.0) + 128)));
        break;
      case SampleFormat::kInt16:
        put_le<std::int16_t>(out, static_cast<std::int16_t>(std::lround(x * 32767.0)));
        break;
      case SampleFormat::kInt24: {
        const auto v24 = static_cast<std::int32_t>(std::lround(x * 8388607.0));
        out.push_back(static_cast<char>(v24 & 0xff));
        out.push_back(static_cast<char>((v24 >> 8) & 0xff));
        out.push_back(static_cast<char>((v24 >> 16) & 0xff));
        break;
      }
      case SampleFormat::kInt32:
        put_le<std::int32_t>(out, static_cast<std::int32_t>(std::llround(x * 2147483647.0)));
        break;
      case SampleFormat::kFloat32:
        put_le<float>(out, static_cast<float>(x));
        break;
    }
  }
  return out;
}

std::string encode_wav(const AudioClip& clip, SampleFormat format) {
  return encode_wav(clip.view(), 1, static_cast<int>(std::lround(clip.sample_rate)), format);
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, SampleFormat format) {
  byteio::write_file(path, encode_wav(clip, format));
}

}  // namespace coughnet
