// Copyright 2026 The mktts Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mktts/dsp/wav.hpp"

#include <cmath>
#include <cstring>
#include <algorithm>
#include <fstream>
#include <sstream>

namespace mktts::dsp {
namespace {

std::uint32_t read_u32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t read_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

}  // namespace

WavAudio decode_wav(std::string_view b) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") {
    throw WavError("not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  while (pos + 8 <= b.size()) {
    const std::string_view id = b.substr(pos, 4);
    const std::uint32_t size = read_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size() && id != "data") throw WavError("truncated chunk");
    if (id == "fmt ") {
      if (size < 16) throw WavError("short fmt chunk");
      const std::uint16_t format = read_u16(b, body);
      channels = read_u16(b, body + 2);
      rate = read_u32(b, body + 4);
      bits = read_u16(b, body + 14);
      // WAVE_FORMAT_EXTENSIBLE carries the real format in its sub-format GUID.
      const bool pcm = format == 1 || (format == 0xFFFE && size >= 26 && read_u16(b, body + 24) == 1);
      if (!pcm || bits != 16) throw WavError("only 16-bit PCM is supported");
      if (channels == 0 || rate == 0) throw WavError("bad fmt chunk");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw WavError("data chunk before fmt chunk");
      const std::size_t avail = std::min<std::size_t>(size, b.size() - body);
      const std::size_t frames = avail / (2u * channels);
      WavAudio audio;
      audio.sample_rate = rate;
      audio.samples.resize(static_cast<Eigen::Index>(frames));
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          const auto v = static_cast<std::int16_t>(read_u16(b, body + 2 * (f * channels + c)));
          acc += static_cast<double>(v) / 32768.0;
        }
        audio.samples(static_cast<Eigen::Index>(f)) = acc / channels;
      }
      return audio;
    }
    pos = body + size + (size & 1u);
  }
  throw WavError("no data chunk");
}

WavAudio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return decode_wav(ss.str());
  } catch (const WavError& e) {
    throw WavError(path.string() + ": " + e.what());
  }
}

std::string encode_wav(const WavAudio& audio, std::string_view extra_chunk_id,
                       std::string_view extra_chunk_payload) {
  const auto n = static_cast<std::uint32_t>(audio.samples.size());
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));
  std::string extra;
  if (!extra_chunk_id.empty()) {
    if (extra_chunk_id.size() != 4) throw WavError("chunk id must have four characters");
    extra.append(extra_chunk_id);
    put_u32(extra, static_cast<std::uint32_t>(extra_chunk_payload.size()));
    extra.append(extra_chunk_payload);
    if (extra_chunk_payload.size() % 2 != 0) extra.push_back('\0');
  }
  std::string out;
  out.reserve(44 + 2 * n + extra.size());
  out += "RIFF";
  put_u32(out, 36 + 2 * n + static_cast<std::uint32_t>(extra.size()));
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, 2 * n);
  for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
    const double scaled = std::round(audio.samples(i) * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  out += extra;
  return out;
}

void write_wav(const std::filesystem::path& path, const WavAudio& audio) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WavError("cannot write " + path.string());
  const std::string bytes = encode_wav(audio);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw WavError("write failed for " + path.string());
}

double rms(const Signal<double>& x) {
  if (x.size() == 0) return 0.0;
  return std::sqrt(x.square().mean());
}

Signal<double> normalize_rms(const Signal<double>& x, double target_dbfs) {
  const double current = rms(x);
  if (current == 0.0) return x;
  return x * (std::pow(10.0, target_dbfs / 20.0) / current);
}

}  // namespace mktts::dsp
