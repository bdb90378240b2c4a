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

#include "mktts/dsp/spectrogram_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace mktts::dsp {
namespace {

constexpr std::string_view kMagic = "MKSG";
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 48;

static_assert(std::endian::native == std::endian::little,
              "spectrogram container I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view b, std::size_t at) {
  T v;
  std::memcpy(&v, b.data() + at, sizeof(T));
  return v;
}

std::uint32_t window_code(WindowKind w) {
  switch (w) {
    case WindowKind::Hann: return 0;
    case WindowKind::Hamming: return 1;
    case WindowKind::Rectangular: return 2;
  }
  return 0;
}

WindowKind window_from_code(std::uint32_t c) {
  switch (c) {
    case 0: return WindowKind::Hann;
    case 1: return WindowKind::Hamming;
    case 2: return WindowKind::Rectangular;
    default: throw SpectrogramFormatError("unknown window code " + std::to_string(c));
  }
}

void check_shape(const StoredSpectrogram& s) {
  if (s.kind == SpectrogramKind::LogMel) {
    if (static_cast<std::size_t>(s.data.cols()) != s.mel.n_mels) {
      throw SpectrogramFormatError("column count does not match n_mels");
    }
  } else if (static_cast<std::size_t>(s.data.cols()) != s.params.bins()) {
    throw SpectrogramFormatError("column count does not match fft_size / 2 + 1");
  }
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpectrogramFormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

MelSpectrogram<double> StoredSpectrogram::as_mel() const {
  if (kind != SpectrogramKind::LogMel) throw SpectrogramFormatError("not a log-mel spectrogram");
  return {data, mel, params};
}

MagnitudeSpectrogram<double> StoredSpectrogram::as_magnitude() const {
  if (kind != SpectrogramKind::Magnitude) {
    throw SpectrogramFormatError("not a magnitude spectrogram");
  }
  return {data, params};
}

StoredSpectrogram StoredSpectrogram::from(const MelSpectrogram<double>& m) {
  return {SpectrogramKind::LogMel, m.data, m.params, m.mel};
}

StoredSpectrogram StoredSpectrogram::from(const MagnitudeSpectrogram<double>& m) {
  return {SpectrogramKind::Magnitude, m.data, m.params, MelParams{0, 0.0, 0.0}};
}

std::string encode_spectrogram(const StoredSpectrogram& s) {
  check_shape(s);
  std::string out;
  out.reserve(kHeaderSize + static_cast<std::size_t>(s.data.size()) * 4);
  out += kMagic;
  put<std::uint16_t>(out, kVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(s.kind));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.data.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.data.cols()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(std::lround(s.params.sample_rate)));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.params.fft_size));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.params.win_size));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.params.hop));
  put<std::uint32_t>(out, window_code(s.params.window));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(
                              s.kind == SpectrogramKind::LogMel ? s.mel.n_mels : 0));
  put<float>(out, static_cast<float>(s.mel.fmin));
  put<float>(out, static_cast<float>(s.mel.fmax));
  for (Eigen::Index r = 0; r < s.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.data.cols(); ++c) put<float>(out, static_cast<float>(s.data(r, c)));
  }
  return out;
}

StoredSpectrogram decode_spectrogram(std::string_view b) {
  if (b.size() < kHeaderSize || b.substr(0, 4) != kMagic) {
    throw SpectrogramFormatError("missing MKSG header");
  }
  if (get<std::uint16_t>(b, 4) != kVersion) throw SpectrogramFormatError("unsupported version");
  StoredSpectrogram s;
  const auto kind = get<std::uint16_t>(b, 6);
  if (kind > 1) throw SpectrogramFormatError("unknown spectrogram kind");
  s.kind = static_cast<SpectrogramKind>(kind);
  const auto rows = get<std::uint32_t>(b, 8);
  const auto cols = get<std::uint32_t>(b, 12);
  s.params.sample_rate = get<std::uint32_t>(b, 16);
  s.params.fft_size = get<std::uint32_t>(b, 20);
  s.params.win_size = get<std::uint32_t>(b, 24);
  s.params.hop = get<std::uint32_t>(b, 28);
  s.params.window = window_from_code(get<std::uint32_t>(b, 32));
  s.mel.n_mels = get<std::uint32_t>(b, 36);
  s.mel.fmin = get<float>(b, 40);
  s.mel.fmax = get<float>(b, 44);
  const std::size_t need = kHeaderSize + static_cast<std::size_t>(rows) * cols * 4;
  if (b.size() != need) throw SpectrogramFormatError("payload size does not match shape");
  s.data.resize(rows, cols);
  std::size_t at = kHeaderSize;
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c, at += 4) s.data(r, c) = get<float>(b, at);
  }
  try {
    s.params.validate();
  } catch (const DspError& e) {
    throw SpectrogramFormatError(e.what());
  }
  check_shape(s);
  return s;
}

std::string encode_spectrogram_csv(const StoredSpectrogram& s) {
  check_shape(s);
  std::ostringstream out;
  out.precision(9);
  out << "# kind=" << (s.kind == SpectrogramKind::LogMel ? "logmel" : "magnitude")
      << " sample_rate=" << std::lround(s.params.sample_rate) << " fft_size=" << s.params.fft_size
      << " win_size=" << s.params.win_size << " hop=" << s.params.hop
      << " window=" << window_name(s.params.window)
      << " n_mels=" << (s.kind == SpectrogramKind::LogMel ? s.mel.n_mels : 0)
      << " fmin=" << s.mel.fmin << " fmax=" << s.mel.fmax << "\n";
  for (Eigen::Index r = 0; r < s.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.data.cols(); ++c) {
      if (c > 0) out << ',';
      out << static_cast<float>(s.data(r, c));
    }
    out << '\n';
  }
  return out.str();
}

StoredSpectrogram decode_spectrogram_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("# ")) {
    throw SpectrogramFormatError("CSV spectrogram needs a '# key=value' header line");
  }
  std::map<std::string, std::string> kv;
  std::istringstream hs(line.substr(2));
  std::string item;
  while (hs >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw SpectrogramFormatError("bad header item '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto field = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw SpectrogramFormatError("header lacks '" + key + "'");
    return it->second;
  };
  StoredSpectrogram s;
  try {
    const std::string& kind = field("kind");
    if (kind == "logmel") {
      s.kind = SpectrogramKind::LogMel;
    } else if (kind == "magnitude") {
      s.kind = SpectrogramKind::Magnitude;
    } else {
      throw SpectrogramFormatError("unknown kind '" + kind + "'");
    }
    s.params.sample_rate = std::stod(field("sample_rate"));
    s.params.fft_size = std::stoul(field("fft_size"));
    s.params.win_size = std::stoul(field("win_size"));
    s.params.hop = std::stoul(field("hop"));
    s.params.window = parse_window(field("window"));
    s.mel.n_mels = std::stoul(field("n_mels"));
    s.mel.fmin = std::stod(field("fmin"));
    s.mel.fmax = std::stod(field("fmax"));
  } catch (const std::invalid_argument& e) {
    throw SpectrogramFormatError(std::string("bad header value: ") + e.what());
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const auto comma = line.find(',', start);
      const std::string cell = line.substr(start, comma - start);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw SpectrogramFormatError("bad number '" + cell + "'");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw SpectrogramFormatError("ragged CSV rows");
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  s.data.resize(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      s.data(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
  }
  if (rows.empty()) {
    s.data.resize(0, static_cast<Eigen::Index>(s.kind == SpectrogramKind::LogMel
                                                   ? s.mel.n_mels
                                                   : s.params.bins()));
  }
  try {
    s.params.validate();
  } catch (const DspError& e) {
    throw SpectrogramFormatError(e.what());
  }
  check_shape(s);
  return s;
}

void write_spectrogram(const std::filesystem::path& path, const StoredSpectrogram& s) {
  const std::string bytes =
      path.extension() == ".csv" ? encode_spectrogram_csv(s) : encode_spectrogram(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SpectrogramFormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

StoredSpectrogram read_spectrogram(const std::filesystem::path& path) {
  const std::string bytes = read_all(path);
  return path.extension() == ".csv" ? decode_spectrogram_csv(bytes) : decode_spectrogram(bytes);
}

}  // namespace mktts::dsp
