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

#include "mktts/stats/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mktts::stats {
namespace {

std::string format_value(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Splits CSV text into records of fields; handles quoted fields with
// embedded separators and doubled quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (quoted) throw RecordError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RecordError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view scale_name(Scale s) { return s == Scale::Mos ? "mos" : "mushra"; }

Scale parse_scale(std::string_view name) {
  if (name == "mos") return Scale::Mos;
  if (name == "mushra") return Scale::Mushra;
  throw RecordError("unknown scale '" + std::string(name) + "'");
}

bool valid_value(Scale scale, double value) {
  if (!std::isfinite(value)) return false;
  if (scale == Scale::Mos) return value >= 1.0 && value <= 5.0 && value == std::floor(value);
  return value >= 0.0 && value <= 100.0;
}

void validate(const RatingRecord& r) {
  if (!valid_value(r.scale, r.value)) {
    throw RecordError("value " + format_value(r.value) + " is outside the " +
                      std::string(scale_name(r.scale)) + " scale");
  }
}

std::string to_json_line(const RatingRecord& r) {
  // Key order is fixed so exports are byte-stable.
  nlohmann::ordered_json j;
  j["listener_id"] = r.listener_id;
  j["session_id"] = r.session_id;
  j["page_id"] = r.page_id;
  j["condition_id"] = r.condition_id;
  j["stimulus_id"] = r.stimulus_id;
  j["scale"] = scale_name(r.scale);
  j["value"] = r.value;
  return j.dump();
}

RatingRecord from_json_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    RatingRecord r;
    r.listener_id = j.at("listener_id").get<std::string>();
    r.session_id = j.at("session_id").get<std::string>();
    r.page_id = j.at("page_id").get<std::string>();
    r.condition_id = j.at("condition_id").get<std::string>();
    r.stimulus_id = j.at("stimulus_id").get<std::string>();
    r.scale = parse_scale(j.at("scale").get<std::string>());
    r.value = j.at("value").get<double>();
    validate(r);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw RecordError(std::string("bad rating record: ") + e.what());
  }
}

std::string write_jsonl(const std::vector<RatingRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json_line(r);
    out.push_back('\n');
  }
  return out;
}

std::vector<RatingRecord> read_jsonl(std::string_view text) {
  std::vector<RatingRecord> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(from_json_line(line));
    } catch (const RecordError& e) {
      throw RecordError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string write_csv(const std::vector<RatingRecord>& records) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const auto& r : records) {
    out += csv_field(r.listener_id) + ',' + csv_field(r.session_id) + ',' +
           csv_field(r.page_id) + ',' + csv_field(r.condition_id) + ',' +
           csv_field(r.stimulus_id) + ',' + std::string(scale_name(r.scale)) + ',' +
           format_value(r.value) + '\n';
  }
  return out;
}

std::vector<RatingRecord> read_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) return {};
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    if (i > 0) header.push_back(',');
    header += rows[0][i];
  }
  if (header != kCsvHeader) throw RecordError("unexpected CSV header '" + header + "'");
  std::vector<RatingRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 7) {
      throw RecordError("CSV row " + std::to_string(i + 1) + ": expected 7 fields");
    }
    RatingRecord r{f[0], f[1], f[2], f[3], f[4], parse_scale(f[5]), 0.0};
    const auto [ptr, ec] = std::from_chars(f[6].data(), f[6].data() + f[6].size(), r.value);
    if (ec != std::errc() || ptr != f[6].data() + f[6].size()) {
      throw RecordError("CSV row " + std::to_string(i + 1) + ": bad value '" + f[6] + "'");
    }
    validate(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RatingRecord> load_records(const std::filesystem::path& path) {
  const std::string text = read_all(path);
  return path.extension() == ".csv" ? read_csv(text) : read_jsonl(text);
}

void save_records(const std::filesystem::path& path, const std::vector<RatingRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RecordError("cannot write " + path.string());
  const std::string text = path.extension() == ".csv" ? write_csv(records) : write_jsonl(records);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace mktts::stats
