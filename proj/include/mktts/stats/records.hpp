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

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mktts::stats {

enum class Scale { Mos, Mushra };

std::string_view scale_name(Scale s);
Scale parse_scale(std::string_view name);

// One listener's score for one stimulus on one page.
struct RatingRecord {
  std::string listener_id;
  std::string session_id;
  std::string page_id;
  std::string condition_id;
  std::string stimulus_id;
  Scale scale = Scale::Mos;
  double value = 0.0;

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MOS values must be integers 1..5, MUSHRA values lie in [0, 100].
bool valid_value(Scale scale, double value);
void validate(const RatingRecord& r);

// Newline-delimited JSON, one object per record with the RatingRecord field
// names; "scale" is "mos" or "mushra".
std::string to_json_line(const RatingRecord& r);
RatingRecord from_json_line(std::string_view line);
std::string write_jsonl(const std::vector<RatingRecord>& records);
std::vector<RatingRecord> read_jsonl(std::string_view text);

// CSV with the header
//   listener_id,session_id,page_id,condition_id,stimulus_id,scale,value
// Fields containing commas, quotes or newlines are double-quoted.
inline constexpr std::string_view kCsvHeader =
    "listener_id,session_id,page_id,condition_id,stimulus_id,scale,value";
std::string write_csv(const std::vector<RatingRecord>& records);
std::vector<RatingRecord> read_csv(std::string_view text);

// ".csv" selects CSV, anything else JSON lines.
std::vector<RatingRecord> load_records(const std::filesystem::path& path);
void save_records(const std::filesystem::path& path, const std::vector<RatingRecord>& records);

}  // namespace mktts::stats
