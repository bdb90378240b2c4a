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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mktts::service {

inline constexpr std::string_view kReferenceCondition = "reference";
inline constexpr double kStimulusDbfs = -23.0;

std::string sha256_hex(std::string_view bytes);

struct MosItem {
  std::string stimulus_id;
  std::string condition;
  std::filesystem::path wav;
};

struct RatedSlot {
  std::string condition;
  std::filesystem::path wav;
};

// Either a prepared file or a low-pass copy of the page reference.
struct AnchorSpec {
  std::string condition;
  std::optional<std::filesystem::path> wav;
  std::optional<double> lowpass_hz;
};

struct StimulusSet {
  std::string page_id;
  std::filesystem::path reference;
  std::vector<RatedSlot> systems;
  std::vector<AnchorSpec> anchors;

  // systems + hidden reference + anchors
  std::size_t set_size() const { return systems.size() + 1 + anchors.size(); }
};

struct TestDefinition {
  std::string test_id;
  std::string instructions;
  std::optional<std::size_t> set_size;
  std::vector<MosItem> mos_pages;
  std::vector<StimulusSet> mushra_pages;
};

class DefinitionError : public std::runtime_error {
 public:
  explicit DefinitionError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Relative wav paths resolve against `base_dir`. Every problem found is
// collected before throwing.
TestDefinition parse_definition(const nlohmann::json& doc, const std::filesystem::path& base_dir);
TestDefinition load_definition(const std::filesystem::path& file);
nlohmann::json definition_to_json(const TestDefinition& def);

// Definition after audio preparation: every stimulus is named by the hash of
// its stored bytes.
struct StoredMosPage {
  std::string stimulus_id;
  std::string condition;
  std::string audio;
};

struct StoredSlot {
  std::string condition;
  std::string audio;
};

struct StoredMushraPage {
  std::string page_id;
  std::string reference_audio;
  std::vector<StoredSlot> rated;
};

struct StoredTest {
  std::string test_id;
  std::string digest;
  std::string instructions;
  std::vector<StoredMosPage> mos_pages;
  std::vector<StoredMushraPage> mushra_pages;

  std::size_t page_count() const { return mos_pages.size() + mushra_pages.size(); }
  nlohmann::json to_json() const;
  static StoredTest from_json(const nlohmann::json& doc);
};

struct PreparedAudio {
  std::string hash;
  std::string bytes;
};

struct PreparedTest {
  StoredTest test;
  std::vector<PreparedAudio> audio;
};

// Loads, loudness-normalizes and tags every stimulus. Identical content gives
// an identical digest regardless of where the files live.
PreparedTest prepare_test(const TestDefinition& def);

}  // namespace mktts::service
