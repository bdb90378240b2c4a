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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mktts/service/definition.hpp"
#include "mktts/stats/records.hpp"

namespace mktts::service {

enum class ErrorKind { NotFound, Invalid, Conflict, OutOfOrder, AlreadyRated, Done };

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

std::string_view error_code(ErrorKind kind);

struct CreateResult {
  std::string test_id;
  bool created = false;
};

struct SessionPage {
  bool mushra = false;
  std::size_t index = 0;             // into the test's mos_pages or mushra_pages
  std::vector<std::size_t> order;    // presented position -> rated slot
  std::vector<std::string> handles;  // presented position -> opaque handle
};

struct SessionState {
  std::string session_id;
  std::string listener_id;
  std::string listener_name;
  std::string test_id;
  std::uint64_t seed = 0;
  std::vector<SessionPage> pages;
  std::size_t progress = 0;

  bool completed() const { return progress >= pages.size(); }
};

// MOS pages in shuffled order, then MUSHRA pages in shuffled order; rated
// slots of every MUSHRA page shuffled; one opaque handle per presented item.
std::vector<SessionPage> plan_session(const StoredTest& test, std::uint64_t seed);

// Fisher-Yates driven by mt19937_64, swap index = draw mod (i + 1).
template <class Rng>
void seeded_shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

// State lives under `root`:
//   audio/<sha256>.wav          content-addressed stimuli
//   tests/<id>/test.json        prepared definition
//   tests/<id>/ratings.jsonl    append-only rating log
//   tests/<id>/sessions.json    session snapshot
class Service {
 public:
  explicit Service(std::filesystem::path root);

  CreateResult create_test(const TestDefinition& def);
  CreateResult create_test(const nlohmann::json& doc, const std::filesystem::path& base_dir);

  SessionState start_session(const std::string& test_id, const std::string& listener_name,
                             std::optional<std::uint64_t> seed = std::nullopt);

  nlohmann::json next_page(const std::string& session_id);
  nlohmann::json submit_rating(const std::string& session_id, std::size_t page,
                               const nlohmann::json& body);

  std::vector<stats::RatingRecord> export_records(const std::string& test_id) const;
  std::string export_jsonl(const std::string& test_id) const;

  std::optional<std::filesystem::path> audio_path(const std::string& hash) const;
  std::vector<std::string> test_ids() const;
  std::optional<StoredTest> test(const std::string& test_id) const;
  std::optional<SessionState> session(const std::string& session_id) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  struct TestEntry {
    StoredTest test;
    std::mutex log_mutex;
    std::mutex snapshot_mutex;
  };
  struct SessionEntry {
    SessionState state;
    std::mutex mutex;
  };

  void load_existing();
  void write_snapshot(TestEntry& entry);
  std::filesystem::path test_dir(const std::string& test_id) const;
  std::shared_ptr<TestEntry> find_test(const std::string& test_id) const;
  std::shared_ptr<SessionEntry> find_session(const std::string& session_id) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<TestEntry>> tests_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
  std::mutex create_mutex_;
};

}  // namespace mktts::service
