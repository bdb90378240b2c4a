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

#include "mktts/service/service.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace mktts::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view error_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Invalid: return "invalid";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::OutOfOrder: return "out_of_order";
    case ErrorKind::AlreadyRated: return "already_rated";
    case ErrorKind::Done: return "done";
  }
  return "error";
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string random_id(std::string_view prefix) {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}() ^
                             (static_cast<std::uint64_t>(std::random_device{}()) << 32)};
  std::lock_guard lock(m);
  return std::string(prefix) + hex64(rng()) + hex64(rng()).substr(0, 8);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& p, std::string_view bytes) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

bool is_hash(std::string_view s) {
  return s.size() == 64 && s.find_first_not_of("0123456789abcdef") == std::string_view::npos;
}

json audio_ref(const std::string& hash) { return "/audio/" + hash + ".wav"; }

}  // namespace

std::vector<SessionPage> plan_session(const StoredTest& test, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> mos(test.mos_pages.size());
  std::vector<std::size_t> mushra(test.mushra_pages.size());
  for (std::size_t i = 0; i < mos.size(); ++i) mos[i] = i;
  for (std::size_t i = 0; i < mushra.size(); ++i) mushra[i] = i;
  seeded_shuffle(mos, rng);
  seeded_shuffle(mushra, rng);

  std::vector<SessionPage> pages;
  for (std::size_t i : mos) pages.push_back({false, i, {0}, {}});
  for (std::size_t i : mushra) {
    SessionPage p{true, i, {}, {}};
    p.order.resize(test.mushra_pages[i].rated.size());
    for (std::size_t k = 0; k < p.order.size(); ++k) p.order[k] = k;
    seeded_shuffle(p.order, rng);
    pages.push_back(std::move(p));
  }
  for (auto& p : pages) {
    std::set<std::string> seen;
    for (std::size_t k = 0; k < p.order.size(); ++k) {
      std::string h;
      do h = "s" + hex64(rng()).substr(0, 12); while (!seen.insert(h).second);
      p.handles.push_back(h);
    }
  }
  return pages;
}

Service::Service(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "audio");
  fs::create_directories(root_ / "tests");
  load_existing();
}

fs::path Service::test_dir(const std::string& test_id) const { return root_ / "tests" / test_id; }

void Service::load_existing() {
  for (const auto& dir : fs::directory_iterator(root_ / "tests")) {
    const fs::path def = dir.path() / "test.json";
    if (!fs::is_regular_file(def)) continue;
    auto entry = std::make_shared<TestEntry>();
    entry->test = StoredTest::from_json(json::parse(read_file(def)));
    const std::string id = entry->test.test_id;
    tests_[id] = entry;

    std::map<std::string, std::set<std::string>> rated_pages;
    const fs::path log = dir.path() / "ratings.jsonl";
    if (fs::exists(log)) {
      for (const auto& r : stats::read_jsonl(read_file(log))) {
        rated_pages[r.session_id].insert(r.page_id);
      }
    }
    const fs::path snap = dir.path() / "sessions.json";
    if (!fs::exists(snap)) continue;
    for (const auto& s : json::parse(read_file(snap))) {
      auto se = std::make_shared<SessionEntry>();
      auto& st = se->state;
      st.session_id = s.at("session_id").get<std::string>();
      st.listener_id = s.at("listener_id").get<std::string>();
      st.listener_name = s.value("listener_name", "");
      st.test_id = id;
      st.seed = s.at("seed").get<std::uint64_t>();
      st.pages = plan_session(entry->test, st.seed);
      // The log is authoritative for progress; pages are rated strictly in order.
      st.progress = rated_pages[st.session_id].size();
      sessions_[st.session_id] = se;
    }
  }
}

void Service::write_snapshot(TestEntry& entry) {
  json arr = json::array();
  {
    std::shared_lock lock(mutex_);
    for (const auto& [id, se] : sessions_) {
      if (se->state.test_id != entry.test.test_id) continue;
      arr.push_back({{"session_id", id},
                     {"listener_id", se->state.listener_id},
                     {"listener_name", se->state.listener_name},
                     {"seed", se->state.seed}});
    }
  }
  write_atomic(test_dir(entry.test.test_id) / "sessions.json", arr.dump(1) + "\n");
}

std::shared_ptr<Service::TestEntry> Service::find_test(const std::string& test_id) const {
  std::shared_lock lock(mutex_);
  auto it = tests_.find(test_id);
  if (it == tests_.end()) throw ServiceError(ErrorKind::NotFound, "unknown test " + test_id);
  return it->second;
}

std::shared_ptr<Service::SessionEntry> Service::find_session(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError(ErrorKind::NotFound, "unknown session " + session_id);
  return it->second;
}

CreateResult Service::create_test(const TestDefinition& def) {
  PreparedTest prepared = prepare_test(def);
  std::lock_guard create(create_mutex_);
  const std::string id = prepared.test.test_id;
  {
    std::shared_lock lock(mutex_);
    auto it = tests_.find(id);
    if (it != tests_.end()) {
      if (it->second->test.digest == prepared.test.digest) return {id, false};
      throw ServiceError(ErrorKind::Conflict, "test " + id + " exists with different content");
    }
  }
  for (const auto& a : prepared.audio) {
    const fs::path p = root_ / "audio" / (a.hash + ".wav");
    if (!fs::exists(p)) write_atomic(p, a.bytes);
  }
  fs::create_directories(test_dir(id));
  write_atomic(test_dir(id) / "test.json", prepared.test.to_json().dump(1) + "\n");
  auto entry = std::make_shared<TestEntry>();
  entry->test = std::move(prepared.test);
  std::unique_lock lock(mutex_);
  tests_[id] = entry;
  return {id, true};
}

CreateResult Service::create_test(const json& doc, const fs::path& base_dir) {
  return create_test(parse_definition(doc, base_dir));
}

SessionState Service::start_session(const std::string& test_id, const std::string& listener_name,
                                    std::optional<std::uint64_t> seed) {
  auto entry = find_test(test_id);
  auto se = std::make_shared<SessionEntry>();
  auto& st = se->state;
  st.session_id = random_id("x");
  st.listener_id = random_id("l");
  st.listener_name = listener_name;
  st.test_id = test_id;
  st.seed = seed ? *seed : (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^
                               std::random_device{}();
  st.pages = plan_session(entry->test, st.seed);
  {
    std::unique_lock lock(mutex_);
    sessions_[st.session_id] = se;
  }
  std::lock_guard snap(entry->snapshot_mutex);
  write_snapshot(*entry);
  return st;
}

json Service::next_page(const std::string& session_id) {
  auto se = find_session(session_id);
  std::lock_guard lock(se->mutex);
  const auto& st = se->state;
  if (st.completed()) return {{"type", "done"}, {"page_count", st.pages.size()}};

  auto entry = find_test(st.test_id);
  const StoredTest& t = entry->test;
  const SessionPage& p = st.pages[st.progress];
  json out{{"page", st.progress}, {"page_count", st.pages.size()}};
  json stimuli = json::array();
  if (!p.mushra) {
    const auto& m = t.mos_pages[p.index];
    out["type"] = "mos";
    out["scale"] = {{"min", 1}, {"max", 5}};
    stimuli.push_back({{"handle", p.handles[0]}, {"url", audio_ref(m.audio)}});
  } else {
    const auto& m = t.mushra_pages[p.index];
    out["type"] = "mushra";
    out["scale"] = {{"min", 0}, {"max", 100}};
    out["reference"] = {{"label", "reference"}, {"url", audio_ref(m.reference_audio)}};
    for (std::size_t k = 0; k < p.order.size(); ++k) {
      stimuli.push_back({{"handle", p.handles[k]}, {"url", audio_ref(m.rated[p.order[k]].audio)}});
    }
  }
  out["stimuli"] = stimuli;
  if (st.progress == 0) out["instructions"] = t.instructions;
  return out;
}

json Service::submit_rating(const std::string& session_id, std::size_t page, const json& body) {
  auto se = find_session(session_id);
  std::lock_guard lock(se->mutex);
  auto& st = se->state;
  if (page < st.progress) {
    throw ServiceError(ErrorKind::AlreadyRated, "page " + std::to_string(page) + " already rated");
  }
  if (st.completed()) throw ServiceError(ErrorKind::Done, "session complete");
  if (page != st.progress) {
    throw ServiceError(ErrorKind::OutOfOrder, "current page is " + std::to_string(st.progress));
  }
  if (!body.is_object() || !body.contains("ratings") || !body["ratings"].is_object()) {
    throw ServiceError(ErrorKind::Invalid, "body must be {\"ratings\": {handle: value}}");
  }
  const json& ratings = body["ratings"];
  auto entry = find_test(st.test_id);
  const StoredTest& t = entry->test;
  const SessionPage& p = st.pages[page];
  const stats::Scale scale = p.mushra ? stats::Scale::Mushra : stats::Scale::Mos;

  for (const auto& [handle, _] : ratings.items()) {
    bool known = false;
    for (const auto& h : p.handles) known = known || h == handle;
    if (!known) throw ServiceError(ErrorKind::Invalid, "unknown handle " + handle);
  }
  std::vector<stats::RatingRecord> records;
  for (std::size_t k = 0; k < p.handles.size(); ++k) {
    const std::string& h = p.handles[k];
    if (!ratings.contains(h)) throw ServiceError(ErrorKind::Invalid, "missing rating for " + h);
    if (!ratings[h].is_number()) throw ServiceError(ErrorKind::Invalid, "rating must be a number");
    const double v = ratings[h].get<double>();
    if (!stats::valid_value(scale, v)) {
      throw ServiceError(ErrorKind::Invalid, "rating out of range for " + h);
    }
    stats::RatingRecord r;
    r.listener_id = st.listener_id;
    r.session_id = st.session_id;
    r.scale = scale;
    r.value = v;
    if (!p.mushra) {
      const auto& m = t.mos_pages[p.index];
      r.page_id = m.stimulus_id;
      r.condition_id = m.condition;
      r.stimulus_id = m.stimulus_id;
    } else {
      const auto& m = t.mushra_pages[p.index];
      r.page_id = m.page_id;
      r.condition_id = m.rated[p.order[k]].condition;
      r.stimulus_id = m.page_id + "/" + r.condition_id;
    }
    records.push_back(std::move(r));
  }

  {
    std::lock_guard log_lock(entry->log_mutex);
    std::ofstream out(test_dir(t.test_id) / "ratings.jsonl", std::ios::binary | std::ios::app);
    const std::string block = stats::write_jsonl(records);
    out.write(block.data(), static_cast<std::streamsize>(block.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot append to rating log");
  }
  ++st.progress;
  return {{"accepted", records.size()}, {"progress", st.progress}, {"done", st.completed()}};
}

std::string Service::export_jsonl(const std::string& test_id) const {
  auto entry = find_test(test_id);
  std::lock_guard log_lock(entry->log_mutex);
  const fs::path log = test_dir(test_id) / "ratings.jsonl";
  return fs::exists(log) ? read_file(log) : std::string{};
}

std::vector<stats::RatingRecord> Service::export_records(const std::string& test_id) const {
  return stats::read_jsonl(export_jsonl(test_id));
}

std::optional<fs::path> Service::audio_path(const std::string& hash) const {
  if (!is_hash(hash)) return std::nullopt;
  fs::path p = root_ / "audio" / (hash + ".wav");
  if (!fs::is_regular_file(p)) return std::nullopt;
  return p;
}

std::vector<std::string> Service::test_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : tests_) out.push_back(id);
  return out;
}

std::optional<StoredTest> Service::test(const std::string& test_id) const {
  std::shared_lock lock(mutex_);
  auto it = tests_.find(test_id);
  if (it == tests_.end()) return std::nullopt;
  return it->second->test;
}

std::optional<SessionState> Service::session(const std::string& session_id) const {
  std::shared_ptr<SessionEntry> se;
  {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    se = it->second;
  }
  std::lock_guard lock(se->mutex);
  return se->state;
}

}  // namespace mktts::service
