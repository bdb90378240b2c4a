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

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "gtest/gtest.h"
#include "mktts/dsp/wav.hpp"
#include "mktts/service/service.hpp"
#include "mktts/stats/mos.hpp"
#include "mktts/stats/mushra.hpp"
#include "study_layout.hpp"

namespace mktts::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    base_ = fs::temp_directory_path() /
            ("mktts_service_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(base_);
    def_ = test::write_study_layout(base_ / "stimuli", 4000);
  }
  void TearDown() override { fs::remove_all(base_); }

  fs::path store() const { return base_ / "store"; }
  fs::path stim() const { return base_ / "stimuli"; }

  // Rates every page; MOS values cycle 1..5, MUSHRA values are distinct per
  // handle so the mapping back to conditions can be checked.
  static std::size_t complete(Service& svc, const std::string& session) {
    std::size_t pages = 0;
    for (;;) {
      const json page = svc.next_page(session);
      if (page["type"] == "done") break;
      json ratings = json::object();
      int k = 0;
      for (const auto& s : page["stimuli"]) {
        ratings[s["handle"].get<std::string>()] =
            page["type"] == "mos" ? 1 + static_cast<int>(pages % 5) : 10 * ++k;
      }
      svc.submit_rating(session, page["page"].get<std::size_t>(), {{"ratings", ratings}});
      ++pages;
    }
    return pages;
  }

  fs::path base_;
  json def_;
};

TEST_F(ServiceTest, StudyLayoutIsAccepted) {
  const auto def = parse_definition(def_, stim());
  EXPECT_EQ(def.mos_pages.size(), 50u);
  ASSERT_EQ(def.mushra_pages.size(), 10u);
  for (const auto& s : def.mushra_pages) EXPECT_EQ(s.set_size(), 6u);

  Service svc(store());
  const auto r = svc.create_test(def);
  EXPECT_TRUE(r.created);
  EXPECT_EQ(r.test_id, "study");
  const auto t = svc.test("study");
  ASSERT_TRUE(t);
  EXPECT_EQ(t->mos_pages.size(), 50u);
  ASSERT_EQ(t->mushra_pages.size(), 10u);
  for (const auto& p : t->mushra_pages) {
    ASSERT_EQ(p.rated.size(), 6u);
    std::set<std::string> conds;
    for (const auto& s : p.rated) conds.insert(s.condition);
    EXPECT_TRUE(conds.contains("reference"));
    EXPECT_TRUE(conds.contains("anchor35"));
  }
}

TEST_F(ServiceTest, MissingFilesAreAllNamed) {
  def_["mos"][3]["wav"] = "wav/nope1.wav";
  def_["mushra"][2]["stimuli"][1]["wav"] = "wav/nope2.wav";
  def_["mushra"][5]["page_id"] = 7;
  try {
    parse_definition(def_, stim());
    FAIL();
  } catch (const DefinitionError& e) {
    ASSERT_EQ(e.problems().size(), 3u);
    EXPECT_NE(e.problems()[0].find("nope1.wav"), std::string::npos);
    EXPECT_NE(e.problems()[1].find("nope2.wav"), std::string::npos);
    EXPECT_NE(e.problems()[2].find("mushra[5]"), std::string::npos);
  }
}

TEST_F(ServiceTest, EmptyAndMalformedDefinitions) {
  EXPECT_THROW(parse_definition(json::object(), stim()), DefinitionError);
  EXPECT_THROW(parse_definition(json::array(), stim()), DefinitionError);
  EXPECT_THROW(parse_definition(json{{"mos", json::array()}, {"mushra", json::array()}}, stim()),
               DefinitionError);
  json bad = def_;
  bad["mushra"][0]["stimuli"][0]["condition"] = "reference";
  EXPECT_THROW(parse_definition(bad, stim()), DefinitionError);
  bad = def_;
  bad["mushra"][0]["anchors"][0]["wav"] = "wav/ref0.wav";
  EXPECT_THROW(parse_definition(bad, stim()), DefinitionError);
  bad = def_;
  bad["mos"][1]["stimulus_id"] = bad["mos"][0]["stimulus_id"];
  EXPECT_THROW(parse_definition(bad, stim()), DefinitionError);
}

TEST_F(ServiceTest, SetSizeIsEnforced) {
  def_["mushra"][4]["stimuli"].erase(0);
  try {
    parse_definition(def_, stim());
    FAIL();
  } catch (const DefinitionError& e) {
    ASSERT_EQ(e.problems().size(), 1u);
    EXPECT_NE(e.problems()[0].find("expected 6"), std::string::npos);
  }
  def_.erase("set_size");
  EXPECT_NO_THROW(parse_definition(def_, stim()));
}

TEST_F(ServiceTest, CreateIsIdempotentAndDetectsConflicts) {
  Service svc(store());
  EXPECT_TRUE(svc.create_test(def_, stim()).created);
  EXPECT_FALSE(svc.create_test(def_, stim()).created);
  json changed = def_;
  changed["instructions"] = "different";
  try {
    svc.create_test(changed, stim());
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Conflict);
  }
  changed.erase("test_id");
  const auto r = svc.create_test(changed, stim());
  EXPECT_TRUE(r.created);
  EXPECT_EQ(r.test_id.size(), 13u);
}

TEST_F(ServiceTest, AudioIsContentAddressedAndNormalized) {
  Service svc(store());
  svc.create_test(def_, stim());
  const auto t = *svc.test("study");
  std::set<std::string> hashes;
  for (const auto& p : t.mushra_pages) {
    hashes.insert(p.reference_audio);
    for (const auto& s : p.rated) {
      hashes.insert(s.audio);
      // The hidden copy must not share a URL with the labeled reference.
      EXPECT_NE(s.audio, p.reference_audio);
    }
  }
  for (const auto& h : hashes) {
    const auto path = svc.audio_path(h);
    ASSERT_TRUE(path);
    std::ifstream in(*path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(sha256_hex(bytes), h);
    const auto audio = dsp::decode_wav(bytes);
    EXPECT_NEAR(20.0 * std::log10(dsp::rms(audio.samples)), kStimulusDbfs, 0.05);
  }
  EXPECT_FALSE(svc.audio_path("../../etc/passwd"));
  EXPECT_FALSE(svc.audio_path(std::string(64, 'a')));
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(ServiceTest, SessionPlanMatchesFisherYatesOracle) {
  Service svc(store());
  svc.create_test(def_, stim());
  const auto t = *svc.test("study");
  const auto plan = plan_session(t, 1234);

  // Independent reimplementation of the documented shuffle.
  std::mt19937_64 rng(1234);
  auto shuffle = [&](std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
    return v;
  };
  const auto mos = shuffle(50);
  const auto mushra = shuffle(10);
  ASSERT_EQ(plan.size(), 60u);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_FALSE(plan[i].mushra);
    EXPECT_EQ(plan[i].index, mos[i]);
  }
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_TRUE(plan[50 + i].mushra);
    EXPECT_EQ(plan[50 + i].index, mushra[i]);
    EXPECT_EQ(plan[50 + i].order, shuffle(6));
  }
}

TEST_F(ServiceTest, SeedsControlPermutations) {
  Service svc(store());
  svc.create_test(def_, stim());
  const auto a = svc.start_session("study", "ann", 1);
  const auto b = svc.start_session("study", "bob", 1);
  const auto c = svc.start_session("study", "cat", 2);
  EXPECT_NE(a.session_id, b.session_id);
  EXPECT_NE(a.listener_id, b.listener_id);
  auto indices = [](const SessionState& s) {
    std::vector<std::size_t> v;
    for (const auto& p : s.pages) {
      v.push_back(p.index);
      v.insert(v.end(), p.order.begin(), p.order.end());
    }
    return v;
  };
  EXPECT_EQ(indices(a), indices(b));
  EXPECT_NE(indices(a), indices(c));
  for (const auto& p : c.pages) {
    std::vector<std::size_t> sorted = p.order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) EXPECT_EQ(sorted[k], k);
    EXPECT_EQ(std::set<std::string>(p.handles.begin(), p.handles.end()).size(), p.handles.size());
  }
  try {
    svc.start_session("nope", "x");
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFound);
  }
}

TEST_F(ServiceTest, PayloadsAreBlind) {
  Service svc(store());
  svc.create_test(def_, stim());
  const auto s = svc.start_session("study", "ann", 5);
  std::set<std::string> secret{"tacotron2", "fastpitch", "glowtts", "rhvoice", "natural", "anchor35"};
  const auto t = *svc.test("study");
  for (const auto& p : t.mos_pages) secret.insert(p.stimulus_id);
  std::size_t pages = 0;
  for (;;) {
    const json page = svc.next_page(s.session_id);
    if (page["type"] == "done") break;
    const std::string dump = page.dump();
    for (const auto& word : secret) EXPECT_EQ(dump.find(word), std::string::npos) << word;
    for (const auto& st : page["stimuli"]) EXPECT_EQ(st.size(), 2u);
    if (page["type"] == "mos") {
      EXPECT_EQ(page["stimuli"].size(), 1u);
      EXPECT_EQ(page["scale"]["max"], 5);
    } else {
      EXPECT_EQ(page["stimuli"].size(), 6u);
      EXPECT_EQ(page["reference"]["label"], "reference");
      for (const auto& st : page["stimuli"]) EXPECT_NE(st["url"], page["reference"]["url"]);
    }
    json ratings;
    for (const auto& st : page["stimuli"]) ratings[st["handle"].get<std::string>()] = 3;
    svc.submit_rating(s.session_id, pages++, {{"ratings", ratings}});
  }
  EXPECT_EQ(pages, 60u);
}

TEST_F(ServiceTest, SubmissionRules) {
  Service svc(store());
  svc.create_test(def_, stim());
  const auto s = svc.start_session("study", "ann", 9);
  auto kind_of = [&](std::size_t page, const json& body) {
    try {
      svc.submit_rating(s.session_id, page, body);
    } catch (const ServiceError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "accepted";
    return ErrorKind::Done;
  };
  json page = svc.next_page(s.session_id);
  const std::string h = page["stimuli"][0]["handle"];
  EXPECT_EQ(kind_of(1, {{"ratings", {{h, 3}}}}), ErrorKind::OutOfOrder);
  EXPECT_EQ(kind_of(0, {{"ratings", {{h, 6}}}}), ErrorKind::Invalid);
  EXPECT_EQ(kind_of(0, {{"ratings", {{h, 2.5}}}}), ErrorKind::Invalid);
  EXPECT_EQ(kind_of(0, {{"ratings", {{"bogus", 3}}}}), ErrorKind::Invalid);
  EXPECT_EQ(kind_of(0, {{"ratings", json::object()}}), ErrorKind::Invalid);
  EXPECT_EQ(kind_of(0, {{"score", 3}}), ErrorKind::Invalid);
  EXPECT_EQ(svc.session(s.session_id)->progress, 0u);

  const json ack = svc.submit_rating(s.session_id, 0, {{"ratings", {{h, 3}}}});
  EXPECT_EQ(ack["accepted"], 1);
  EXPECT_EQ(ack["progress"], 1);
  EXPECT_EQ(kind_of(0, {{"ratings", {{h, 3}}}}), ErrorKind::AlreadyRated);

  // Skip ahead to the first MUSHRA page.
  for (std::size_t p = 1; p < 50; ++p) {
    page = svc.next_page(s.session_id);
    svc.submit_rating(s.session_id, p, {{"ratings", {{page["stimuli"][0]["handle"], 4}}}});
  }
  page = svc.next_page(s.session_id);
  ASSERT_EQ(page["type"], "mushra");
  json partial = json::object();
  for (std::size_t k = 0; k + 1 < page["stimuli"].size(); ++k) {
    partial[page["stimuli"][k]["handle"].get<std::string>()] = 50;
  }
  EXPECT_EQ(kind_of(50, {{"ratings", partial}}), ErrorKind::Invalid);
  EXPECT_EQ(svc.session(s.session_id)->progress, 50u);
  partial[page["stimuli"][5]["handle"].get<std::string>()] = 100.5;
  EXPECT_EQ(kind_of(50, {{"ratings", partial}}), ErrorKind::Invalid);
  partial[page["stimuli"][5]["handle"].get<std::string>()] = 99.5;
  EXPECT_NO_THROW(svc.submit_rating(s.session_id, 50, {{"ratings", partial}}));

  try {
    svc.next_page("unknown");
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFound);
  }
}

TEST_F(ServiceTest, HandlesMapBackToConditions) {
  Service svc(store());
  svc.create_test(def_, stim());
  const auto t = *svc.test("study");
  const auto s = svc.start_session("study", "ann", 77);
  // Find which audio each handle points at, then check the stored condition
  // agrees with the definition for that audio.
  std::map<std::string, std::string> audio_condition;
  for (const auto& p : t.mushra_pages) {
    for (const auto& r : p.rated) audio_condition[r.audio] = r.condition;
  }
  for (const auto& p : t.mos_pages) audio_condition[p.audio] = p.condition;
  std::map<std::pair<std::string, double>, std::string> expected;  // (page, value) -> condition
  for (std::size_t n = 0;; ++n) {
    const json page = svc.next_page(s.session_id);
    if (page["type"] == "done") break;
    json ratings;
    int k = 0;
    for (const auto& st : page["stimuli"]) {
      const std::string url = st["url"];
      const std::string hash = url.substr(7, 64);
      const double v = page["type"] == "mos" ? 3 : 10.0 * ++k;
      ratings[st["handle"].get<std::string>()] = v;
      expected[{std::to_string(n), v}] = audio_condition.at(hash);
    }
    svc.submit_rating(s.session_id, n, {{"ratings", ratings}});
  }
  const auto records = svc.export_records("study");
  ASSERT_EQ(records.size(), 110u);
  std::map<std::string, std::size_t> page_index;
  for (const auto& r : records) page_index.emplace(r.page_id, page_index.size());
  for (const auto& r : records) {
    EXPECT_EQ(expected.at({std::to_string(page_index[r.page_id]), r.value}), r.condition_id);
  }
}

TEST_F(ServiceTest, ExportCountsStabilityAndRestart) {
  std::string first_export;
  std::string session_id;
  {
    Service svc(store());
    svc.create_test(def_, stim());
    EXPECT_EQ(svc.export_jsonl("study"), "");
    const auto a = svc.start_session("study", "ann", 3);
    EXPECT_EQ(complete(svc, a.session_id), 60u);
    const auto records = svc.export_records("study");
    std::size_t mos = 0, mushra = 0;
    for (const auto& r : records) (r.scale == stats::Scale::Mos ? mos : mushra)++;
    EXPECT_EQ(mos, 50u);
    EXPECT_EQ(mushra, 60u);
    first_export = svc.export_jsonl("study");
    EXPECT_EQ(svc.export_jsonl("study"), first_export);

    // Leave a second session half-way.
    const auto b = svc.start_session("study", "bob", 4);
    session_id = b.session_id;
    for (std::size_t p = 0; p < 10; ++p) {
      const json page = svc.next_page(b.session_id);
      svc.submit_rating(b.session_id, p, {{"ratings", {{page["stimuli"][0]["handle"], 5}}}});
    }
    EXPECT_THROW(svc.export_jsonl("missing"), ServiceError);
  }
  Service again(store());
  EXPECT_EQ(again.test_ids(), std::vector<std::string>{"study"});
  const auto resumed = again.session(session_id);
  ASSERT_TRUE(resumed);
  EXPECT_EQ(resumed->progress, 10u);
  EXPECT_EQ(again.next_page(session_id)["page"], 10);
  EXPECT_EQ(complete(again, session_id), 50u);
  const auto all = again.export_records("study");
  EXPECT_EQ(all.size(), 220u);
  EXPECT_EQ(again.export_jsonl("study").substr(0, first_export.size()), first_export);
  EXPECT_FALSE(again.create_test(def_, stim()).created);
}

TEST_F(ServiceTest, ExportFeedsStatistics) {
  Service svc(store());
  svc.create_test(def_, stim());
  for (int l = 0; l < 3; ++l) {
    complete(svc, svc.start_session("study", "l" + std::to_string(l), l).session_id);
  }
  std::vector<stats::RatingRecord> mos, mushra;
  for (const auto& r : svc.export_records("study")) {
    (r.scale == stats::Scale::Mos ? mos : mushra).push_back(r);
  }
  const auto table = stats::mos_table(mos);
  ASSERT_EQ(table.size(), 5u);
  EXPECT_EQ(table.back().condition_id, "natural");
  for (const auto& row : table) EXPECT_EQ(row.n, 30u);
  const auto report = stats::mushra_aggregate(mushra);
  EXPECT_EQ(report.conditions.size(), 6u);
}

TEST_F(ServiceTest, ConcurrentSessionsConserveRecords) {
  Service svc(store());
  svc.create_test(def_, stim());
  std::vector<std::thread> threads;
  for (int l = 0; l < 8; ++l) {
    threads.emplace_back([&, l] {
      complete(svc, svc.start_session("study", "l" + std::to_string(l), l).session_id);
    });
  }
  for (auto& t : threads) t.join();
  const auto records = svc.export_records("study");
  EXPECT_EQ(records.size(), 8u * 110u);
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (const auto& r : records) keys.insert({r.session_id, r.page_id, r.condition_id});
  EXPECT_EQ(keys.size(), records.size());
}

}  // namespace
}  // namespace mktts::service
