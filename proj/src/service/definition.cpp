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

#include "mktts/service/definition.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mktts/dsp/anchor.hpp"
#include "mktts/dsp/wav.hpp"

namespace mktts::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::string out;
  out.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out = "invalid test definition";
  for (const auto& p : parts) out += "\n  " + p;
  return out;
}

class Checker {
 public:
  explicit Checker(fs::path base) : base_(std::move(base)) {}

  std::optional<std::string> text(const json& obj, const char* key, const std::string& where,
                                  bool required = true) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) fail(where + ": missing \"" + key + "\"");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_string() || v.get<std::string>().empty()) {
      fail(where + ": \"" + key + "\" must be a non-empty string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<fs::path> wav(const json& obj, const char* key, const std::string& where) {
    auto p = text(obj, key, where);
    if (!p) return std::nullopt;
    fs::path path(*p);
    if (path.is_relative()) path = base_ / path;
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
      fail(where + ": missing file " + path.string());
    }
    return path;
  }

  void fail(std::string msg) { problems.push_back(std::move(msg)); }

  std::vector<std::string> problems;

 private:
  fs::path base_;
};

}  // namespace

DefinitionError::DefinitionError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

TestDefinition parse_definition(const json& doc, const fs::path& base_dir) {
  Checker c(base_dir);
  TestDefinition def;
  if (!doc.is_object()) throw DefinitionError({"definition must be a JSON object"});

  if (auto id = c.text(doc, "test_id", "test", false)) {
    const bool ok = id->find_first_not_of(
                        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.") ==
                    std::string::npos;
    if (!ok || *id == "." || *id == "..") {
      c.fail("test: test_id may only contain letters, digits, '_', '-' and '.'");
    }
    def.test_id = *id;
  }
  if (doc.contains("instructions")) {
    if (doc["instructions"].is_string()) {
      def.instructions = doc["instructions"].get<std::string>();
    } else {
      c.fail("test: \"instructions\" must be a string");
    }
  }
  if (doc.contains("set_size")) {
    if (doc["set_size"].is_number_integer() && doc["set_size"].get<std::int64_t>() >= 2) {
      def.set_size = doc["set_size"].get<std::size_t>();
    } else {
      c.fail("test: \"set_size\" must be an integer >= 2");
    }
  }

  std::set<std::string> page_ids;
  auto claim_page_id = [&](const std::string& id, const std::string& where) {
    if (!page_ids.insert(id).second) c.fail(where + ": duplicate page id \"" + id + "\"");
  };

  const json empty = json::array();
  const json& mos = doc.contains("mos") ? doc["mos"] : empty;
  const json& mushra = doc.contains("mushra") ? doc["mushra"] : empty;
  if (!mos.is_array()) c.fail("test: \"mos\" must be an array");
  if (!mushra.is_array()) c.fail("test: \"mushra\" must be an array");

  if (mos.is_array()) {
    for (std::size_t i = 0; i < mos.size(); ++i) {
      const std::string where = "mos[" + std::to_string(i) + "]";
      auto sid = c.text(mos[i], "stimulus_id", where);
      auto cond = c.text(mos[i], "condition", where);
      auto wav = c.wav(mos[i], "wav", where);
      if (sid) claim_page_id(*sid, where);
      if (sid && cond && wav) def.mos_pages.push_back({*sid, *cond, *wav});
    }
  }

  if (mushra.is_array()) {
    for (std::size_t i = 0; i < mushra.size(); ++i) {
      const json& page = mushra[i];
      const std::string where = "mushra[" + std::to_string(i) + "]";
      StimulusSet set;
      bool ok = true;
      auto pid = c.text(page, "page_id", where);
      if (pid) {
        set.page_id = *pid;
        claim_page_id(*pid, where);
      } else {
        ok = false;
      }
      auto ref = c.wav(page, "reference", where);
      if (ref) set.reference = *ref; else ok = false;

      std::set<std::string> conditions{std::string(kReferenceCondition)};
      auto claim_condition = [&](const std::string& cond, const std::string& at) {
        if (!conditions.insert(cond).second) {
          c.fail(at + ": condition \"" + cond + "\" repeats or is reserved");
          ok = false;
        }
      };

      const json& stimuli = page.is_object() && page.contains("stimuli") ? page["stimuli"] : empty;
      if (!stimuli.is_array() || stimuli.empty()) {
        c.fail(where + ": \"stimuli\" must be a non-empty array");
        ok = false;
      } else {
        for (std::size_t k = 0; k < stimuli.size(); ++k) {
          const std::string at = where + ".stimuli[" + std::to_string(k) + "]";
          auto cond = c.text(stimuli[k], "condition", at);
          auto wav = c.wav(stimuli[k], "wav", at);
          if (cond) claim_condition(*cond, at);
          if (cond && wav) set.systems.push_back({*cond, *wav}); else ok = false;
        }
      }

      const json& anchors = page.is_object() && page.contains("anchors") ? page["anchors"] : empty;
      if (!anchors.is_array()) {
        c.fail(where + ": \"anchors\" must be an array");
        ok = false;
      } else {
        for (std::size_t k = 0; k < anchors.size(); ++k) {
          const std::string at = where + ".anchors[" + std::to_string(k) + "]";
          const json& a = anchors[k];
          AnchorSpec spec;
          auto cond = c.text(a, "condition", at);
          if (cond) {
            spec.condition = *cond;
            claim_condition(*cond, at);
          } else {
            ok = false;
          }
          const bool has_wav = a.is_object() && a.contains("wav");
          const bool has_lp = a.is_object() && a.contains("lowpass_hz");
          if (has_wav == has_lp) {
            c.fail(at + ": give exactly one of \"wav\" or \"lowpass_hz\"");
            ok = false;
          } else if (has_wav) {
            spec.wav = c.wav(a, "wav", at);
            if (!spec.wav) ok = false;
          } else if (!a["lowpass_hz"].is_number() || a["lowpass_hz"].get<double>() <= 0.0) {
            c.fail(at + ": \"lowpass_hz\" must be a positive number");
            ok = false;
          } else {
            spec.lowpass_hz = a["lowpass_hz"].get<double>();
          }
          set.anchors.push_back(std::move(spec));
        }
      }

      if (ok && def.set_size && set.set_size() != *def.set_size) {
        c.fail(where + ": set has " + std::to_string(set.set_size()) + " rated stimuli, expected " +
               std::to_string(*def.set_size));
      }
      if (ok) def.mushra_pages.push_back(std::move(set));
    }
  }

  if (c.problems.empty() && def.mos_pages.empty() && def.mushra_pages.empty()) {
    c.fail("test: no pages defined");
  }
  if (!c.problems.empty()) throw DefinitionError(std::move(c.problems));
  return def;
}

TestDefinition load_definition(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DefinitionError({"cannot open " + file.string()});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DefinitionError({file.string() + ": " + e.what()});
  }
  return parse_definition(doc, file.parent_path());
}

json definition_to_json(const TestDefinition& def) {
  json doc;
  if (!def.test_id.empty()) doc["test_id"] = def.test_id;
  doc["instructions"] = def.instructions;
  if (def.set_size) doc["set_size"] = *def.set_size;
  doc["mos"] = json::array();
  for (const auto& m : def.mos_pages) {
    doc["mos"].push_back({{"stimulus_id", m.stimulus_id},
                          {"condition", m.condition},
                          {"wav", m.wav.string()}});
  }
  doc["mushra"] = json::array();
  for (const auto& s : def.mushra_pages) {
    json page{{"page_id", s.page_id}, {"reference", s.reference.string()}};
    page["stimuli"] = json::array();
    for (const auto& r : s.systems) {
      page["stimuli"].push_back({{"condition", r.condition}, {"wav", r.wav.string()}});
    }
    page["anchors"] = json::array();
    for (const auto& a : s.anchors) {
      json entry{{"condition", a.condition}};
      if (a.wav) entry["wav"] = a.wav->string();
      if (a.lowpass_hz) entry["lowpass_hz"] = *a.lowpass_hz;
      page["anchors"].push_back(entry);
    }
    doc["mushra"].push_back(page);
  }
  return doc;
}

json StoredTest::to_json() const {
  json doc{{"test_id", test_id}, {"digest", digest}, {"instructions", instructions}};
  doc["mos"] = json::array();
  for (const auto& m : mos_pages) {
    doc["mos"].push_back(
        {{"stimulus_id", m.stimulus_id}, {"condition", m.condition}, {"audio", m.audio}});
  }
  doc["mushra"] = json::array();
  for (const auto& p : mushra_pages) {
    json rated = json::array();
    for (const auto& s : p.rated) rated.push_back({{"condition", s.condition}, {"audio", s.audio}});
    doc["mushra"].push_back(
        {{"page_id", p.page_id}, {"reference", p.reference_audio}, {"rated", rated}});
  }
  return doc;
}

StoredTest StoredTest::from_json(const json& doc) {
  StoredTest t;
  t.test_id = doc.at("test_id").get<std::string>();
  t.digest = doc.at("digest").get<std::string>();
  t.instructions = doc.value("instructions", "");
  for (const auto& m : doc.at("mos")) {
    t.mos_pages.push_back({m.at("stimulus_id").get<std::string>(),
                           m.at("condition").get<std::string>(), m.at("audio").get<std::string>()});
  }
  for (const auto& p : doc.at("mushra")) {
    StoredMushraPage page{p.at("page_id").get<std::string>(),
                          p.at("reference").get<std::string>(), {}};
    for (const auto& s : p.at("rated")) {
      page.rated.push_back({s.at("condition").get<std::string>(), s.at("audio").get<std::string>()});
    }
    t.mushra_pages.push_back(std::move(page));
  }
  return t;
}

namespace {

class AudioCache {
 public:
  const dsp::WavAudio& load(const fs::path& path) {
    auto it = cache_.find(path);
    if (it == cache_.end()) it = cache_.emplace(path, dsp::read_wav(path)).first;
    return it->second;
  }

 private:
  std::map<fs::path, dsp::WavAudio> cache_;
};

}  // namespace

PreparedTest prepare_test(const TestDefinition& def) {
  PreparedTest out;
  AudioCache cache;
  std::vector<std::string> problems;
  std::set<std::string> emitted;

  // The tag keeps identical sources (labeled and hidden reference) apart.
  auto store = [&](const dsp::WavAudio& src, const std::string& tag) {
    dsp::WavAudio norm{src.sample_rate, dsp::normalize_rms(src.samples, kStimulusDbfs)};
    PreparedAudio a;
    a.bytes = dsp::encode_wav(norm, "mkid", tag);
    a.hash = sha256_hex(a.bytes);
    const std::string hash = a.hash;
    if (emitted.insert(hash).second) out.audio.push_back(std::move(a));
    return hash;
  };
  auto load = [&](const fs::path& p) -> const dsp::WavAudio* {
    try {
      return &cache.load(p);
    } catch (const std::exception& e) {
      problems.push_back(p.string() + ": " + e.what());
      return nullptr;
    }
  };

  out.test.instructions = def.instructions;
  for (const auto& m : def.mos_pages) {
    if (const auto* w = load(m.wav)) {
      out.test.mos_pages.push_back({m.stimulus_id, m.condition, store(*w, "mos/" + m.stimulus_id)});
    }
  }
  for (const auto& s : def.mushra_pages) {
    StoredMushraPage page;
    page.page_id = s.page_id;
    const auto* ref = load(s.reference);
    if (ref) {
      page.reference_audio = store(*ref, "ref/" + s.page_id);
      page.rated.push_back({std::string(kReferenceCondition),
                            store(*ref, "slot/" + s.page_id + "/" + std::string(kReferenceCondition))});
    }
    for (const auto& r : s.systems) {
      if (const auto* w = load(r.wav)) {
        page.rated.push_back({r.condition, store(*w, "slot/" + s.page_id + "/" + r.condition)});
      }
    }
    for (const auto& a : s.anchors) {
      const std::string tag = "slot/" + s.page_id + "/" + a.condition;
      if (a.wav) {
        if (const auto* w = load(*a.wav)) page.rated.push_back({a.condition, store(*w, tag)});
      } else if (ref) {
        if (*a.lowpass_hz >= ref->sample_rate / 2.0) {
          problems.push_back(s.page_id + ": anchor cutoff at or above Nyquist");
          continue;
        }
        dsp::WavAudio low{ref->sample_rate,
                          dsp::lowpass_anchor(ref->samples, *a.lowpass_hz, ref->sample_rate)};
        page.rated.push_back({a.condition, store(low, tag)});
      }
    }
    out.test.mushra_pages.push_back(std::move(page));
  }
  if (!problems.empty()) throw DefinitionError(std::move(problems));

  json content = out.test.to_json();
  content.erase("test_id");
  content.erase("digest");
  out.test.digest = sha256_hex(content.dump());
  out.test.test_id = def.test_id.empty() ? "t" + out.test.digest.substr(0, 12) : def.test_id;
  return out;
}

}  // namespace mktts::service
