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

#include "mktts/phonology/stress.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mktts/phonology/rules.hpp"
#include "mktts/phonology/tsv.hpp"
#include "mktts/text/utf8.hpp"

namespace mktts::phonology {
namespace {

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::size_t syllable_count(const std::string& word, const RuleTables& tables) {
  return syllabify(apply_allophones(grapheme_to_phoneme(word, tables), tables), tables)
      .size();
}

}  // namespace

StressLexicon StressLexicon::parse(std::string_view tsv, const RuleTables& tables) {
  StressLexicon lex;
  for (const auto& row : parse_tsv(tsv)) {
    const std::string where = "lexicon line " + std::to_string(row.line);
    if (row.fields.size() < 2 || row.fields.size() > 3) {
      throw TableError(where + ": expected word<TAB>index[<TAB>alternative]");
    }
    const auto index = parse_index(row.fields[1]);
    if (!index) throw TableError(where + ": bad index '" + row.fields[1] + "'");
    StressEntry entry{*index, std::nullopt};
    if (row.fields.size() == 3) {
      entry.alternative = parse_index(row.fields[2]);
      if (!entry.alternative) {
        throw TableError(where + ": bad alternative index '" + row.fields[2] + "'");
      }
    }
    try {
      lex.insert(row.fields[0], entry, tables);
    } catch (const std::exception& e) {
      throw TableError(where + ": " + e.what());
    }
  }
  return lex;
}

StressLexicon StressLexicon::load(const std::filesystem::path& path,
                                  const RuleTables& tables) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TableError("cannot open lexicon " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), tables);
}

void StressLexicon::insert(const std::string& word, StressEntry entry,
                           const RuleTables& tables) {
  const std::string key = grapheme_to_phoneme(word, tables).word;
  const std::size_t n = syllable_count(key, tables);
  if (entry.index >= n || (entry.alternative && *entry.alternative >= n)) {
    throw TableError("stress index out of range for '" + key + "' (" +
                     std::to_string(n) + " syllables)");
  }
  entries_[key] = entry;
}

const StressEntry* StressLexicon::find(std::string_view lowercase_word) const {
  const auto it = entries_.find(lowercase_word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t default_stress_index(std::size_t syllable_count) {
  return syllable_count >= 3 ? syllable_count - 3 : 0;
}

PhoneSequence assign_stress(const PhoneSequence& word_seq, const StressLexicon& lexicon,
                            const RuleTables& tables) {
  const auto syllables = syllabify(word_seq, tables);
  std::size_t target = default_stress_index(syllables.size());
  if (const StressEntry* e = lexicon.find(word_seq.word);
      e != nullptr && e->index < syllables.size()) {
    target = e->index;
  }
  PhoneSequence out = word_seq;
  for (auto& p : out.phones) p.stressed = false;
  out.phones[syllables[target].nucleus].stressed = true;
  return out;
}

}  // namespace mktts::phonology
