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
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "mktts/phonology/rule_tables.hpp"
#include "mktts/phonology/types.hpp"

namespace mktts::phonology {

struct StressEntry {
  std::size_t index = 0;
  // Second index for loanwords still alternating between an irregular and
  // the regular stress. Kept as metadata only.
  std::optional<std::size_t> alternative;
};

// Words whose stress does not follow the antepenultimate rule.
class StressLexicon {
 public:
  StressLexicon() = default;

  // UTF-8 TSV: word<TAB>index[<TAB>alternative]. Every index is checked
  // against the syllable count of the word's phonemization; violations throw
  // TableError naming the line.
  static StressLexicon parse(std::string_view tsv,
                             const RuleTables& tables = RuleTables::builtin());
  static StressLexicon load(const std::filesystem::path& path,
                            const RuleTables& tables = RuleTables::builtin());

  void insert(const std::string& word, StressEntry entry,
              const RuleTables& tables = RuleTables::builtin());
  const StressEntry* find(std::string_view lowercase_word) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, StressEntry, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, StressEntry, std::less<>> entries_;
};

// Index of the stressed syllable: the lexicon entry when present, otherwise
// the antepenultimate syllable (first syllable of shorter words).
std::size_t default_stress_index(std::size_t syllable_count);

// Clears any existing stress and marks exactly one nucleus. Propagates
// NoNucleus from syllabification.
PhoneSequence assign_stress(const PhoneSequence& word_seq, const StressLexicon& lexicon,
                            const RuleTables& tables = RuleTables::builtin());

}  // namespace mktts::phonology
