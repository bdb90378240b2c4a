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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mktts/phonology/types.hpp"

namespace mktts::phonology {

inline constexpr std::size_t kInventorySize = 31;
inline constexpr std::string_view kSchwa = "@";

struct Phoneme {
  std::string id;
  char32_t grapheme = 0;
  Voicing voicing = Voicing::Sonorant;
  std::optional<std::string> pair;

  bool is_vowel() const { return voicing == Voicing::Vowel; }
  bool is_obstruent() const {
    return voicing == Voicing::VoicedObstruent ||
           voicing == Voicing::VoicelessObstruent;
  }
};

struct AllophoneRule {
  std::string base;
  std::string variant;
  std::string context_rule;
};

// The closed phoneme inventory plus the allophone table. Loaded once and
// shared read-only.
class RuleTables {
 public:
  // Tables compiled into the library; identical to the files under data/.
  static const RuleTables& builtin();

  // Reads alphabet.tsv, voicing_pairs.tsv, allophones.tsv and (optionally)
  // assimilation_exceptions.txt from `dir`. Throws TableError.
  static RuleTables load(const std::filesystem::path& dir);

  static RuleTables from_text(std::string_view alphabet_tsv,
                              std::string_view pairs_tsv,
                              std::string_view allophones_tsv,
                              std::string_view exceptions_txt = {});

  const std::vector<Phoneme>& phonemes() const { return phonemes_; }
  const std::vector<AllophoneRule>& allophones() const { return allophones_; }
  const std::set<std::string>& assimilation_exceptions() const {
    return exceptions_;
  }
  void set_assimilation_exceptions(std::set<std::string> words) {
    exceptions_ = std::move(words);
  }

  const Phoneme* by_grapheme(char32_t lower_cp) const;
  const Phoneme* by_id(std::string_view id) const;

  // Voicing class of a phone symbol. Allophone variants inherit the class of
  // their base; the inserted schwa counts as a sonorant.
  Voicing voicing_of(std::string_view symbol) const;
  bool is_alphabet_letter(char32_t cp) const;

 private:
  void index();

  std::vector<Phoneme> phonemes_;
  std::vector<AllophoneRule> allophones_;
  std::set<std::string> exceptions_;
  std::map<char32_t, std::size_t> by_grapheme_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::map<std::string, std::string, std::less<>> variant_base_;
};

}  // namespace mktts::phonology
