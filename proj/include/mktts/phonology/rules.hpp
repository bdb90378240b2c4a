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

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mktts/phonology/rule_tables.hpp"
#include "mktts/phonology/types.hpp"

namespace mktts::phonology {

// One phone per letter; apostrophes are skipped. Throws UnsupportedGrapheme.
PhoneSequence grapheme_to_phoneme(std::string_view word,
                                  const RuleTables& tables = RuleTables::builtin());

// Context-dependent variants. An /r/ with no neighbouring vowel becomes
// syllabic and gets a schwa in front of it carrying the same span.
PhoneSequence apply_allophones(const PhoneSequence& seq,
                               const RuleTables& tables = RuleTables::builtin());

// Regressive voicing assimilation inside one word, iterated right to left to
// a fixed point. Words listed in `exceptions` come back unchanged.
PhoneSequence apply_voicing_assimilation(const PhoneSequence& seq,
                                         const std::set<std::string>& exceptions,
                                         const RuleTables& tables = RuleTables::builtin());

PhoneSequence apply_voicing_assimilation(const PhoneSequence& seq,
                                         const RuleTables& tables = RuleTables::builtin());

// Devoices the last phone when the sequence closes a phrase.
PhoneSequence apply_final_devoicing(const PhoneSequence& seq,
                                    const RuleTables& tables = RuleTables::builtin());

struct Syllable {
  std::size_t begin = 0;  // phone index, inclusive
  std::size_t end = 0;    // exclusive
  std::size_t nucleus = 0;

  friend bool operator==(const Syllable&, const Syllable&) = default;
};

bool is_nucleus(const Phone& phone, const RuleTables& tables = RuleTables::builtin());

// Throws NoNucleus when the word has neither a vowel nor a syllabic consonant.
std::vector<Syllable> syllabify(const PhoneSequence& seq,
                                const RuleTables& tables = RuleTables::builtin());

}  // namespace mktts::phonology
