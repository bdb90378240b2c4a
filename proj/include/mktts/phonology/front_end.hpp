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
#include <string>
#include <string_view>
#include <vector>

#include "mktts/phonology/rule_tables.hpp"
#include "mktts/phonology/stress.hpp"
#include "mktts/phonology/tokenizer.hpp"
#include "mktts/phonology/types.hpp"

namespace mktts::phonology {

enum class IssueKind { Unsupported, UnsupportedGrapheme, NoNucleus };

struct FrontEndIssue {
  IssueKind kind;
  std::string token;
  std::size_t byte_begin = 0;
  std::string message;

  friend bool operator==(const FrontEndIssue&, const FrontEndIssue&) = default;
};

struct Phrase {
  std::vector<PhoneSequence> words;
  // Closed by sentence-final punctuation or by the end of the text.
  bool sentence_final = false;

  friend bool operator==(const Phrase&, const Phrase&) = default;
};

struct FrontEndResult {
  std::vector<Phrase> phrases;
  std::vector<FrontEndIssue> issues;

  friend bool operator==(const FrontEndResult&, const FrontEndResult&) = default;
};

// normalize -> g2p -> allophones -> assimilation -> stress -> final devoicing.
// Phrases are split at every break; devoicing only fires on the last spoken
// word before a sentence boundary (minor breaks do not devoice). Problem
// tokens are reported and skipped.
FrontEndResult front_end(std::string_view text, const StressLexicon& lexicon,
                         const RuleTables& tables = RuleTables::builtin());

// Runs every word-level rule except final devoicing. Throws like the
// individual rules.
PhoneSequence phonemize_word(std::string_view word, const StressLexicon& lexicon,
                             const RuleTables& tables = RuleTables::builtin());

}  // namespace mktts::phonology
