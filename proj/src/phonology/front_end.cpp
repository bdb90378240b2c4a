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

#include "mktts/phonology/front_end.hpp"

#include "mktts/phonology/rules.hpp"

namespace mktts::phonology {

PhoneSequence phonemize_word(std::string_view word, const StressLexicon& lexicon,
                             const RuleTables& tables) {
  auto seq = grapheme_to_phoneme(word, tables);
  seq = apply_allophones(seq, tables);
  seq = apply_voicing_assimilation(seq, tables);
  return assign_stress(seq, lexicon, tables);
}

FrontEndResult front_end(std::string_view text, const StressLexicon& lexicon,
                         const RuleTables& tables) {
  FrontEndResult result;
  Phrase current;

  auto close_phrase = [&](bool sentence_final) {
    current.sentence_final = sentence_final;
    if (sentence_final && !current.words.empty()) {
      current.words.back().phrase_final = true;
      current.words.back() = apply_final_devoicing(current.words.back(), tables);
    }
    if (!current.words.empty()) result.phrases.push_back(std::move(current));
    current = Phrase{};
  };

  for (const Token& tok : normalize_text(text, tables)) {
    switch (tok.kind) {
      case TokenKind::Boundary:
        close_phrase(true);
        continue;
      case TokenKind::MinorBreak:
        close_phrase(false);
        continue;
      case TokenKind::Word:
        break;
    }
    if (tok.unsupported) {
      result.issues.push_back({IssueKind::Unsupported, tok.text, tok.byte_begin,
                               "token passed through unspoken"});
      continue;
    }
    PhoneSequence seq;
    try {
      seq = grapheme_to_phoneme(tok.text, tables);
    } catch (const UnsupportedGrapheme& e) {
      result.issues.push_back(
          {IssueKind::UnsupportedGrapheme, tok.text, tok.byte_begin, e.what()});
      continue;
    }
    seq = apply_allophones(seq, tables);
    seq = apply_voicing_assimilation(seq, tables);
    try {
      seq = assign_stress(seq, lexicon, tables);
    } catch (const NoNucleus& e) {
      // Still spoken; it just carries no stress.
      result.issues.push_back({IssueKind::NoNucleus, tok.text, tok.byte_begin, e.what()});
    }
    current.words.push_back(std::move(seq));
  }
  close_phrase(true);
  return result;
}

}  // namespace mktts::phonology
