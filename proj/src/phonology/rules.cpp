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

#include "mktts/phonology/rules.hpp"

#include <sstream>

#include "mktts/text/utf8.hpp"

namespace mktts::phonology {
namespace {

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

bool contains_id(std::string_view list, std::string_view id) {
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    if (list.substr(start, comma - start) == id) return true;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return false;
}

bool matches_context(const AllophoneRule& rule, const std::vector<Phone>& phones,
                     std::size_t i) {
  const std::string_view ctx = rule.context_rule;
  if (ctx.starts_with("before:")) {
    return i + 1 < phones.size() &&
           contains_id(ctx.substr(7), phones[i + 1].symbol);
  }
  if (ctx.starts_with("after:")) {
    return i > 0 && contains_id(ctx.substr(6), phones[i - 1].symbol);
  }
  if (ctx == "final") return i + 1 == phones.size();
  return false;
}

}  // namespace

std::vector<std::string> PhoneSequence::symbols() const {
  std::vector<std::string> out;
  out.reserve(phones.size());
  for (const auto& p : phones) out.push_back(p.symbol);
  return out;
}

std::string render(const PhoneSequence& seq) {
  std::string out;
  for (const auto& p : seq.phones) {
    if (!out.empty()) out.push_back(' ');
    if (p.stressed) out.push_back('\'');
    out += p.symbol;
    if (p.syllabic && p.symbol == "r") out.push_back('=');
  }
  return out;
}

UnsupportedGrapheme::UnsupportedGrapheme(std::string word, std::size_t letter_index)
    : std::runtime_error("unsupported grapheme at position " +
                         std::to_string(letter_index) + " in '" + word + "'"),
      word_(std::move(word)),
      letter_index_(letter_index) {}

PhoneSequence grapheme_to_phoneme(std::string_view word, const RuleTables& tables) {
  PhoneSequence seq;
  std::size_t letter = 0;
  for (const auto& cp : text::decode_utf8(word)) {
    if (is_apostrophe(cp.value)) continue;
    const char32_t lower = text::to_lower(cp.value);
    const Phoneme* ph = tables.by_grapheme(lower);
    if (ph == nullptr) throw UnsupportedGrapheme(std::string(word), letter);
    seq.phones.push_back({ph->id, {letter, letter + 1}, false, false});
    text::append_utf8(seq.word, lower);
    ++letter;
  }
  return seq;
}

PhoneSequence apply_allophones(const PhoneSequence& seq, const RuleTables& tables) {
  PhoneSequence out = seq;
  out.phones.clear();
  const auto& in = seq.phones;
  auto is_vowel_at = [&](std::size_t k) {
    return tables.voicing_of(in[k].symbol) == Voicing::Vowel;
  };
  for (std::size_t i = 0; i < in.size(); ++i) {
    Phone phone = in[i];
    for (const auto& rule : tables.allophones()) {
      if (rule.base != phone.symbol) continue;
      if (rule.context_rule == "syllabic_r") {
        const bool prev_vowel = i > 0 && is_vowel_at(i - 1);
        const bool next_vowel = i + 1 < in.size() && is_vowel_at(i + 1);
        const bool has_schwa = i > 0 && in[i - 1].symbol == kSchwa;
        if (!phone.syllabic && !prev_vowel && !next_vowel && !has_schwa) {
          out.phones.push_back({std::string(kSchwa), phone.span, false, false});
          phone.syllabic = true;
        }
      } else if (matches_context(rule, in, i)) {
        phone.symbol = rule.variant;
        break;
      }
    }
    out.phones.push_back(std::move(phone));
  }
  return out;
}

PhoneSequence apply_voicing_assimilation(const PhoneSequence& seq,
                                         const std::set<std::string>& exceptions,
                                         const RuleTables& tables) {
  PhoneSequence out = seq;
  if (exceptions.contains(seq.word)) return out;
  auto& phones = out.phones;
  bool changed = phones.size() > 1;
  while (changed) {
    changed = false;
    for (std::size_t i = phones.size() - 1; i-- > 0;) {
      const Phoneme* cur = tables.by_id(phones[i].symbol);
      if (cur == nullptr || !cur->is_obstruent() || !cur->pair) continue;
      const Voicing next = tables.voicing_of(phones[i + 1].symbol);
      const bool next_obstruent = next == Voicing::VoicedObstruent ||
                                  next == Voicing::VoicelessObstruent;
      if (next_obstruent && next != cur->voicing) {
        phones[i].symbol = *cur->pair;
        changed = true;
      }
    }
  }
  return out;
}

PhoneSequence apply_voicing_assimilation(const PhoneSequence& seq,
                                         const RuleTables& tables) {
  return apply_voicing_assimilation(seq, tables.assimilation_exceptions(), tables);
}

PhoneSequence apply_final_devoicing(const PhoneSequence& seq, const RuleTables& tables) {
  PhoneSequence out = seq;
  if (!seq.phrase_final || seq.phones.empty()) return out;
  Phone& last = out.phones.back();
  const Phoneme* ph = tables.by_id(last.symbol);
  if (ph != nullptr && ph->voicing == Voicing::VoicedObstruent && ph->pair) {
    last.symbol = *ph->pair;
  }
  return out;
}

bool is_nucleus(const Phone& phone, const RuleTables& tables) {
  return phone.syllabic || tables.voicing_of(phone.symbol) == Voicing::Vowel;
}

std::vector<Syllable> syllabify(const PhoneSequence& seq, const RuleTables& tables) {
  const auto& phones = seq.phones;
  std::vector<std::size_t> nuclei;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    if (is_nucleus(phones[i], tables)) nuclei.push_back(i);
  }
  if (nuclei.empty()) throw NoNucleus(seq.word.empty() ? render(seq) : seq.word);

  // A schwa written in front of syllabic r belongs to that nucleus.
  auto group_begin = [&](std::size_t n) {
    return (n > 0 && phones[n].syllabic && phones[n - 1].symbol == kSchwa) ? n - 1 : n;
  };

  std::vector<Syllable> out;
  std::size_t begin = 0;
  for (std::size_t k = 0; k < nuclei.size(); ++k) {
    const std::size_t nucleus = nuclei[k];
    std::size_t end = phones.size();
    if (k + 1 < nuclei.size()) {
      const std::size_t next_start = group_begin(nuclei[k + 1]);
      const std::size_t cluster = next_start - (nucleus + 1);
      // One intervocalic consonant opens the next syllable; longer clusters
      // leave their first consonant in the coda.
      end = cluster <= 1 ? nucleus + 1 : nucleus + 2;
    }
    out.push_back({begin, end, nucleus});
    begin = end;
  }
  return out;
}

}  // namespace mktts::phonology
