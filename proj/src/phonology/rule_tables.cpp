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

#include "mktts/phonology/rule_tables.hpp"

#include <fstream>
#include <sstream>

#include "mktts/phonology/tsv.hpp"
#include "mktts/text/utf8.hpp"

namespace mktts::phonology {
namespace {

constexpr std::string_view kAlphabet =
    "а\ta\tvowel\n"
    "б\tb\tvoiced\n"
    "в\tv\tvoiced\n"
    "г\tg\tvoiced\n"
    "д\td\tvoiced\n"
    "ѓ\tgj\tvoiced\n"
    "е\te\tvowel\n"
    "ж\tzh\tvoiced\n"
    "з\tz\tvoiced\n"
    "ѕ\tdz\tvoiced\n"
    "и\ti\tvowel\n"
    "ј\tj\tsonorant\n"
    "к\tk\tvoiceless\n"
    "л\tl\tsonorant\n"
    "љ\tlj\tsonorant\n"
    "м\tm\tsonorant\n"
    "н\tn\tsonorant\n"
    "њ\tnj\tsonorant\n"
    "о\to\tvowel\n"
    "п\tp\tvoiceless\n"
    "р\tr\tsonorant\n"
    "с\ts\tvoiceless\n"
    "т\tt\tvoiceless\n"
    "ќ\tkj\tvoiceless\n"
    "у\tu\tvowel\n"
    "ф\tf\tvoiceless\n"
    "х\th\tvoiceless\n"
    "ц\tc\tvoiceless\n"
    "ч\tch\tvoiceless\n"
    "џ\tdzh\tvoiced\n"
    "ш\tsh\tvoiceless\n";

constexpr std::string_view kPairs =
    "b\tp\n"
    "v\tf\n"
    "g\tk\n"
    "d\tt\n"
    "gj\tkj\n"
    "zh\tsh\n"
    "z\ts\n"
    "dz\tc\n"
    "dzh\tch\n";

constexpr std::string_view kAllophones =
    "r\tr=\tsyllabic_r\n"
    "n\tN\tidentity\n"
    "n\tnj_\tidentity\n"
    "l\tL\tidentity\n"
    "l\tl_\tidentity\n"
    "v\tw\tidentity\n";

Voicing parse_class(const std::string& s, std::size_t line) {
  if (s == "vowel") return Voicing::Vowel;
  if (s == "sonorant") return Voicing::Sonorant;
  if (s == "voiced") return Voicing::VoicedObstruent;
  if (s == "voiceless") return Voicing::VoicelessObstruent;
  throw TableError("alphabet line " + std::to_string(line) +
                   ": unknown class '" + s + "'");
}

bool valid_context(const std::string& rule) {
  return rule == "syllabic_r" || rule == "identity" || rule == "final" ||
         rule.starts_with("before:") || rule.starts_with("after:");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw TableError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const RuleTables& RuleTables::builtin() {
  static const RuleTables tables = from_text(kAlphabet, kPairs, kAllophones);
  return tables;
}

RuleTables RuleTables::load(const std::filesystem::path& dir) {
  std::string exceptions;
  if (std::filesystem::exists(dir / "assimilation_exceptions.txt")) {
    exceptions = read_file(dir / "assimilation_exceptions.txt");
  }
  return from_text(read_file(dir / "alphabet.tsv"),
                   read_file(dir / "voicing_pairs.tsv"),
                   read_file(dir / "allophones.tsv"), exceptions);
}

RuleTables RuleTables::from_text(std::string_view alphabet_tsv,
                                 std::string_view pairs_tsv,
                                 std::string_view allophones_tsv,
                                 std::string_view exceptions_txt) {
  RuleTables t;
  for (const auto& row : parse_tsv(alphabet_tsv)) {
    if (row.fields.size() != 3) {
      throw TableError("alphabet line " + std::to_string(row.line) +
                       ": expected 3 fields");
    }
    const auto cps = text::to_u32(row.fields[0]);
    if (cps.size() != 1) {
      throw TableError("alphabet line " + std::to_string(row.line) +
                       ": grapheme must be one letter");
    }
    t.phonemes_.push_back(
        {row.fields[1], cps[0], parse_class(row.fields[2], row.line), {}});
  }
  if (t.phonemes_.size() != kInventorySize) {
    throw TableError("alphabet must list exactly " +
                     std::to_string(kInventorySize) + " phonemes, got " +
                     std::to_string(t.phonemes_.size()));
  }
  t.index();
  if (t.by_id_.size() != kInventorySize ||
      t.by_grapheme_.size() != kInventorySize) {
    throw TableError("alphabet has duplicate ids or graphemes");
  }

  for (const auto& row : parse_tsv(pairs_tsv)) {
    if (row.fields.size() != 2) {
      throw TableError("pair line " + std::to_string(row.line) +
                       ": expected 2 fields");
    }
    const auto vi = t.by_id_.find(row.fields[0]);
    const auto ui = t.by_id_.find(row.fields[1]);
    if (vi == t.by_id_.end() || ui == t.by_id_.end()) {
      throw TableError("pair line " + std::to_string(row.line) +
                       ": unknown phone id");
    }
    Phoneme& voiced = t.phonemes_[vi->second];
    Phoneme& voiceless = t.phonemes_[ui->second];
    if (voiced.voicing != Voicing::VoicedObstruent ||
        voiceless.voicing != Voicing::VoicelessObstruent) {
      throw TableError("pair line " + std::to_string(row.line) +
                       ": pair must be voiced then voiceless obstruent");
    }
    if (voiced.pair || voiceless.pair) {
      throw TableError("pair line " + std::to_string(row.line) +
                       ": phone already paired");
    }
    voiced.pair = voiceless.id;
    voiceless.pair = voiced.id;
  }

  for (const auto& row : parse_tsv(allophones_tsv)) {
    if (row.fields.size() != 3) {
      throw TableError("allophone line " + std::to_string(row.line) +
                       ": expected 3 fields");
    }
    if (!t.by_id_.contains(row.fields[0])) {
      throw TableError("allophone line " + std::to_string(row.line) +
                       ": unknown base '" + row.fields[0] + "'");
    }
    if (!valid_context(row.fields[2])) {
      throw TableError("allophone line " + std::to_string(row.line) +
                       ": unknown context rule '" + row.fields[2] + "'");
    }
    t.allophones_.push_back({row.fields[0], row.fields[1], row.fields[2]});
  }
  for (const auto& row : parse_tsv(exceptions_txt)) {
    t.exceptions_.insert(text::to_lower(row.fields[0]));
  }
  t.index();
  return t;
}

void RuleTables::index() {
  by_grapheme_.clear();
  by_id_.clear();
  variant_base_.clear();
  for (std::size_t i = 0; i < phonemes_.size(); ++i) {
    by_grapheme_[phonemes_[i].grapheme] = i;
    by_id_[phonemes_[i].id] = i;
  }
  for (const auto& rule : allophones_) variant_base_[rule.variant] = rule.base;
}

const Phoneme* RuleTables::by_grapheme(char32_t lower_cp) const {
  const auto it = by_grapheme_.find(lower_cp);
  return it == by_grapheme_.end() ? nullptr : &phonemes_[it->second];
}

const Phoneme* RuleTables::by_id(std::string_view id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &phonemes_[it->second];
}

Voicing RuleTables::voicing_of(std::string_view symbol) const {
  if (const Phoneme* p = by_id(symbol)) return p->voicing;
  if (const auto it = variant_base_.find(symbol); it != variant_base_.end()) {
    if (const Phoneme* p = by_id(it->second)) return p->voicing;
  }
  return Voicing::Sonorant;
}

bool RuleTables::is_alphabet_letter(char32_t cp) const {
  return by_grapheme_.contains(text::to_lower(cp));
}

}  // namespace mktts::phonology
