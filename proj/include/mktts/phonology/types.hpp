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
#include <stdexcept>
#include <string>
#include <vector>

namespace mktts::phonology {

enum class Voicing { VoicedObstruent, VoicelessObstruent, Sonorant, Vowel };

// Letter range [begin, end) inside the source word, counted in letters.
struct GraphemeSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const GraphemeSpan&, const GraphemeSpan&) = default;
};

struct Phone {
  std::string symbol;
  GraphemeSpan span;
  bool stressed = false;
  bool syllabic = false;

  friend bool operator==(const Phone&, const Phone&) = default;
};

// Phones of one word. `word` is the lowercase letter-only spelling used for
// lexicon and exception lookups.
struct PhoneSequence {
  std::vector<Phone> phones;
  bool phrase_final = false;
  std::string word;

  std::size_t size() const { return phones.size(); }
  bool empty() const { return phones.empty(); }
  std::vector<std::string> symbols() const;

  friend bool operator==(const PhoneSequence&, const PhoneSequence&) = default;
};

// Space separated symbols; syllabic r prints as "r=", stressed nuclei get a
// leading apostrophe.
std::string render(const PhoneSequence& seq);

class UnsupportedGrapheme : public std::runtime_error {
 public:
  UnsupportedGrapheme(std::string word, std::size_t letter_index);
  const std::string& word() const { return word_; }
  std::size_t letter_index() const { return letter_index_; }

 private:
  std::string word_;
  std::size_t letter_index_;
};

class NoNucleus : public std::runtime_error {
 public:
  explicit NoNucleus(const std::string& word)
      : std::runtime_error("no syllable nucleus in '" + word + "'") {}
};

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mktts::phonology
