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

#include <fstream>
#include <random>
#include <string>
#include <vector>

#ifndef MKTTS_TEST_DATA_DIR
#error "MKTTS_TEST_DATA_DIR must be defined"
#endif

namespace mktts::test {

inline std::vector<std::string> fixture_words() {
  std::ifstream in(std::string(MKTTS_TEST_DATA_DIR) + "/words200.txt");
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// Pronounceable pseudo-words: 1..4 syllables of (C)(C)V(C) drawn from the
// Macedonian alphabet.
class WordGenerator {
 public:
  explicit WordGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string word() {
    static const std::vector<std::string> vowels{"а", "е", "и", "о", "у"};
    static const std::vector<std::string> consonants{
        "б", "в", "г", "д", "ѓ", "ж", "з", "ѕ", "ј", "к", "л", "љ", "м", "н",
        "њ", "п", "р", "с", "т", "ќ", "ф", "х", "ц", "ч", "џ", "ш"};
    std::uniform_int_distribution<int> syllables(1, 4);
    std::uniform_int_distribution<int> onset(0, 2);
    std::bernoulli_distribution coda(0.3);
    std::string w;
    const int n = syllables(rng_);
    for (int s = 0; s < n; ++s) {
      for (int k = onset(rng_); k > 0; --k) w += pick(consonants);
      w += pick(vowels);
      if (coda(rng_)) w += pick(consonants);
    }
    return w;
  }

  std::string sentence(int words) {
    std::string s;
    for (int i = 0; i < words; ++i) {
      if (i) s += ' ';
      s += word();
    }
    return s + '.';
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const std::string& pick(const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }

  std::mt19937_64 rng_;
};

}  // namespace mktts::test
