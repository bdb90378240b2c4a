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

namespace mktts::phonology {

enum class TokenKind {
  Word,
  MinorBreak,  // , ; : and dashes
  Boundary,    // . ! ? and ellipsis: sentence-final
};

struct Token {
  TokenKind kind = TokenKind::Word;
  std::string text;
  std::size_t byte_begin = 0;
  std::size_t byte_end = 0;
  // Word contains something other than alphabet letters (digits, Latin
  // script, symbols). Such words are passed through unspoken.
  bool unsupported = false;

  friend bool operator==(const Token&, const Token&) = default;
};

// Splits text into words and break marks. Quotes, brackets and hyphens only
// separate words; an apostrophe stays inside the word (it marks syllabic r,
// as in 'рж). Consecutive break characters collapse into one token, the
// strongest one winning.
std::vector<Token> normalize_text(std::string_view raw_text,
                                  const RuleTables& tables = RuleTables::builtin());

}  // namespace mktts::phonology
