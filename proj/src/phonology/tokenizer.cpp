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

#include "mktts/phonology/tokenizer.hpp"

#include "mktts/text/utf8.hpp"

namespace mktts::phonology {
namespace {

enum class CharClass { Letter, Space, Minor, Major, Separator, Apostrophe, Other };

CharClass classify(char32_t cp, const RuleTables& tables) {
  if (tables.is_alphabet_letter(cp)) return CharClass::Letter;
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x00A0:
      return CharClass::Space;
    case U'.': case U'!': case U'?': case 0x2026:
      return CharClass::Major;
    case U',': case U';': case U':': case 0x2013: case 0x2014:
      return CharClass::Minor;
    case U'"': case U'(': case U')': case U'[': case U']': case U'-':
    case 0x00AB: case 0x00BB: case 0x201C: case 0x201D: case 0x201E:
      return CharClass::Separator;
    case U'\'': case 0x2019:
      return CharClass::Apostrophe;
    default:
      return CharClass::Other;
  }
}

}  // namespace

std::vector<Token> normalize_text(std::string_view raw_text,
                                  const RuleTables& tables) {
  std::vector<Token> tokens;
  const auto cps = text::decode_utf8(raw_text);

  auto push_break = [&](TokenKind kind, const text::CodePoint& cp) {
    if (!tokens.empty() && tokens.back().kind != TokenKind::Word) {
      Token& prev = tokens.back();
      if (kind == TokenKind::Boundary) prev.kind = TokenKind::Boundary;
      prev.byte_end = cp.byte_end;
      prev.text = std::string(raw_text.substr(prev.byte_begin,
                                              prev.byte_end - prev.byte_begin));
      return;
    }
    tokens.push_back({kind,
                      std::string(raw_text.substr(cp.byte_begin,
                                                  cp.byte_end - cp.byte_begin)),
                      cp.byte_begin, cp.byte_end, false});
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const auto cls = classify(cps[i].value, tables);
    if (cls == CharClass::Space || cls == CharClass::Separator) {
      ++i;
      continue;
    }
    if (cls == CharClass::Major) {
      push_break(TokenKind::Boundary, cps[i++]);
      continue;
    }
    if (cls == CharClass::Minor) {
      push_break(TokenKind::MinorBreak, cps[i++]);
      continue;
    }
    // A word runs until whitespace, punctuation or a separator. A trailing
    // apostrophe is treated as a closing quote.
    const std::size_t start = i;
    bool unsupported = false;
    while (i < cps.size()) {
      const auto c = classify(cps[i].value, tables);
      if (c == CharClass::Letter || c == CharClass::Apostrophe) {
        ++i;
      } else if (c == CharClass::Other) {
        unsupported = true;
        ++i;
      } else {
        break;
      }
    }
    std::size_t end = i;
    while (end > start &&
           classify(cps[end - 1].value, tables) == CharClass::Apostrophe) {
      --end;
    }
    if (end == start) continue;
    bool has_letter = false;
    for (std::size_t k = start; k < end; ++k) {
      if (classify(cps[k].value, tables) == CharClass::Letter) has_letter = true;
    }
    const std::size_t b = cps[start].byte_begin;
    const std::size_t e = cps[end - 1].byte_end;
    tokens.push_back({TokenKind::Word, std::string(raw_text.substr(b, e - b)), b,
                      e, unsupported || !has_letter});
  }
  return tokens;
}

}  // namespace mktts::phonology
