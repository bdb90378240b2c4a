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

namespace mktts::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// One decoded code point and the byte range it occupied in the source.
struct CodePoint {
  char32_t value;
  std::size_t byte_begin;
  std::size_t byte_end;
};

// Malformed sequences decode to U+FFFD, one per offending byte.
std::vector<CodePoint> decode_utf8(std::string_view bytes);

std::u32string to_u32(std::string_view bytes);

void append_utf8(std::string& out, char32_t cp);
std::string to_utf8(std::u32string_view cps);

// Lowercase for Cyrillic and ASCII; everything else is returned as is.
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view bytes);

}  // namespace mktts::text
