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
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mktts/phonology/front_end.hpp"

namespace mktts::corpus {

using Diphone = std::pair<std::string, std::string>;
using DiphoneCounts = std::map<Diphone, std::size_t>;
using DiphoneSet = std::set<Diphone>;

// Adjacent phone pairs inside the word; pairs never straddle a word boundary.
DiphoneCounts extract_diphones(const phonology::PhoneSequence& seq);

struct UtteranceCandidate {
  std::string id;
  std::string text;
  std::vector<phonology::PhoneSequence> words;
  DiphoneCounts diphones;

  std::size_t word_count() const { return words.size(); }

  // Runs the front end over `text` and collects diphones of every word.
  static UtteranceCandidate from_text(std::string id, std::string text,
                                      const phonology::StressLexicon& lexicon,
                                      const phonology::RuleTables& tables =
                                          phonology::RuleTables::builtin());
};

struct CoverageState {
  DiphoneSet covered;
  DiphoneCounts counts;
  std::vector<std::string> selected_ids;

  void add(const DiphoneCounts& diphones);
};

struct SelectionOptions {
  std::size_t target_count = 0;
  std::size_t min_words = 3;
  std::size_t max_words = 20;
};

struct Selection {
  std::vector<const UtteranceCandidate*> picks;
  CoverageState state;
  // Coverage fraction over the pool's diphone universe after each pick.
  std::vector<double> coverage_trace;
};

class EmptyPool : public std::runtime_error {
 public:
  EmptyPool() : std::runtime_error("no candidate satisfies the length filter") {}
};

// Greedy diphone coverage. At every step the in-range candidate with the most
// unseen diphone types wins; ties go to the higher balance score (rare
// diphones weigh more), then the shorter text, then the smaller id. The pool
// must outlive the returned selection.
Selection greedy_select(const std::vector<UtteranceCandidate>& candidates,
                        const SelectionOptions& options);

// All diphone types present in the pool.
DiphoneSet diphone_universe(const std::vector<UtteranceCandidate>& candidates);

struct CoverageReport {
  std::size_t selected = 0;
  std::size_t universe_types = 0;
  std::size_t covered_types = 0;
  double fraction = 0.0;
  std::vector<Diphone> missing;
  // occurrence count -> number of covered diphone types seen that often
  std::map<std::size_t, std::size_t> histogram;
};

CoverageReport coverage_report(const CoverageState& state, const DiphoneSet& universe);

// key: value lines, stable ordering.
std::string format_report(const CoverageReport& report);

// Input lines are either plain text or id<TAB>text. Plain lines get ids
// "utt00001", "utt00002", ... by line number.
std::vector<std::pair<std::string, std::string>> parse_candidate_lines(std::string_view input);

}  // namespace mktts::corpus
