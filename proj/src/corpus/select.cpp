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

#include "mktts/corpus/select.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "mktts/text/utf8.hpp"

namespace mktts::corpus {

DiphoneCounts extract_diphones(const phonology::PhoneSequence& seq) {
  DiphoneCounts out;
  for (std::size_t i = 1; i < seq.phones.size(); ++i) {
    ++out[{seq.phones[i - 1].symbol, seq.phones[i].symbol}];
  }
  return out;
}

UtteranceCandidate UtteranceCandidate::from_text(std::string id, std::string text,
                                                 const phonology::StressLexicon& lexicon,
                                                 const phonology::RuleTables& tables) {
  UtteranceCandidate c;
  c.id = std::move(id);
  c.text = std::move(text);
  for (auto& phrase : phonology::front_end(c.text, lexicon, tables).phrases) {
    for (auto& word : phrase.words) {
      for (const auto& [d, n] : extract_diphones(word)) c.diphones[d] += n;
      c.words.push_back(std::move(word));
    }
  }
  return c;
}

void CoverageState::add(const DiphoneCounts& diphones) {
  for (const auto& [d, n] : diphones) {
    counts[d] += n;
    if (counts[d] > 0) covered.insert(d);
  }
}

DiphoneSet diphone_universe(const std::vector<UtteranceCandidate>& candidates) {
  DiphoneSet u;
  for (const auto& c : candidates) {
    for (const auto& [d, n] : c.diphones) u.insert(d);
  }
  return u;
}

namespace {

struct Score {
  std::size_t new_types = 0;
  double balance = 0.0;
  std::size_t length = 0;
};

Score score(const UtteranceCandidate& c, const CoverageState& state) {
  Score s;
  s.length = text::decode_utf8(c.text).size();
  for (const auto& [d, n] : c.diphones) {
    const auto it = state.counts.find(d);
    const std::size_t seen = it == state.counts.end() ? 0 : it->second;
    if (seen == 0) ++s.new_types;
    s.balance += static_cast<double>(n) / static_cast<double>(1 + seen);
  }
  return s;
}

// True when a beats b.
bool better(const Score& a, const UtteranceCandidate& ca, const Score& b,
            const UtteranceCandidate& cb) {
  if (a.new_types != b.new_types) return a.new_types > b.new_types;
  if (a.balance != b.balance) return a.balance > b.balance;
  if (a.length != b.length) return a.length < b.length;
  return ca.id < cb.id;
}

double fraction(const DiphoneSet& covered, const DiphoneSet& universe) {
  if (universe.empty()) return 1.0;
  std::size_t hit = 0;
  for (const auto& d : universe) hit += covered.contains(d) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(universe.size());
}

}  // namespace

Selection greedy_select(const std::vector<UtteranceCandidate>& candidates,
                        const SelectionOptions& options) {
  Selection sel;
  if (options.target_count == 0) return sel;

  std::vector<const UtteranceCandidate*> pool;
  for (const auto& c : candidates) {
    if (c.word_count() >= options.min_words && c.word_count() <= options.max_words) {
      pool.push_back(&c);
    }
  }
  if (pool.empty()) throw EmptyPool();
  const DiphoneSet universe = diphone_universe(candidates);

  while (sel.picks.size() < options.target_count && !pool.empty()) {
    std::size_t best = 0;
    Score best_score = score(*pool[0], sel.state);
    for (std::size_t i = 1; i < pool.size(); ++i) {
      const Score s = score(*pool[i], sel.state);
      if (better(s, *pool[i], best_score, *pool[best])) {
        best = i;
        best_score = s;
      }
    }
    const UtteranceCandidate* pick = pool[best];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    sel.state.add(pick->diphones);
    sel.state.selected_ids.push_back(pick->id);
    sel.picks.push_back(pick);
    sel.coverage_trace.push_back(fraction(sel.state.covered, universe));
  }
  return sel;
}

CoverageReport coverage_report(const CoverageState& state, const DiphoneSet& universe) {
  CoverageReport r;
  r.selected = state.selected_ids.size();
  r.universe_types = universe.size();
  for (const auto& d : universe) {
    if (state.covered.contains(d)) {
      ++r.covered_types;
      ++r.histogram[state.counts.at(d)];
    } else {
      r.missing.push_back(d);
    }
  }
  r.fraction = fraction(state.covered, universe);
  return r;
}

std::string format_report(const CoverageReport& report) {
  char buf[64];
  std::string out;
  out += "selected: " + std::to_string(report.selected) + "\n";
  out += "universe_types: " + std::to_string(report.universe_types) + "\n";
  out += "covered_types: " + std::to_string(report.covered_types) + "\n";
  std::snprintf(buf, sizeof buf, "%.6f", report.fraction);
  out += "coverage: " + std::string(buf) + "\n";
  out += "missing:";
  for (const auto& [a, b] : report.missing) out += " " + a + "-" + b;
  out += "\n";
  for (const auto& [count, types] : report.histogram) {
    out += "histogram." + std::to_string(count) + ": " + std::to_string(types) + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_candidate_lines(
    std::string_view input) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < input.size()) {
    auto eol = input.find('\n', pos);
    if (eol == std::string_view::npos) eol = input.size();
    std::string_view line = input.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab != std::string_view::npos) {
      out.emplace_back(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
    } else {
      char id[32];
      std::snprintf(id, sizeof id, "utt%05zu", line_no);
      out.emplace_back(id, std::string(line));
    }
  }
  return out;
}

}  // namespace mktts::corpus
