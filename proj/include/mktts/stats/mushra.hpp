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
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mktts/stats/records.hpp"

namespace mktts::stats {

inline constexpr std::string_view kHiddenReference = "reference";

class NoReference : public std::invalid_argument {
 public:
  NoReference() : std::invalid_argument("no hidden-reference ratings found") {}
};

struct ScreeningOptions {
  double ref_threshold = 90.0;
  double trial_fraction = 0.15;
  std::string reference_condition = std::string(kHiddenReference);
};

struct ListenerScreening {
  std::string listener_id;
  std::size_t trials = 0;  // pages on which the hidden reference was rated
  std::size_t failed = 0;  // of those, rated below the threshold
  bool excluded = false;
};

struct ScreeningResult {
  std::set<std::string> retained;
  std::vector<ListenerScreening> listeners;  // sorted by listener id

  // The subset of `records` from retained listeners, order preserved.
  std::vector<RatingRecord> filter(const std::vector<RatingRecord>& records) const;
};

// Drops listeners who rate the hidden reference below `ref_threshold` on more
// than `trial_fraction` of their trials. Listeners who never met the hidden
// reference are retained. Throws NoReference if nobody rated it.
ScreeningResult mushra_post_screen(const std::vector<RatingRecord>& records,
                                   const ScreeningOptions& options = {});

// Linear interpolation between closest ranks (inclusive method). `sorted`
// must be ascending and non-empty.
double quantile_inclusive(std::span<const double> sorted, double q);

struct MushraSummary {
  std::string condition_id;
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double ci_half_width = 0.0;
  std::size_t retained_listener_count = 0;
};

struct MushraReport {
  std::vector<MushraSummary> conditions;  // sorted by condition id
  std::vector<std::string> annotations;
};

// Throws MixedScales for MOS records, EmptyScores for no records.
MushraReport mushra_aggregate(const std::vector<RatingRecord>& records,
                              const std::string& reference_condition =
                                  std::string(kHiddenReference));

// condition,min,q1,median,q3,max,mean,ci
std::string boxplot_csv(const MushraReport& report);
std::string render_mushra_table(const MushraReport& report);

}  // namespace mktts::stats
