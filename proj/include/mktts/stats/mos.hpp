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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mktts/stats/records.hpp"

namespace mktts::stats {

inline constexpr double kZ95 = 1.96;
// Natural speech is expected to score inside this band on the MOS scale.
inline constexpr double kNaturalMosLow = 4.5;
inline constexpr double kNaturalMosHigh = 4.8;

class EmptyScores : public std::invalid_argument {
 public:
  EmptyScores() : std::invalid_argument("no scores to aggregate") {}
};

class MixedScales : public std::invalid_argument {
 public:
  MixedScales() : std::invalid_argument("records mix MOS and MUSHRA scales") {}
};

double mos_mean(std::span<const double> scores);

// Sample standard deviation (N - 1 denominator); 0 for a single score.
double sample_stddev(std::span<const double> scores);

// 1.96 * sigma / sqrt(N).
double ci_half_width(double sigma, std::size_t n);

struct MosInterval {
  double mean = 0.0;
  double half_width = 0.0;
  // Set when N == 1: the half-width is reported as 0 but carries no meaning.
  bool single_score = false;
};

MosInterval mos_ci(std::span<const double> scores);

struct MosSummary {
  std::string condition_id;
  std::size_t n = 0;
  double mean = 0.0;
  double sigma = 0.0;
  double ci_half_width = 0.0;
};

struct MosTableOptions {
  // Condition rendered last, as the natural-speech row.
  std::string natural_condition = "natural";
};

// One summary per condition, sorted by condition id with the natural-speech
// condition moved to the end. Throws MixedScales unless every record is MOS.
std::vector<MosSummary> mos_table(const std::vector<RatingRecord>& records,
                                  const MosTableOptions& options = {});

// "3.35 | 0.59": mean and half-width rounded to two decimals.
std::string format_mos_cells(double mean, double half_width);

// Plain-text table: a "Model | MOS | 95 % CI" header, one row per summary
// and, when the natural condition is present, a note if its mean falls
// outside the expected band.
std::string render_mos_table(const std::vector<MosSummary>& rows,
                             const MosTableOptions& options = {});

}  // namespace mktts::stats
