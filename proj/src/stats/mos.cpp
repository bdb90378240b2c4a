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

#include "mktts/stats/mos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace mktts::stats {

double mos_mean(std::span<const double> scores) {
  if (scores.empty()) throw EmptyScores();
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

double sample_stddev(std::span<const double> scores) {
  if (scores.empty()) throw EmptyScores();
  if (scores.size() == 1) return 0.0;
  const double mu = mos_mean(scores);
  double ss = 0.0;
  for (double s : scores) ss += (s - mu) * (s - mu);
  return std::sqrt(ss / static_cast<double>(scores.size() - 1));
}

double ci_half_width(double sigma, std::size_t n) {
  if (n == 0) throw EmptyScores();
  return kZ95 * sigma / std::sqrt(static_cast<double>(n));
}

MosInterval mos_ci(std::span<const double> scores) {
  MosInterval out;
  out.mean = mos_mean(scores);
  out.single_score = scores.size() == 1;
  out.half_width = ci_half_width(sample_stddev(scores), scores.size());
  return out;
}

std::vector<MosSummary> mos_table(const std::vector<RatingRecord>& records,
                                  const MosTableOptions& options) {
  std::map<std::string, std::vector<double>> by_condition;
  for (const auto& r : records) {
    if (r.scale != Scale::Mos) throw MixedScales();
    by_condition[r.condition_id].push_back(r.value);
  }
  std::vector<MosSummary> rows;
  std::optional<MosSummary> natural;
  for (auto& [condition, scores] : by_condition) {
    // Summation order must not depend on record order.
    std::sort(scores.begin(), scores.end());
    MosSummary s;
    s.condition_id = condition;
    s.n = scores.size();
    s.mean = mos_mean(scores);
    s.sigma = sample_stddev(scores);
    s.ci_half_width = ci_half_width(s.sigma, s.n);
    if (condition == options.natural_condition) {
      natural = s;
    } else {
      rows.push_back(std::move(s));
    }
  }
  if (natural) rows.push_back(std::move(*natural));
  return rows;
}

std::string format_mos_cells(double mean, double half_width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f | %.2f", mean, half_width);
  return buf;
}

std::string render_mos_table(const std::vector<MosSummary>& rows,
                             const MosTableOptions& options) {
  std::size_t width = 5;  // "Model"
  for (const auto& r : rows) width = std::max(width, r.condition_id.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };

  std::string out = pad("Model") + " | MOS  | 95 % CI\n";
  out += std::string(width, '-') + "-|------|--------\n";
  for (const auto& r : rows) {
    out += pad(r.condition_id) + " | " + format_mos_cells(r.mean, r.ci_half_width) + "\n";
  }
  for (const auto& r : rows) {
    if (r.condition_id == options.natural_condition &&
        (r.mean < kNaturalMosLow || r.mean > kNaturalMosHigh)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "note: natural speech scored %.2f, outside the expected %.1f-%.1f band\n",
                    r.mean, kNaturalMosLow, kNaturalMosHigh);
      out += buf;
    }
  }
  return out;
}

}  // namespace mktts::stats
