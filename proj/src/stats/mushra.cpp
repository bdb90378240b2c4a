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

#include "mktts/stats/mushra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "mktts/stats/mos.hpp"

namespace mktts::stats {

std::vector<RatingRecord> ScreeningResult::filter(
    const std::vector<RatingRecord>& records) const {
  std::vector<RatingRecord> out;
  for (const auto& r : records) {
    if (retained.contains(r.listener_id)) out.push_back(r);
  }
  return out;
}

ScreeningResult mushra_post_screen(const std::vector<RatingRecord>& records,
                                   const ScreeningOptions& options) {
  std::map<std::string, ListenerScreening> by_listener;
  bool any_reference = false;
  for (const auto& r : records) {
    if (r.scale != Scale::Mushra) throw MixedScales();
    auto& entry = by_listener[r.listener_id];
    entry.listener_id = r.listener_id;
    if (r.condition_id != options.reference_condition) continue;
    any_reference = true;
    ++entry.trials;
    if (r.value < options.ref_threshold) ++entry.failed;
  }
  if (!any_reference) throw NoReference();

  ScreeningResult result;
  for (auto& [id, entry] : by_listener) {
    entry.excluded = entry.trials > 0 &&
                     static_cast<double>(entry.failed) >
                         options.trial_fraction * static_cast<double>(entry.trials);
    if (!entry.excluded) result.retained.insert(id);
    result.listeners.push_back(entry);
  }
  return result;
}

double quantile_inclusive(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptyScores();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MushraReport mushra_aggregate(const std::vector<RatingRecord>& records,
                              const std::string& reference_condition) {
  if (records.empty()) throw EmptyScores();
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::set<std::string>> listeners;
  for (const auto& r : records) {
    if (r.scale != Scale::Mushra) throw MixedScales();
    values[r.condition_id].push_back(r.value);
    listeners[r.condition_id].insert(r.listener_id);
  }
  MushraReport report;
  for (auto& [condition, v] : values) {
    std::sort(v.begin(), v.end());
    MushraSummary s;
    s.condition_id = condition;
    s.n = v.size();
    s.min = v.front();
    s.max = v.back();
    s.q1 = quantile_inclusive(v, 0.25);
    s.median = quantile_inclusive(v, 0.5);
    s.q3 = quantile_inclusive(v, 0.75);
    s.mean = mos_mean(v);
    s.ci_half_width = ci_half_width(sample_stddev(v), v.size());
    s.retained_listener_count = listeners[condition].size();
    report.conditions.push_back(std::move(s));
  }

  // The hidden reference is expected near the top; low anchors are not
  // guaranteed to rank last, so only the reference gets a remark.
  const auto ref = std::find_if(report.conditions.begin(), report.conditions.end(),
                                [&](const MushraSummary& s) {
                                  return s.condition_id == reference_condition;
                                });
  if (ref != report.conditions.end()) {
    for (const auto& s : report.conditions) {
      if (&s != &*ref && s.median > ref->median) {
        report.annotations.push_back("hidden reference median is below '" + s.condition_id +
                                     "'");
      }
    }
  } else {
    report.annotations.push_back("no hidden-reference condition '" + reference_condition +
                                 "' in the ratings");
  }
  return report;
}

std::string boxplot_csv(const MushraReport& report) {
  std::string out = "condition,min,q1,median,q3,max,mean,ci\n";
  char buf[256];
  for (const auto& s : report.conditions) {
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", s.min, s.q1,
                  s.median, s.q3, s.max, s.mean, s.ci_half_width);
    out += s.condition_id + buf;
  }
  return out;
}

std::string render_mushra_table(const MushraReport& report) {
  std::size_t width = 9;  // "Condition"
  for (const auto& s : report.conditions) width = std::max(width, s.condition_id.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  std::string out = pad("Condition") + " |   N | Median |  Q1   |  Q3   |  Mean | 95 % CI\n";
  char buf[128];
  for (const auto& s : report.conditions) {
    std::snprintf(buf, sizeof buf, " | %3zu | %6.2f | %5.1f | %5.1f | %5.2f | %.2f\n", s.n,
                  s.median, s.q1, s.q3, s.mean, s.ci_half_width);
    out += pad(s.condition_id) + buf;
  }
  for (const auto& a : report.annotations) out += "note: " + a + "\n";
  return out;
}

}  // namespace mktts::stats
