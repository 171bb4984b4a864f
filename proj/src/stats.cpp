// Copyright 2026 The Timely Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "timely/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "timely/errors.hpp"

namespace timely::stats {

using nlohmann::json;

void check_histogram(const IntervalHistogram& hist) {
  if (hist.unit <= 0) throw Error("histogram unit must be positive");
  if (hist.bins.empty()) throw Error("histogram has no bins");
  Rational total = 0;
  std::int64_t prev_hi = -1;
  for (const auto& b : hist.bins) {
    if (b.lo < 0) throw Error("bin lower bound must be nonnegative");
    if (b.lo >= b.hi) throw Error("bin bounds must satisfy lo < hi");
    if (b.lo < prev_hi) throw Error("bins must be ascending and non-overlapping");
    if (b.prob <= 0 || b.prob > 1) throw Error("bin probability must lie in (0,1]");
    total += b.prob;
    prev_hi = b.hi;
  }
  if (total != 1) throw Error("bin probabilities must sum to 1, got " + rational_to_string(total));
}

IntervalHistogram build_histogram(const std::vector<double>& samples, const Rational& unit,
                                  const Rational& min_bin_prob) {
  if (samples.empty()) throw Error("cannot build a histogram from zero samples");
  if (unit <= 0) throw Error("histogram unit must be positive");
  if (min_bin_prob < 0 || min_bin_prob >= 1) throw Error("min_bin_prob must lie in [0,1)");

  const double unit_d = to_double(unit);
  std::map<std::int64_t, std::int64_t> counts;  // cell c covers (c, c+1)
  std::set<std::int64_t> boundary_points;       // integers hit exactly by a sample
  for (double s : samples) {
    double q = s / unit_d;
    if (q <= 0) {
      if (q < 0) throw Error("negative duration sample " + std::to_string(s));
      throw Error("zero-duration sample cannot be placed in an open interval");
    }
    double fl = std::floor(q);
    std::int64_t cell;
    if (q == fl) {
      // Exact boundary: count in the cell below and remember to widen.
      cell = static_cast<std::int64_t>(fl) - 1;
      if (cell < 0) throw Error("sample exactly at zero boundary cannot be represented");
      boundary_points.insert(static_cast<std::int64_t>(fl));
    } else {
      cell = static_cast<std::int64_t>(fl);
    }
    ++counts[cell];
  }

  const auto total = static_cast<std::int64_t>(samples.size());
  const std::int64_t lo_cell = counts.begin()->first;
  const std::int64_t hi_cell = counts.rbegin()->first;

  struct Bin {
    std::int64_t lo, hi, count;
  };
  auto below_min = [&](std::int64_t count) { return Rational(count, total) < min_bin_prob; };

  // Right-to-left greedy merge over the full cell range (interior empty
  // cells participate, so isolated mass extends left over gaps).
  std::vector<Bin> reversed;
  Bin cur{hi_cell, hi_cell + 1, counts[hi_cell]};
  for (std::int64_t c = hi_cell - 1; c >= lo_cell; --c) {
    std::int64_t cell_count = counts.count(c) ? counts[c] : 0;
    if (below_min(cur.count) || below_min(cell_count) || cell_count == cur.count) {
      cur.lo = c;
      cur.count += cell_count;
    } else {
      reversed.push_back(cur);
      cur = Bin{c, c + 1, cell_count};
    }
  }
  reversed.push_back(cur);

  std::vector<Bin> bins(reversed.rbegin(), reversed.rend());
  std::erase_if(bins, [](const Bin& b) { return b.count == 0; });

  // Boundary samples must end up strictly inside their bin: widen the bin by
  // one cell, or fuse with the successor when it starts at that point.
  for (std::int64_t point : boundary_points) {
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (bins[i].lo <= point - 1 && point - 1 < bins[i].hi) {
        if (bins[i].hi == point) {
          if (i + 1 < bins.size() && bins[i + 1].lo == point) {
            bins[i].hi = bins[i + 1].hi;
            bins[i].count += bins[i + 1].count;
            bins.erase(bins.begin() + i + 1);
          } else {
            bins[i].hi = point + 1;
          }
        }
        break;
      }
    }
  }

  IntervalHistogram hist;
  hist.unit = unit;
  for (const auto& b : bins)
    hist.bins.push_back({b.lo, b.hi, Rational(b.count, total)});
  check_histogram(hist);
  return hist;
}

SummaryStats summarize_samples(const std::vector<double>& samples) {
  if (samples.empty()) throw Error("cannot summarize zero samples");
  SummaryStats s;
  s.count = samples.size();
  // Welford's one-pass mean/variance.
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double x : samples) {
    ++n;
    double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  s.mean = mean;
  s.variance = m2 / static_cast<double>(n);

  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  auto nearest_rank = [&](double p) {
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
    if (rank == 0) rank = 1;
    return sorted[rank - 1];
  };
  s.p50 = nearest_rank(0.50);
  s.p90 = nearest_rank(0.90);
  s.p99 = nearest_rank(0.99);
  return s;
}

namespace {

json rational_to_json_number(const Rational& r) {
  // Decimal text parsed back as a JSON number; callers round first so the
  // value has a short exact form.
  auto dec = decimal_if_finite(r);
  if (!dec) throw Error("value " + rational_to_string(r) + " has no finite decimal form");
  return json::parse(*dec);
}

}  // namespace

std::string write_stats(const StatsMap& stats) {
  json doc = json::object();
  for (const auto& [key, hist] : stats) {
    json bins = json::array();
    // Round to 6 places, folding the residual into the largest bin so the
    // written file still sums to exactly 1.
    std::vector<Rational> rounded;
    Rational sum = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < hist.bins.size(); ++i) {
      rounded.push_back(round_to_places(hist.bins[i].prob, 6));
      sum += rounded.back();
      if (hist.bins[i].prob > hist.bins[largest].prob) largest = i;
    }
    rounded[largest] += 1 - sum;
    for (std::size_t i = 0; i < hist.bins.size(); ++i)
      bins.push_back({hist.bins[i].lo, hist.bins[i].hi, rational_to_json_number(rounded[i])});
    doc[key] = {{"unit", rational_to_json_number(hist.unit)}, {"bins", bins}};
  }
  return doc.dump(2) + "\n";
}

StatsMap read_stats(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("stats file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("stats file: top level must be an object");
  StatsMap stats;
  for (const auto& [key, value] : doc.items()) {
    IntervalHistogram hist;
    if (value.contains("unit")) hist.unit = rational_from_double(value["unit"].get<double>());
    if (!value.contains("bins") || !value["bins"].is_array())
      throw ParseError("stats file: '" + key + "' needs a 'bins' array");
    for (const auto& b : value["bins"]) {
      if (!b.is_array() || b.size() != 3)
        throw ParseError("stats file: each bin must be [lo, hi, prob]");
      hist.bins.push_back({b[0].get<std::int64_t>(), b[1].get<std::int64_t>(),
                           rational_from_double(b[2].get<double>())});
    }
    try {
      check_histogram(hist);
    } catch (const Error& e) {
      throw Error("stats file entry '" + key + "': " + e.what());
    }
    stats[key] = std::move(hist);
  }
  return stats;
}

}  // namespace timely::stats
