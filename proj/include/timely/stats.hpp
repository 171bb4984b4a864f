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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "timely/rational.hpp"

namespace timely::stats {

/// Discrete distribution over disjoint open integer intervals, in model time
/// units; `unit` converts model units to seconds. A bin (lo,hi) carries the
/// probability that a duration lies strictly between lo and hi units.
struct IntervalHistogram {
  Rational unit = 1;
  struct Bin {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    Rational prob;

    bool operator==(const Bin&) const = default;
  };
  std::vector<Bin> bins;

  bool operator==(const IntervalHistogram&) const = default;
};

/// Throws Error if the histogram violates its invariants (ordered disjoint
/// bins, lo < hi, probabilities in (0,1] summing to 1).
void check_histogram(const IntervalHistogram& hist);

/// Builds an interval histogram from raw duration samples (seconds).
///
/// Samples are scaled by 1/unit and counted into unit-width cells (c, c+1).
/// A sample exactly on an integer boundary counts toward the cell below and
/// the covering bin is widened so the open interval still contains it.
/// Cells are then merged right to left: a cell joins the bin to its right
/// while either side's probability is below min_bin_prob, or while the cell's
/// count equals the bin's accumulated count (plateau merging). Empty cells
/// that survive merging are dropped.
///
/// The output is scale-equivariant: multiplying all samples and the unit by
/// the same factor leaves the (lo, hi, prob) list unchanged.
IntervalHistogram build_histogram(const std::vector<double>& samples, const Rational& unit,
                                  const Rational& min_bin_prob);

/// Summary of a sample set, all in seconds. Variance is the population
/// variance; quantiles use the nearest-rank rule.
struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double max = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
};

SummaryStats summarize_samples(const std::vector<double>& samples);

/// Stats file: {"channel:kind": {"unit": u, "bins": [[lo,hi,p], ...]}, ...}.
/// Probabilities are written as decimals rounded to 6 places with the
/// rounding residual folded into the largest bin, so the file sums to 1.
using StatsMap = std::map<std::string, IntervalHistogram>;

std::string write_stats(const StatsMap& stats);
StatsMap read_stats(const std::string& document);

}  // namespace timely::stats
