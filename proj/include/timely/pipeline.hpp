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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "timely/diagnostics.hpp"
#include "timely/ptp.hpp"
#include "timely/stats.hpp"

namespace timely::pipeline {

/// Duration of a delay stage: an inline histogram or a reference into a
/// stats file ("channel:kind").
struct DurationRef {
  std::string name;
  bool operator==(const DurationRef&) const = default;
};
using StageDuration = std::variant<stats::IntervalHistogram, DurationRef>;

/// Wait for an external event whose latency follows a histogram, then move on.
struct Delay {
  std::string id;
  StageDuration duration;
  std::string then;
};

/// A processing step taking time strictly inside (lo,hi) model units which
/// succeeds with probability `success_p`.
struct Work {
  std::string id;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  Rational success_p;
  std::string on_success;
  std::string on_fail;
};

/// Terminal stage; its label becomes a query proposition.
struct Absorb {
  std::string id;
  std::string label;
};

using Stage = std::variant<Delay, Work, Absorb>;

/// A sequential process with probabilistic branching and retry loops,
/// compiled into a single-clock timed program.
struct PipelineSpec {
  std::string start;
  std::vector<Stage> stages;
};

const std::string& stage_id(const Stage& s);

/// Empty iff ids are unique, all references resolve, and some terminal stage
/// is reachable from start.
std::vector<Diagnostic> validate_pipeline(const PipelineSpec& p);

/// Replaces duration references by the named histograms. Throws on a missing
/// name, listing it.
PipelineSpec bind_statistics(const PipelineSpec& p, const stats::StatsMap& stats);

struct CompileOptions {
  /// Give branch locations the invariant x<=0 so the bin choice is
  /// instantaneous. Disabling matches imported reference programs where the
  /// choice state has no invariant.
  bool branch_invariant = true;
};

/// Compiles to a PTP with one clock "x". A delay stage with k bins becomes a
/// branch location plus k bin locations (invariant x<hi, exit enabled at
/// x>lo, clock reset on exit); a work stage becomes one location whose exit
/// splits into success (no reset) and failure (reset); a terminal stage
/// becomes a labelled location with a self-loop.
ptp::Ptp compile_pipeline(const PipelineSpec& p, const CompileOptions& options = {});

/// Pipeline file:
/// {"start": id, "stages": [
///    {"kind":"delay","id":..,"duration":{"ref":name}|{"unit":u,"bins":[[lo,hi,p],..]},"then":id},
///    {"kind":"work","id":..,"lo":8,"hi":10,"p":0.7,"success":id,"fail":id},
///    {"kind":"absorb","id":..,"label":"Success"}]}
PipelineSpec load_pipeline(const std::string& document);

}  // namespace timely::pipeline
