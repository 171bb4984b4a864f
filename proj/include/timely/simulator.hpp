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
#include <variant>
#include <vector>

#include "timely/rng.hpp"
#include "timely/rosgraph.hpp"
#include "timely/stats.hpp"
#include "timely/trace.hpp"

namespace timely::sim {

/// A configured duration source: a fixed number of seconds or a histogram
/// sampled per use.
using Duration = std::variant<double, stats::IntervalHistogram>;

/// Workload and latency configuration for one simulation run.
///
/// `comm` is keyed by graph edge ("from->to"):
///   - publish edge  n->t : broker leg added to every delivery of n's
///     publications on t (default 0)
///   - subscribe edge t->n : delivery leg to subscriber n
///   - request edge  s->n : request leg from requester n to the provider
///   - provide edge  n->s : answer leg from provider n back to the requester
/// `exec` is keyed by service (execution time at the provider), `handler` by
/// subscribe edge "topic->subscriber" (callback time). `publish_period` makes
/// every publisher of the topic publish at t = 0, p, 2p, ... < horizon;
/// `request_period` ("node->service") does the same for service requests.
struct ScenarioConfig {
  std::map<std::string, Duration> comm;
  std::map<std::string, Duration> exec;
  std::map<std::string, Duration> handler;
  std::map<std::string, double> publish_period;
  std::map<std::string, double> request_period;
  double horizon = 0.0;
  std::uint64_t seed = 0;
};

/// Parses the scenario JSON (mirrors ScenarioConfig; durations are either a
/// number or {"unit": u, "bins": [[lo,hi,p], ...]}).
ScenarioConfig load_scenario(const std::string& document);

/// Draws one duration: picks a bin by its probability, then a point uniformly
/// inside the open interval (lo*unit, hi*unit). Deterministic given the rng
/// state.
double draw_duration(const stats::IntervalHistogram& hist, Rng& rng);

/// Runs the discrete-event simulation and returns the trace, sorted by
/// timestamp with ties broken by (corr_id, kind, channel, observer).
/// Periodic sources fire strictly before the horizon; interactions already
/// started are drained to completion. Service execution is single-server
/// FIFO per provider node; topic handlers run concurrently.
std::vector<trace::TraceEvent> simulate(const rosgraph::RosGraph& graph,
                                        const ScenarioConfig& config);

}  // namespace timely::sim
