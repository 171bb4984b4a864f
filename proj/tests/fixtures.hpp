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

#include <fstream>
#include <sstream>
#include <string>

#include "timely/pipeline.hpp"
#include "timely/ptp.hpp"
#include "timely/stats.hpp"

namespace timely::testing {

inline std::string data_path(const std::string& name) {
  return std::string(TIMELY_DATA_DIR) + "/" + name;
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing fixture file ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// The camera receive-time distribution used throughout the vision example:
/// (3,4) with 0.3, (4,6) with 0.6, (6,8) with 0.1.
inline stats::IntervalHistogram receive_histogram() {
  stats::IntervalHistogram h;
  h.unit = 1;
  h.bins = {{3, 4, Rational(3, 10)}, {4, 6, Rational(6, 10)}, {6, 8, Rational(1, 10)}};
  return h;
}

/// Original vision pipeline: receive two images, process both together in
/// (12,16) with success probability 0.91, retry from scratch on failure.
inline pipeline::PipelineSpec original_pipeline() {
  pipeline::PipelineSpec p;
  p.start = "recv1";
  p.stages.push_back(pipeline::Delay{"recv1", receive_histogram(), "recv2"});
  p.stages.push_back(pipeline::Delay{"recv2", receive_histogram(), "proc"});
  p.stages.push_back(pipeline::Work{"proc", 12, 16, Rational(91, 100), "found", "recv1"});
  p.stages.push_back(pipeline::Absorb{"found", "Success"});
  return p;
}

/// Improved vision pipeline: process each image separately in (8,10) with
/// success probability 0.7; the second image arrives during the first
/// processing step, so no waiting in between.
inline pipeline::PipelineSpec improved_pipeline() {
  pipeline::PipelineSpec p;
  p.start = "recv";
  p.stages.push_back(pipeline::Delay{"recv", receive_histogram(), "proc1"});
  p.stages.push_back(pipeline::Work{"proc1", 8, 10, Rational(7, 10), "found", "proc2"});
  p.stages.push_back(pipeline::Work{"proc2", 8, 10, Rational(7, 10), "found", "recv"});
  p.stages.push_back(pipeline::Absorb{"found", "Success"});
  return p;
}

/// Hand-built equivalent of the improved system's reference pta program:
/// upper bounds live in the enabling zones (no invariants), the branch
/// location has no invariant, and constraint order matches the program text.
inline ptp::Ptp improved_reference_model() {
  using Rel = ptp::ClockConstraint::Rel;
  ptp::Ptp m;
  m.locations = {"s0", "s1", "s2", "s3", "s4", "s5", "s6"};
  m.initial = 0;
  m.clocks = {"x"};
  m.labels["Success"] = {5};

  auto window = [](std::int64_t hi, std::int64_t lo) {
    return ptp::Zone{{{"x", std::nullopt, Rel::Lt, hi}, {"x", std::nullopt, Rel::Gt, lo}}};
  };

  ptp::Transition branch;
  branch.source = 0;
  branch.outcomes = {{Rational(3, 10), {}, {"x"}, 1},
                     {Rational(6, 10), {}, {"x"}, 2},
                     {Rational(1, 10), {}, {"x"}, 3}};
  m.transitions.push_back(branch);

  for (auto [loc, hi, lo] : {std::tuple<int, std::int64_t, std::int64_t>{1, 4, 3},
                             {2, 6, 4},
                             {3, 8, 6}}) {
    ptp::Transition t;
    t.source = loc;
    t.enabling = window(hi, lo);
    t.outcomes = {{Rational(1), {}, {"x"}, 4}};
    m.transitions.push_back(t);
  }

  ptp::Transition first;
  first.source = 4;
  first.enabling = window(10, 8);
  first.outcomes = {{Rational(7, 10), {}, {}, 5}, {Rational(3, 10), {}, {"x"}, 6}};
  m.transitions.push_back(first);

  ptp::Transition stay;
  stay.source = 5;
  stay.outcomes = {{Rational(1), {}, {}, 5}};
  m.transitions.push_back(stay);

  ptp::Transition second;
  second.source = 6;
  second.enabling = window(10, 8);
  second.outcomes = {{Rational(7, 10), {}, {}, 5}, {Rational(3, 10), {}, {"x"}, 0}};
  m.transitions.push_back(second);

  return m;
}

}  // namespace timely::testing
