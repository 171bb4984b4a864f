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
//
// Independent value oracles for the checker tests. These never touch the
// solver: the scenario oracles enumerate branch-outcome sequences of the two
// vision designs directly (scheduling every delay at its earliest grid
// point), and the MDP oracle recomputes optimal values by memoized recursion
// over the digitized state graph.

#pragma once

#include "timely/checker.hpp"
#include "timely/rational.hpp"

namespace timely::testing {

/// Maximum probability that the original design (receive two images from the
/// 0.3/0.6/0.1 bins, process both in (12,16) with success 0.91, retry on
/// failure) reaches success within `deadline` time units on the 1/g grid.
Rational original_pmax_oracle(std::uint32_t granularity, std::int64_t deadline);

/// Same for the improved design: one receive per cycle, two (8,10)
/// processing attempts with success 0.7 each, retry on double failure.
Rational improved_pmax_oracle(std::uint32_t granularity, std::int64_t deadline);

/// Memoized depth-first optimal reachability value of the initial state on a
/// bounded digitization. States whose elapsed counter has passed
/// `deadline_ticks` can never satisfy a deadline-limited target again and
/// count as 0; together with treating pure self-loop actions as staying
/// forever (value 0 when minimizing, never optimal when maximizing) this
/// makes the remaining recursion acyclic.
double mdp_recursion_oracle(const checker::Mdp& mdp, const std::vector<bool>& target,
                            checker::Opt opt, std::int64_t deadline_ticks);

}  // namespace timely::testing
