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
#include <optional>
#include <string>
#include <vector>

#include "timely/ptp.hpp"

namespace timely::checker {

enum class Opt { Max, Min };

/// Target proposition: a boolean combination of quoted location labels and
/// integer-variable comparisons. Clocks never appear.
struct Prop {
  enum class Kind { Label, Cmp, And, Or };

  Kind kind = Kind::Label;
  std::string label;
  std::string var;
  ptp::Assertion::CmpOp cmp = ptp::Assertion::CmpOp::Eq;
  std::int64_t value = 0;
  std::vector<Prop> children;
};

/// A reachability query: optimal probability of eventually (optionally
/// within `bound` model time units) satisfying the proposition.
struct PctlQuery {
  Opt opt = Opt::Max;
  std::optional<std::int64_t> bound;
  Prop prop;
};

/// Parses `("Pmax"|"Pmin") "=?" "[" "F" ("<=" INT)? prop "]"` where prop is a
/// quoted label or variable comparisons joined by '&'/'|' (parentheses
/// allowed). Other temporal operators are rejected.
PctlQuery parse_query(const std::string& text);

/// One finite state of the digitized program: location, variable valuation,
/// per-clock tick counts (saturated above the clock's ceiling), and for
/// bounded queries an absolute elapsed-tick counter (also saturated).
struct DigitizedState {
  std::int32_t location = 0;
  std::vector<std::int64_t> vars;
  std::vector<std::int64_t> ticks;
  std::int64_t elapsed = -1;

  bool operator==(const DigitizedState&) const = default;
};

/// Finite MDP produced by digitization. Action id -1 is the tick (advance
/// all clocks by one grid step); other ids index the source transitions.
struct Mdp {
  struct Outcome {
    Rational prob;
    double prob_d = 0.0;
    std::uint32_t target = 0;
  };
  struct Action {
    std::int32_t id = -1;
    std::vector<Outcome> outcomes;
  };

  std::vector<DigitizedState> states;
  std::vector<std::vector<Action>> actions;
  std::uint32_t initial = 0;
  std::uint32_t granularity = 1;
  std::optional<std::int64_t> bound;
};

struct DigitizeOptions {
  std::uint32_t granularity = 2;
  std::optional<std::int64_t> bound;
  std::size_t state_cap = 5'000'000;
  /// Extra ticks above ceiling*g+1 on every clock cap; values must not
  /// depend on it.
  std::int64_t cap_slack = 0;
};

/// Builds the reachable digitized MDP: all zone constants are scaled by the
/// granularity, clocks advance in grid steps of 1/g model units and saturate
/// one tick above their scaled ceiling. A transition is an action when its
/// guard and enabling zone hold and every outcome satisfies its target
/// invariant after resets. Difference constraints are rejected here (the
/// per-clock saturation cannot track them soundly).
Mdp digitize(const ptp::Ptp& m, const DigitizeOptions& options);

/// Graph-based exact-0 and exact-1 state sets for optimal reachability.
/// Target states are treated as absorbing. The sets are disjoint and
/// `one` contains every target state.
struct QualitativeSets {
  std::vector<bool> zero;
  std::vector<bool> one;
};
QualitativeSets qualitative_precompute(const Mdp& mdp, const std::vector<bool>& target, Opt opt);

enum class Method { TopologicalExact, ValueIteration };

struct ReachabilityResult {
  std::vector<double> values;
  /// Exact per-state values; only filled by the topological pass.
  std::vector<Rational> exact;
  Method method = Method::ValueIteration;
  std::size_t iterations = 0;
};

struct SolveOptions {
  double epsilon = 1e-10;
  std::size_t max_iterations = 1'000'000;
  /// Skip the exact topological pass even when the graph is acyclic.
  bool force_value_iteration = false;
};

/// Optimal reachability probabilities for every state. Exact-0/1 states are
/// pinned by the qualitative sets; the rest is solved exactly in reverse
/// topological order when the remaining subgraph is acyclic, otherwise by
/// value iteration from below until the sup-norm change drops under epsilon.
ReachabilityResult optimal_reachability(const Mdp& mdp, const std::vector<bool>& target, Opt opt,
                                        const SolveOptions& options = {});

struct CheckResult {
  double value = 0.0;
  std::optional<Rational> exact;
  std::uint32_t granularity = 1;
  std::size_t reachable_states = 0;
  std::size_t iterations = 0;
  Method method = Method::ValueIteration;
  double wall_ms = 0.0;
};

struct CheckOptions {
  std::size_t state_cap = 5'000'000;
  std::int64_t cap_slack = 0;
  SolveOptions solve;
};

/// Digitizes at granularity g, marks the states satisfying the query
/// proposition (and within the deadline, for bounded queries) as targets,
/// and solves.
CheckResult check(const ptp::Ptp& m, const PctlQuery& q, std::uint32_t granularity,
                  const CheckOptions& options = {});

/// Runs check at each granularity. Granularities must be strictly increasing
/// and each must divide the next, so every coarse-grid schedule stays
/// expressible and Pmax rises (Pmin falls) monotonically along the ladder.
std::vector<CheckResult> granularity_ladder(const ptp::Ptp& m, const PctlQuery& q,
                                            const std::vector<std::uint32_t>& granularities,
                                            const CheckOptions& options = {});

/// True iff the ladder is monotone in the direction the query demands.
bool ladder_monotone(const std::vector<CheckResult>& results, Opt opt);

}  // namespace timely::checker
