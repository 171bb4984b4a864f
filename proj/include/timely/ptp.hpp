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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "timely/diagnostics.hpp"
#include "timely/rational.hpp"

namespace timely::ptp {

/// One clock constraint: `left rel bound`, or `left - right rel bound` for a
/// difference constraint. Bounds are integers in model time units; rational
/// timing data is brought to integers upstream by the histogram unit.
struct ClockConstraint {
  enum class Rel { Lt, Le, Gt, Ge };

  std::string left;
  std::optional<std::string> right;
  Rel rel = Rel::Le;
  std::int64_t bound = 0;

  bool operator==(const ClockConstraint&) const = default;
};

std::string to_string(ClockConstraint::Rel rel);

/// Convex set of clock valuations; the empty constraint list is the
/// universal zone.
struct Zone {
  std::vector<ClockConstraint> constraints;

  bool universal() const { return constraints.empty(); }
  bool operator==(const Zone&) const = default;
};

/// Boolean expression over integer state variables. Comparisons are against
/// integer constants or other variables; clocks never appear here.
struct Assertion {
  enum class Op { True, Cmp, And, Or, Not };
  enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

  Op op = Op::True;
  CmpOp cmp = CmpOp::Eq;
  std::string left;
  bool rhs_is_var = false;
  std::string rhs_var;
  std::int64_t rhs_const = 0;
  std::vector<Assertion> children;

  static Assertion truth() { return {}; }
  static Assertion compare(std::string var, CmpOp op, std::int64_t value);
  static Assertion conjunction(std::vector<Assertion> parts);

  bool is_true() const { return op == Op::True; }
  bool evaluate(const std::map<std::string, std::int64_t>& valuation) const;
  void collect_variables(std::set<std::string>& out) const;
};

std::string to_string(Assertion::CmpOp op);

/// Affine integer expression: constant + sum of coef*variable terms.
struct LinearExpr {
  std::int64_t constant = 0;
  std::vector<std::pair<std::int64_t, std::string>> terms;

  bool is_constant() const { return terms.empty(); }
  std::int64_t evaluate(const std::map<std::string, std::int64_t>& valuation) const;
  bool operator==(const LinearExpr&) const = default;
};

/// Variable assignments applied by a transition outcome.
using Assignment = std::map<std::string, LinearExpr>;

struct Outcome {
  Rational weight;
  Assignment update;
  std::set<std::string> resets;
  int target = 0;
};

/// Probabilistic edge: fires from `source` when the guard holds on the
/// variables and the enabling zone holds on the clocks, then picks an
/// outcome at random.
struct Transition {
  int source = 0;
  Assertion guard;
  Zone enabling;
  std::vector<Outcome> outcomes;
};

struct VariableDecl {
  std::string name;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// A probabilistic timed program: finite locations with zone invariants,
/// real-valued clocks, bounded integer state variables, and probabilistic
/// guarded transitions. Immutable once built; all evaluation is pure.
struct Ptp {
  std::vector<std::string> locations;
  int initial = 0;
  std::vector<std::string> clocks;
  std::map<int, Zone> invariants;  // missing entry = universal
  std::vector<VariableDecl> variables;
  std::map<std::string, std::int64_t> initial_valuation;
  std::vector<Transition> transitions;
  /// Proposition labels for queries, e.g. "Success" -> {5}.
  std::map<std::string, std::set<int>> labels;

  /// Index of a location by display name; -1 if absent.
  int location_index(const std::string& name) const;
  const Zone& invariant_of(int location) const;
};

/// Empty result iff the model is well-formed. Each violation names the
/// offending element path.
std::vector<Diagnostic> validate_ptp(const Ptp& m);

/// Warns about transition outcomes whose clock resets can never satisfy the
/// target location's invariant, i.e. outcomes that are disabled everywhere.
std::vector<Diagnostic> lint_ptp(const Ptp& m);

/// True iff the valuation satisfies every constraint (strictness honored).
bool zone_satisfied(const Zone& z, const std::map<std::string, double>& valuation);

/// True iff some nonnegative clock valuation satisfies the zone. Decided by
/// shortest-path tightening of the difference-bound constraint graph with
/// strictness tracking.
bool zone_nonempty(const Zone& z);

/// Largest absolute constant each clock is compared against, across all
/// invariants and enabling zones; 0 for never-constrained clocks.
std::map<std::string, std::int64_t> clock_ceilings(const Ptp& m);

}  // namespace timely::ptp
