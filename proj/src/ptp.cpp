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

#include "timely/ptp.hpp"

#include <algorithm>
#include <limits>

#include "timely/errors.hpp"

namespace timely::ptp {

std::string to_string(ClockConstraint::Rel rel) {
  switch (rel) {
    case ClockConstraint::Rel::Lt: return "<";
    case ClockConstraint::Rel::Le: return "<=";
    case ClockConstraint::Rel::Gt: return ">";
    case ClockConstraint::Rel::Ge: return ">=";
  }
  return "?";
}

std::string to_string(Assertion::CmpOp op) {
  switch (op) {
    case Assertion::CmpOp::Eq: return "=";
    case Assertion::CmpOp::Ne: return "!=";
    case Assertion::CmpOp::Lt: return "<";
    case Assertion::CmpOp::Le: return "<=";
    case Assertion::CmpOp::Gt: return ">";
    case Assertion::CmpOp::Ge: return ">=";
  }
  return "?";
}

Assertion Assertion::compare(std::string var, CmpOp op, std::int64_t value) {
  Assertion a;
  a.op = Op::Cmp;
  a.cmp = op;
  a.left = std::move(var);
  a.rhs_const = value;
  return a;
}

Assertion Assertion::conjunction(std::vector<Assertion> parts) {
  if (parts.empty()) return truth();
  if (parts.size() == 1) return std::move(parts.front());
  Assertion a;
  a.op = Op::And;
  a.children = std::move(parts);
  return a;
}

namespace {

bool compare_ints(std::int64_t lhs, Assertion::CmpOp op, std::int64_t rhs) {
  switch (op) {
    case Assertion::CmpOp::Eq: return lhs == rhs;
    case Assertion::CmpOp::Ne: return lhs != rhs;
    case Assertion::CmpOp::Lt: return lhs < rhs;
    case Assertion::CmpOp::Le: return lhs <= rhs;
    case Assertion::CmpOp::Gt: return lhs > rhs;
    case Assertion::CmpOp::Ge: return lhs >= rhs;
  }
  return false;
}

std::int64_t lookup(const std::map<std::string, std::int64_t>& valuation, const std::string& name) {
  auto it = valuation.find(name);
  if (it == valuation.end()) throw Error("unknown variable '" + name + "' in expression");
  return it->second;
}

}  // namespace

bool Assertion::evaluate(const std::map<std::string, std::int64_t>& valuation) const {
  switch (op) {
    case Op::True: return true;
    case Op::Cmp: {
      std::int64_t lhs = lookup(valuation, left);
      std::int64_t rhs = rhs_is_var ? lookup(valuation, rhs_var) : rhs_const;
      return compare_ints(lhs, cmp, rhs);
    }
    case Op::And:
      return std::all_of(children.begin(), children.end(),
                         [&](const Assertion& c) { return c.evaluate(valuation); });
    case Op::Or:
      return std::any_of(children.begin(), children.end(),
                         [&](const Assertion& c) { return c.evaluate(valuation); });
    case Op::Not: return !children.front().evaluate(valuation);
  }
  return false;
}

void Assertion::collect_variables(std::set<std::string>& out) const {
  if (op == Op::Cmp) {
    out.insert(left);
    if (rhs_is_var) out.insert(rhs_var);
  }
  for (const auto& c : children) c.collect_variables(out);
}

std::int64_t LinearExpr::evaluate(const std::map<std::string, std::int64_t>& valuation) const {
  std::int64_t value = constant;
  for (const auto& [coef, var] : terms) value += coef * lookup(valuation, var);
  return value;
}

int Ptp::location_index(const std::string& name) const {
  auto it = std::find(locations.begin(), locations.end(), name);
  return it == locations.end() ? -1 : static_cast<int>(it - locations.begin());
}

const Zone& Ptp::invariant_of(int location) const {
  static const Zone universal;
  auto it = invariants.find(location);
  return it == invariants.end() ? universal : it->second;
}

bool zone_satisfied(const Zone& z, const std::map<std::string, double>& valuation) {
  auto value = [&](const std::string& clock) {
    auto it = valuation.find(clock);
    if (it == valuation.end()) throw Error("unknown clock '" + clock + "' in valuation");
    return it->second;
  };
  for (const auto& c : z.constraints) {
    double lhs = value(c.left) - (c.right ? value(*c.right) : 0.0);
    auto bound = static_cast<double>(c.bound);
    bool ok = false;
    switch (c.rel) {
      case ClockConstraint::Rel::Lt: ok = lhs < bound; break;
      case ClockConstraint::Rel::Le: ok = lhs <= bound; break;
      case ClockConstraint::Rel::Gt: ok = lhs > bound; break;
      case ClockConstraint::Rel::Ge: ok = lhs >= bound; break;
    }
    if (!ok) return false;
  }
  return true;
}

namespace {

// Bound with strictness, ordered so that (b, strict) < (b, non-strict).
struct Bound {
  std::int64_t value;
  bool strict;

  bool operator<(const Bound& o) const {
    return value < o.value || (value == o.value && strict && !o.strict);
  }
  Bound operator+(const Bound& o) const { return {value + o.value, strict || o.strict}; }
};

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

}  // namespace

bool zone_nonempty(const Zone& z) {
  // Collect the clock universe; index 0 is the constant-zero reference.
  std::vector<std::string> clocks;
  auto index_of = [&](const std::string& name) {
    auto it = std::find(clocks.begin(), clocks.end(), name);
    if (it == clocks.end()) {
      clocks.push_back(name);
      return static_cast<int>(clocks.size());
    }
    return static_cast<int>(it - clocks.begin()) + 1;
  };
  for (const auto& c : z.constraints) {
    index_of(c.left);
    if (c.right) index_of(*c.right);
  }
  const int n = static_cast<int>(clocks.size()) + 1;

  // d[i][j] bounds t_i - t_j; tighten with all-pairs shortest paths and
  // report empty on a negative (or zero-but-strict) cycle.
  std::vector<std::vector<Bound>> d(n, std::vector<Bound>(n, Bound{kInf, false}));
  for (int i = 0; i < n; ++i) d[i][i] = {0, false};
  auto tighten = [&](int i, int j, Bound b) {
    if (b < d[i][j]) d[i][j] = b;
  };
  for (int i = 1; i < n; ++i) tighten(0, i, {0, false});  // clocks are nonnegative

  for (const auto& c : z.constraints) {
    int i = index_of(c.left);
    int j = c.right ? index_of(*c.right) : 0;
    switch (c.rel) {
      case ClockConstraint::Rel::Lt: tighten(i, j, {c.bound, true}); break;
      case ClockConstraint::Rel::Le: tighten(i, j, {c.bound, false}); break;
      case ClockConstraint::Rel::Gt: tighten(j, i, {-c.bound, true}); break;
      case ClockConstraint::Rel::Ge: tighten(j, i, {-c.bound, false}); break;
    }
  }

  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (d[i][k].value >= kInf || d[k][j].value >= kInf) continue;
        tighten(i, j, d[i][k] + d[k][j]);
      }

  for (int i = 0; i < n; ++i)
    if (d[i][i] < Bound{0, false}) return false;
  return true;
}

std::map<std::string, std::int64_t> clock_ceilings(const Ptp& m) {
  std::map<std::string, std::int64_t> ceilings;
  for (const auto& clock : m.clocks) ceilings[clock] = 0;
  auto absorb = [&](const Zone& z) {
    for (const auto& c : z.constraints) {
      std::int64_t mag = c.bound < 0 ? -c.bound : c.bound;
      auto bump = [&](const std::string& clock) {
        auto it = ceilings.find(clock);
        if (it != ceilings.end()) it->second = std::max(it->second, mag);
      };
      bump(c.left);
      if (c.right) bump(*c.right);
    }
  };
  for (const auto& [loc, zone] : m.invariants) absorb(zone);
  for (const auto& t : m.transitions) absorb(t.enabling);
  return ceilings;
}

namespace {

void check_zone(const Ptp& m, const Zone& z, const std::string& where,
                std::vector<Diagnostic>& diags) {
  for (const auto& c : z.constraints) {
    auto known = [&](const std::string& clock) {
      return std::find(m.clocks.begin(), m.clocks.end(), clock) != m.clocks.end();
    };
    if (!known(c.left))
      diags.push_back({"UnknownClock", where, "clock '" + c.left + "' not declared"});
    if (c.right && !known(*c.right))
      diags.push_back({"UnknownClock", where, "clock '" + *c.right + "' not declared"});
    if (!c.right && c.bound < 0)
      diags.push_back({"NegativeBound", where,
                       "single-clock constraint has negative bound " + std::to_string(c.bound)});
  }
}

void check_assertion_vars(const Ptp& m, const Assertion& a, const std::string& where,
                          std::vector<Diagnostic>& diags) {
  std::set<std::string> used;
  a.collect_variables(used);
  for (const auto& v : used) {
    bool declared = std::any_of(m.variables.begin(), m.variables.end(),
                                [&](const VariableDecl& d) { return d.name == v; });
    if (!declared)
      diags.push_back({"UnknownVariable", where, "variable '" + v + "' not declared"});
  }
}

}  // namespace

std::vector<Diagnostic> validate_ptp(const Ptp& m) {
  std::vector<Diagnostic> diags;
  auto add = [&](const std::string& code, const std::string& element, const std::string& msg) {
    diags.push_back({code, element, msg});
  };

  if (m.locations.empty()) {
    add("NoLocations", "model", "model has no locations");
    return diags;
  }
  if (m.initial < 0 || m.initial >= static_cast<int>(m.locations.size()))
    add("UnknownLocation", "initial", "initial location index out of range");

  for (std::size_t i = 0; i < m.locations.size(); ++i)
    for (std::size_t j = i + 1; j < m.locations.size(); ++j)
      if (m.locations[i] == m.locations[j])
        add("DuplicateLocation", m.locations[i], "location name used twice");
  for (std::size_t i = 0; i < m.clocks.size(); ++i)
    for (std::size_t j = i + 1; j < m.clocks.size(); ++j)
      if (m.clocks[i] == m.clocks[j]) add("DuplicateClock", m.clocks[i], "clock declared twice");

  std::map<std::string, const VariableDecl*> vars;
  for (const auto& v : m.variables) {
    if (!vars.emplace(v.name, &v).second)
      add("DuplicateVariable", v.name, "variable declared twice");
    if (v.lo > v.hi)
      add("EmptyRange", v.name, "range lo..hi is empty");
  }
  for (const auto& [name, value] : m.initial_valuation) {
    auto it = vars.find(name);
    if (it == vars.end()) {
      add("UnknownVariable", name, "initial valuation for undeclared variable");
    } else if (value < it->second->lo || value > it->second->hi) {
      add("InitOutOfRange", name, "initial value " + std::to_string(value) + " outside range");
    }
  }
  for (const auto& v : m.variables)
    if (!m.initial_valuation.count(v.name))
      add("MissingInit", v.name, "variable has no initial value");

  for (const auto& [loc, zone] : m.invariants) {
    if (loc < 0 || loc >= static_cast<int>(m.locations.size())) {
      add("UnknownLocation", "invariant", "invariant attached to unknown location");
      continue;
    }
    check_zone(m, zone, "invariant(" + m.locations[loc] + ")", diags);
  }

  for (std::size_t ti = 0; ti < m.transitions.size(); ++ti) {
    const auto& t = m.transitions[ti];
    const std::string where = "transition[" + std::to_string(ti) + "]";
    if (t.source < 0 || t.source >= static_cast<int>(m.locations.size()))
      add("UnknownLocation", where, "source location index out of range");
    check_assertion_vars(m, t.guard, where, diags);
    check_zone(m, t.enabling, where, diags);
    if (t.outcomes.empty()) {
      add("EmptyOutcomes", where, "transition has no outcomes");
      continue;
    }
    Rational sum = 0;
    for (std::size_t oi = 0; oi < t.outcomes.size(); ++oi) {
      const auto& o = t.outcomes[oi];
      const std::string owhere = where + ".outcome[" + std::to_string(oi) + "]";
      if (o.weight <= 0 || o.weight > 1)
        add("WeightOutOfRange", owhere, "weight " + rational_to_string(o.weight) +
                                            " outside (0,1]");
      sum += o.weight;
      if (o.target < 0 || o.target >= static_cast<int>(m.locations.size()))
        add("UnknownLocation", owhere, "target location index out of range");
      for (const auto& r : o.resets)
        if (std::find(m.clocks.begin(), m.clocks.end(), r) == m.clocks.end())
          add("UnknownClock", owhere, "reset of undeclared clock '" + r + "'");
      for (const auto& [var, expr] : o.update) {
        auto it = vars.find(var);
        if (it == vars.end()) {
          add("UnknownVariable", owhere, "update of undeclared variable '" + var + "'");
          continue;
        }
        for (const auto& [coef, term_var] : expr.terms)
          if (!vars.count(term_var))
            add("UnknownVariable", owhere, "update uses undeclared variable '" + term_var + "'");
        if (expr.is_constant() &&
            (expr.constant < it->second->lo || expr.constant > it->second->hi))
          add("UpdateOutOfRange", owhere,
              "constant update " + std::to_string(expr.constant) + " outside range of '" + var +
                  "'");
      }
    }
    if (sum != 1)
      add("WeightsSumTo", where, "outcome weights sum to " + rational_to_string(sum));
  }

  for (const auto& [label, locs] : m.labels)
    for (int loc : locs)
      if (loc < 0 || loc >= static_cast<int>(m.locations.size()))
        add("UnknownLocation", "label " + label, "label names unknown location");

  // The all-zero clock valuation must satisfy the initial invariant.
  if (m.initial >= 0 && m.initial < static_cast<int>(m.locations.size())) {
    std::map<std::string, double> zeros;
    for (const auto& c : m.clocks) zeros[c] = 0.0;
    bool ok = true;
    try {
      ok = zone_satisfied(m.invariant_of(m.initial), zeros);
    } catch (const Error&) {
      ok = false;  // unknown clock already reported
    }
    if (!ok)
      add("InitialInvariantViolated", m.locations[m.initial],
          "all-zero clock valuation violates the initial location invariant");
  }

  return diags;
}

std::vector<Diagnostic> lint_ptp(const Ptp& m) {
  std::vector<Diagnostic> diags;
  for (std::size_t ti = 0; ti < m.transitions.size(); ++ti) {
    const auto& t = m.transitions[ti];
    for (std::size_t oi = 0; oi < t.outcomes.size(); ++oi) {
      const auto& o = t.outcomes[oi];
      if (o.target < 0 || o.target >= static_cast<int>(m.locations.size())) continue;
      Zone probe = m.invariant_of(o.target);
      for (const auto& r : o.resets) {
        probe.constraints.push_back({r, std::nullopt, ClockConstraint::Rel::Le, 0});
        probe.constraints.push_back({r, std::nullopt, ClockConstraint::Rel::Ge, 0});
      }
      if (!zone_nonempty(probe))
        diags.push_back({"OutcomeNeverEnabled",
                         "transition[" + std::to_string(ti) + "].outcome[" + std::to_string(oi) +
                             "]",
                         "resets can never satisfy the target invariant"});
    }
  }
  return diags;
}

}  // namespace timely::ptp
