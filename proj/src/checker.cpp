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

#include "timely/checker.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <unordered_map>

#include "timely/errors.hpp"

namespace timely::checker {

// ---------------------------------------------------------------------------
// Query parsing
// ---------------------------------------------------------------------------

namespace {

struct Lexer {
  std::string text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  bool peek_symbol(const std::string& sym) {
    skip_ws();
    return text.compare(pos, sym.size(), sym) == 0;
  }
  bool accept_symbol(const std::string& sym) {
    if (!peek_symbol(sym)) return false;
    pos += sym.size();
    return true;
  }
  void expect_symbol(const std::string& sym) {
    if (!accept_symbol(sym)) throw ParseError("query: expected '" + sym + "' at offset " +
                                              std::to_string(pos));
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }
  std::int64_t integer() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && text[pos] == '-') ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw ParseError("query: expected an integer at offset " +
                                       std::to_string(start));
    return std::stoll(text.substr(start, pos - start));
  }
  std::string quoted() {
    skip_ws();
    if (pos >= text.size() || text[pos] != '"')
      throw ParseError("query: expected a quoted label at offset " + std::to_string(pos));
    ++pos;
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != '"') ++pos;
    if (pos >= text.size()) throw ParseError("query: unterminated label string");
    std::string out = text.substr(start, pos - start);
    ++pos;
    return out;
  }
};

ptp::Assertion::CmpOp parse_relop(Lexer& lex) {
  for (const auto& [sym, op] :
       {std::pair<const char*, ptp::Assertion::CmpOp>{"<=", ptp::Assertion::CmpOp::Le},
        {">=", ptp::Assertion::CmpOp::Ge},
        {"!=", ptp::Assertion::CmpOp::Ne},
        {"<", ptp::Assertion::CmpOp::Lt},
        {">", ptp::Assertion::CmpOp::Gt},
        {"=", ptp::Assertion::CmpOp::Eq}}) {
    if (lex.accept_symbol(sym)) return op;
  }
  throw ParseError("query: expected a comparison operator at offset " + std::to_string(lex.pos));
}

Prop parse_or(Lexer& lex);

Prop parse_atom(Lexer& lex) {
  if (lex.peek_symbol("\"")) {
    Prop p;
    p.kind = Prop::Kind::Label;
    p.label = lex.quoted();
    return p;
  }
  if (lex.accept_symbol("(")) {
    Prop p = parse_or(lex);
    lex.expect_symbol(")");
    return p;
  }
  Prop p;
  p.kind = Prop::Kind::Cmp;
  p.var = lex.ident();
  if (p.var.empty())
    throw ParseError("query: expected a label or variable comparison at offset " +
                     std::to_string(lex.pos));
  p.cmp = parse_relop(lex);
  p.value = lex.integer();
  return p;
}

Prop parse_and(Lexer& lex) {
  Prop first = parse_atom(lex);
  if (!lex.peek_symbol("&")) return first;
  Prop p;
  p.kind = Prop::Kind::And;
  p.children.push_back(std::move(first));
  while (lex.accept_symbol("&")) p.children.push_back(parse_atom(lex));
  return p;
}

Prop parse_or(Lexer& lex) {
  Prop first = parse_and(lex);
  if (!lex.peek_symbol("|")) return first;
  Prop p;
  p.kind = Prop::Kind::Or;
  p.children.push_back(std::move(first));
  while (lex.accept_symbol("|")) p.children.push_back(parse_and(lex));
  return p;
}

}  // namespace

PctlQuery parse_query(const std::string& text) {
  Lexer lex{text};
  PctlQuery q;
  std::string head = lex.ident();
  bool bare_p = head == "P";
  if (head == "Pmax") {
    q.opt = Opt::Max;
  } else if (head == "Pmin") {
    q.opt = Opt::Min;
  } else if (!bare_p) {
    throw ParseError("query: must start with Pmax or Pmin");
  }
  lex.expect_symbol("=?");
  lex.expect_symbol("[");
  std::string op = lex.ident();
  if (op != "F") throw ParseError("query: only F and F<=T supported");
  if (bare_p) throw ParseError("query: must start with Pmax or Pmin");
  if (lex.accept_symbol("<=")) {
    std::int64_t bound = lex.integer();
    if (bound < 0) throw ParseError("query: time bound must be nonnegative");
    q.bound = bound;
  }
  q.prop = parse_or(lex);
  lex.expect_symbol("]");
  if (!lex.eof()) throw ParseError("query: trailing input after ']'");
  return q;
}

// ---------------------------------------------------------------------------
// Digitization
// ---------------------------------------------------------------------------

namespace {

struct StateHash {
  std::size_t operator()(const DigitizedState& s) const {
    std::size_t h = std::hash<std::int64_t>()(s.location) * 0x9e3779b97f4a7c15ULL;
    auto mix = [&](std::int64_t v) {
      h ^= std::hash<std::int64_t>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    for (auto v : s.vars) mix(v);
    for (auto v : s.ticks) mix(v);
    mix(s.elapsed);
    return h;
  }
};

struct ScaledConstraint {
  int clock = 0;
  ptp::ClockConstraint::Rel rel = ptp::ClockConstraint::Rel::Le;
  std::int64_t bound = 0;  // already multiplied by the granularity

  bool holds(const std::vector<std::int64_t>& ticks) const {
    std::int64_t v = ticks[clock];
    switch (rel) {
      case ptp::ClockConstraint::Rel::Lt: return v < bound;
      case ptp::ClockConstraint::Rel::Le: return v <= bound;
      case ptp::ClockConstraint::Rel::Gt: return v > bound;
      case ptp::ClockConstraint::Rel::Ge: return v >= bound;
    }
    return false;
  }
};

using ScaledZone = std::vector<ScaledConstraint>;

bool zone_holds(const ScaledZone& z, const std::vector<std::int64_t>& ticks) {
  return std::all_of(z.begin(), z.end(),
                     [&](const ScaledConstraint& c) { return c.holds(ticks); });
}

struct CompiledUpdate {
  int var = 0;
  std::int64_t constant = 0;
  std::vector<std::pair<std::int64_t, int>> terms;
};

struct CompiledOutcome {
  Rational prob;
  double prob_d = 0.0;
  std::vector<CompiledUpdate> updates;
  std::vector<int> resets;
  std::int32_t target = 0;
};

struct CompiledTransition {
  std::int32_t id = 0;
  std::int32_t source = 0;
  const ptp::Assertion* guard = nullptr;
  ScaledZone enabling;
  std::vector<CompiledOutcome> outcomes;
};

class Digitizer {
 public:
  Digitizer(const ptp::Ptp& m, const DigitizeOptions& opts) : model_(m), opts_(opts) {
    for (std::size_t i = 0; i < m.clocks.size(); ++i) clock_index_[m.clocks[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < m.variables.size(); ++i)
      var_index_[m.variables[i].name] = static_cast<int>(i);
  }

  Mdp run() {
    compile();
    Mdp mdp;
    mdp.granularity = opts_.granularity;
    mdp.bound = opts_.bound;

    DigitizedState init;
    init.location = static_cast<std::int32_t>(model_.initial);
    for (const auto& v : model_.variables) init.vars.push_back(model_.initial_valuation.at(v.name));
    init.ticks.assign(model_.clocks.size(), 0);
    init.elapsed = opts_.bound ? 0 : -1;

    std::unordered_map<DigitizedState, std::uint32_t, StateHash> index;
    auto intern = [&](const DigitizedState& s) {
      auto it = index.find(s);
      if (it != index.end()) return it->second;
      auto id = static_cast<std::uint32_t>(mdp.states.size());
      if (mdp.states.size() >= opts_.state_cap)
        throw ResourceError("state-space cap exceeded at " + std::to_string(mdp.states.size()) +
                            " states");
      index.emplace(s, id);
      mdp.states.push_back(s);
      return id;
    };

    mdp.initial = intern(init);
    for (std::uint32_t cursor = 0; cursor < mdp.states.size(); ++cursor) {
      // states grows while we iterate; copy the current state.
      DigitizedState s = mdp.states[cursor];
      std::vector<Mdp::Action> actions;

      // (a) tick: advance every clock and the elapsed counter, saturating.
      DigitizedState ticked = s;
      for (std::size_t c = 0; c < ticked.ticks.size(); ++c)
        ticked.ticks[c] = std::min(ticked.ticks[c] + 1, caps_[c]);
      if (opts_.bound) ticked.elapsed = std::min(ticked.elapsed + 1, elapsed_cap_);
      if (zone_holds(invariants_[s.location], ticked.ticks)) {
        Mdp::Action tick;
        tick.id = -1;
        tick.outcomes.push_back({Rational(1), 1.0, intern(ticked)});
        actions.push_back(std::move(tick));
      }

      // (b) transitions whose guard and enabling hold; every outcome must
      // land inside its target invariant or the whole transition is
      // disabled at this instant.
      for (const auto& t : by_source_[s.location]) {
        if (!guard_holds(*t->guard, s.vars)) continue;
        if (!zone_holds(t->enabling, s.ticks)) continue;

        std::vector<DigitizedState> succs;
        succs.reserve(t->outcomes.size());
        bool enabled = true;
        for (const auto& o : t->outcomes) {
          DigitizedState next = s;
          next.location = o.target;
          apply_updates(o, next.vars);
          for (int c : o.resets) next.ticks[c] = 0;
          if (!zone_holds(invariants_[o.target], next.ticks)) {
            enabled = false;
            break;
          }
          succs.push_back(std::move(next));
        }
        if (!enabled) continue;

        Mdp::Action action;
        action.id = t->id;
        for (std::size_t i = 0; i < t->outcomes.size(); ++i) {
          std::uint32_t succ = intern(succs[i]);
          auto dup = std::find_if(action.outcomes.begin(), action.outcomes.end(),
                                  [&](const Mdp::Outcome& o) { return o.target == succ; });
          if (dup != action.outcomes.end()) {
            dup->prob += t->outcomes[i].prob;
            dup->prob_d = to_double(dup->prob);
          } else {
            action.outcomes.push_back({t->outcomes[i].prob, t->outcomes[i].prob_d, succ});
          }
        }
        actions.push_back(std::move(action));
      }

      mdp.actions.push_back(std::move(actions));
    }
    return mdp;
  }

 private:
  void compile() {
    const auto g = static_cast<std::int64_t>(opts_.granularity);
    auto ceilings = ptp::clock_ceilings(model_);
    caps_.clear();
    for (const auto& clock : model_.clocks)
      caps_.push_back(ceilings.at(clock) * g + 1 + opts_.cap_slack);
    if (opts_.bound) elapsed_cap_ = *opts_.bound * g + 1;

    auto scale_zone = [&](const ptp::Zone& z, const std::string& where) {
      ScaledZone out;
      for (const auto& c : z.constraints) {
        if (c.right)
          throw Error("digitization does not support clock-difference constraints (" + where +
                      ")");
        out.push_back({clock_index_.at(c.left), c.rel, c.bound * g});
      }
      return out;
    };

    invariants_.clear();
    for (std::size_t l = 0; l < model_.locations.size(); ++l)
      invariants_.push_back(
          scale_zone(model_.invariant_of(static_cast<int>(l)), "invariant of " + model_.locations[l]));

    transitions_.clear();
    by_source_.assign(model_.locations.size(), {});
    for (std::size_t ti = 0; ti < model_.transitions.size(); ++ti) {
      const auto& t = model_.transitions[ti];
      CompiledTransition ct;
      ct.id = static_cast<std::int32_t>(ti);
      ct.source = t.source;
      ct.guard = &t.guard;
      ct.enabling = scale_zone(t.enabling, "transition " + std::to_string(ti));
      for (const auto& o : t.outcomes) {
        CompiledOutcome co;
        co.prob = o.weight;
        co.prob_d = to_double(o.weight);
        co.target = o.target;
        for (const auto& r : o.resets) co.resets.push_back(clock_index_.at(r));
        for (const auto& [var, expr] : o.update) {
          CompiledUpdate cu;
          cu.var = var_index_.at(var);
          cu.constant = expr.constant;
          for (const auto& [coef, term_var] : expr.terms)
            cu.terms.emplace_back(coef, var_index_.at(term_var));
          co.updates.push_back(std::move(cu));
        }
        ct.outcomes.push_back(std::move(co));
      }
      transitions_.push_back(std::move(ct));
    }
    for (const auto& t : transitions_) by_source_[t.source].push_back(&t);
  }

  bool guard_holds(const ptp::Assertion& a, const std::vector<std::int64_t>& vars) const {
    using Op = ptp::Assertion::Op;
    switch (a.op) {
      case Op::True: return true;
      case Op::Cmp: {
        std::int64_t lhs = vars[var_index_.at(a.left)];
        std::int64_t rhs = a.rhs_is_var ? vars[var_index_.at(a.rhs_var)] : a.rhs_const;
        switch (a.cmp) {
          case ptp::Assertion::CmpOp::Eq: return lhs == rhs;
          case ptp::Assertion::CmpOp::Ne: return lhs != rhs;
          case ptp::Assertion::CmpOp::Lt: return lhs < rhs;
          case ptp::Assertion::CmpOp::Le: return lhs <= rhs;
          case ptp::Assertion::CmpOp::Gt: return lhs > rhs;
          case ptp::Assertion::CmpOp::Ge: return lhs >= rhs;
        }
        return false;
      }
      case Op::And:
        return std::all_of(a.children.begin(), a.children.end(),
                           [&](const ptp::Assertion& c) { return guard_holds(c, vars); });
      case Op::Or:
        return std::any_of(a.children.begin(), a.children.end(),
                           [&](const ptp::Assertion& c) { return guard_holds(c, vars); });
      case Op::Not: return !guard_holds(a.children.front(), vars);
    }
    return false;
  }

  void apply_updates(const CompiledOutcome& o, std::vector<std::int64_t>& vars) const {
    if (o.updates.empty()) return;
    const std::vector<std::int64_t> before = vars;
    for (const auto& u : o.updates) {
      std::int64_t value = u.constant;
      for (const auto& [coef, idx] : u.terms) value += coef * before[idx];
      const auto& decl = model_.variables[u.var];
      if (value < decl.lo || value > decl.hi)
        throw Error("update drives variable '" + decl.name + "' to " + std::to_string(value) +
                    ", outside its range " + std::to_string(decl.lo) + ".." +
                    std::to_string(decl.hi));
      vars[u.var] = value;
    }
  }

  const ptp::Ptp& model_;
  DigitizeOptions opts_;
  std::map<std::string, int> clock_index_;
  std::map<std::string, int> var_index_;
  std::vector<std::int64_t> caps_;
  std::int64_t elapsed_cap_ = 0;
  std::vector<ScaledZone> invariants_;
  std::vector<CompiledTransition> transitions_;
  std::vector<std::vector<const CompiledTransition*>> by_source_;
};

}  // namespace

Mdp digitize(const ptp::Ptp& m, const DigitizeOptions& options) {
  auto diags = validate_ptp(m);
  if (!diags.empty()) throw Error("invalid model:\n" + join_diagnostics(diags));
  if (options.granularity == 0) throw Error("granularity must be positive");
  return Digitizer(m, options).run();
}

// ---------------------------------------------------------------------------
// Qualitative precomputation
// ---------------------------------------------------------------------------

namespace {

// Flattened action/outcome graph with target states made absorbing, shared
// by the worklist fixed points below.
struct FlatGraph {
  std::vector<std::uint32_t> action_owner;                     // action -> state
  std::vector<std::pair<std::uint32_t, std::uint32_t>> range;  // action -> [begin,end)
  std::vector<std::uint32_t> edge_target;
  std::vector<std::vector<std::uint32_t>> pred_actions;  // state -> actions hitting it
  std::vector<std::uint32_t> action_count;               // per state (0 for targets)

  FlatGraph(const Mdp& mdp, const std::vector<bool>& target) {
    const std::size_t n = mdp.states.size();
    pred_actions.resize(n);
    action_count.assign(n, 0);
    for (std::uint32_t s = 0; s < n; ++s) {
      if (target[s]) continue;
      action_count[s] = static_cast<std::uint32_t>(mdp.actions[s].size());
      for (const auto& a : mdp.actions[s]) {
        auto id = static_cast<std::uint32_t>(action_owner.size());
        action_owner.push_back(s);
        auto begin = static_cast<std::uint32_t>(edge_target.size());
        for (const auto& o : a.outcomes) {
          edge_target.push_back(o.target);
          pred_actions[o.target].push_back(id);
        }
        range.emplace_back(begin, static_cast<std::uint32_t>(edge_target.size()));
      }
    }
  }

  std::size_t actions() const { return action_owner.size(); }
};

std::vector<bool> backward_reachable(const FlatGraph& g, std::size_t n,
                                     const std::vector<bool>& seeds,
                                     const std::vector<bool>& target, bool through_target) {
  std::vector<bool> reached(n, false);
  std::deque<std::uint32_t> frontier;
  for (std::uint32_t s = 0; s < n; ++s)
    if (seeds[s]) {
      reached[s] = true;
      frontier.push_back(s);
    }
  while (!frontier.empty()) {
    std::uint32_t s = frontier.front();
    frontier.pop_front();
    for (std::uint32_t a : g.pred_actions[s]) {
      std::uint32_t p = g.action_owner[a];
      if (reached[p]) continue;
      if (!through_target && target[p]) continue;
      reached[p] = true;
      frontier.push_back(p);
    }
  }
  return reached;
}

// Greatest set of non-target states from which some scheduler can avoid the
// target forever (deadlock states avoid it trivially). Worklist over
// per-action counters of outcomes that escape the set.
std::vector<bool> min_zero_set(const Mdp& mdp, const FlatGraph& g,
                               const std::vector<bool>& target) {
  const std::size_t n = mdp.states.size();
  std::vector<bool> avoid(n);
  for (std::size_t s = 0; s < n; ++s) avoid[s] = !target[s];

  std::vector<std::uint32_t> escaped(g.actions(), 0);  // outcomes outside avoid
  std::vector<std::uint32_t> safe_actions(n, 0);
  for (std::uint32_t a = 0; a < g.actions(); ++a) {
    for (std::uint32_t e = g.range[a].first; e < g.range[a].second; ++e)
      if (!avoid[g.edge_target[e]]) ++escaped[a];
    if (escaped[a] == 0) ++safe_actions[g.action_owner[a]];
  }

  std::deque<std::uint32_t> worklist;
  for (std::uint32_t s = 0; s < n; ++s)
    if (avoid[s] && g.action_count[s] > 0 && safe_actions[s] == 0) worklist.push_back(s);

  while (!worklist.empty()) {
    std::uint32_t s = worklist.front();
    worklist.pop_front();
    if (!avoid[s]) continue;
    avoid[s] = false;
    for (std::uint32_t a : g.pred_actions[s]) {
      if (++escaped[a] > 1) continue;  // action already unsafe
      std::uint32_t p = g.action_owner[a];
      if (avoid[p] && --safe_actions[p] == 0 && g.action_count[p] > 0) worklist.push_back(p);
    }
  }
  return avoid;
}

// States where the maximizing scheduler reaches the target almost surely:
// greatest X such that every state of X has an action staying inside X with
// some outcome one step closer to the target.
std::vector<bool> max_one_set(const Mdp& mdp, const FlatGraph& g,
                              const std::vector<bool>& target) {
  const std::size_t n = mdp.states.size();
  std::vector<bool> x(n, true);
  while (true) {
    std::vector<std::uint32_t> outside_x(g.actions(), 0);
    for (std::uint32_t a = 0; a < g.actions(); ++a)
      for (std::uint32_t e = g.range[a].first; e < g.range[a].second; ++e)
        if (!x[g.edge_target[e]]) ++outside_x[a];

    std::vector<bool> y(n, false);
    std::deque<std::uint32_t> frontier;
    for (std::uint32_t s = 0; s < n; ++s)
      if (target[s]) {
        y[s] = true;
        frontier.push_back(s);
      }
    while (!frontier.empty()) {
      std::uint32_t t = frontier.front();
      frontier.pop_front();
      for (std::uint32_t a : g.pred_actions[t]) {
        if (outside_x[a] > 0) continue;
        std::uint32_t s = g.action_owner[a];
        if (!y[s]) {
          y[s] = true;
          frontier.push_back(s);
        }
      }
    }
    if (y == x) return x;
    x = std::move(y);
  }
}

}  // namespace

QualitativeSets qualitative_precompute(const Mdp& mdp, const std::vector<bool>& target, Opt opt) {
  const std::size_t n = mdp.states.size();
  FlatGraph g(mdp, target);
  QualitativeSets sets;
  sets.zero.assign(n, false);
  sets.one.assign(n, false);

  if (opt == Opt::Max) {
    auto can_reach = backward_reachable(g, n, target, target, /*through_target=*/true);
    for (std::size_t s = 0; s < n; ++s) sets.zero[s] = !can_reach[s];
    sets.one = max_one_set(mdp, g, target);
  } else {
    sets.zero = min_zero_set(mdp, g, target);
    // Pmin < 1 exactly where some scheduler reaches the avoid-set with
    // positive probability without passing the target first.
    auto below_one = backward_reachable(g, n, sets.zero, target, /*through_target=*/false);
    for (std::size_t s = 0; s < n; ++s) sets.one[s] = !below_one[s];
  }
  return sets;
}

// ---------------------------------------------------------------------------
// Optimal reachability
// ---------------------------------------------------------------------------

ReachabilityResult optimal_reachability(const Mdp& mdp, const std::vector<bool>& target, Opt opt,
                                        const SolveOptions& options) {
  if (options.epsilon <= 0) throw Error("epsilon must be positive");
  const std::size_t n = mdp.states.size();
  auto sets = qualitative_precompute(mdp, target, opt);

  ReachabilityResult result;
  result.values.assign(n, 0.0);
  std::vector<std::uint32_t> rest;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (sets.one[s])
      result.values[s] = 1.0;
    else if (!sets.zero[s])
      rest.push_back(s);
  }
  if (rest.empty()) {
    result.method = Method::TopologicalExact;
    result.exact.assign(n, Rational(0));
    for (std::size_t s = 0; s < n; ++s)
      if (sets.one[s]) result.exact[s] = 1;
    return result;
  }

  std::vector<bool> in_rest(n, false);
  for (auto s : rest) in_rest[s] = true;

  // Try a topological order of the undetermined subgraph (targets are
  // absorbing, zero/one states act as constants).
  std::vector<std::uint32_t> order;
  bool acyclic = false;
  if (!options.force_value_iteration) {
    std::unordered_map<std::uint32_t, std::uint32_t> out_degree;
    std::vector<std::vector<std::uint32_t>> rest_pred(n);
    for (auto s : rest) {
      std::uint32_t degree = 0;
      for (const auto& a : mdp.actions[s])
        for (const auto& o : a.outcomes)
          if (in_rest[o.target] && o.target != s) {
            ++degree;
            rest_pred[o.target].push_back(s);
          } else if (o.target == s) {
            ++degree;  // self-loops make the subgraph cyclic
          }
      out_degree[s] = degree;
    }
    std::deque<std::uint32_t> ready;
    for (auto s : rest)
      if (out_degree[s] == 0) ready.push_back(s);
    while (!ready.empty()) {
      auto s = ready.front();
      ready.pop_front();
      order.push_back(s);
      for (auto p : rest_pred[s])
        if (--out_degree[p] == 0) ready.push_back(p);
    }
    acyclic = order.size() == rest.size();
  }

  if (acyclic) {
    // Exact pass in reverse topological order (successors first).
    std::vector<Rational> exact(n, Rational(0));
    for (std::size_t s = 0; s < n; ++s)
      if (sets.one[s]) exact[s] = 1;
    for (auto s : order) {
      bool first = true;
      Rational best = 0;
      for (const auto& a : mdp.actions[s]) {
        Rational value = 0;
        for (const auto& o : a.outcomes) value += o.prob * exact[o.target];
        if (first || (opt == Opt::Max ? value > best : value < best)) {
          best = value;
          first = false;
        }
      }
      exact[s] = best;
    }
    result.exact = std::move(exact);
    for (std::size_t s = 0; s < n; ++s) result.values[s] = to_double(result.exact[s]);
    result.method = Method::TopologicalExact;
    result.iterations = order.size();
    return result;
  }

  // Value iteration from below with double-buffered sweeps, so the result is
  // bit-identical run to run.
  std::vector<double> current = result.values;
  std::vector<double> next = current;
  std::size_t sweeps = 0;
  while (true) {
    if (++sweeps > options.max_iterations)
      throw ResourceError("value iteration exceeded " + std::to_string(options.max_iterations) +
                          " sweeps");
    double delta = 0.0;
    for (auto s : rest) {
      bool first = true;
      double best = 0.0;
      for (const auto& a : mdp.actions[s]) {
        double value = 0.0;
        for (const auto& o : a.outcomes) value += o.prob_d * current[o.target];
        if (first || (opt == Opt::Max ? value > best : value < best)) {
          best = value;
          first = false;
        }
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - current[s]));
    }
    std::swap(current, next);
    if (delta < options.epsilon) break;
  }
  result.values = std::move(current);
  result.method = Method::ValueIteration;
  result.iterations = sweeps;
  return result;
}

// ---------------------------------------------------------------------------
// End-to-end check
// ---------------------------------------------------------------------------

namespace {

bool prop_holds(const Prop& p, const ptp::Ptp& m, const DigitizedState& s,
                const std::map<std::string, int>& var_index) {
  switch (p.kind) {
    case Prop::Kind::Label: {
      auto it = m.labels.find(p.label);
      if (it == m.labels.end()) throw Error("label \"" + p.label + "\" not defined in the model");
      return it->second.count(s.location) > 0;
    }
    case Prop::Kind::Cmp: {
      auto it = var_index.find(p.var);
      if (it == var_index.end()) throw Error("unknown variable '" + p.var + "' in query");
      std::int64_t lhs = s.vars[it->second];
      switch (p.cmp) {
        case ptp::Assertion::CmpOp::Eq: return lhs == p.value;
        case ptp::Assertion::CmpOp::Ne: return lhs != p.value;
        case ptp::Assertion::CmpOp::Lt: return lhs < p.value;
        case ptp::Assertion::CmpOp::Le: return lhs <= p.value;
        case ptp::Assertion::CmpOp::Gt: return lhs > p.value;
        case ptp::Assertion::CmpOp::Ge: return lhs >= p.value;
      }
      return false;
    }
    case Prop::Kind::And:
      return std::all_of(p.children.begin(), p.children.end(),
                         [&](const Prop& c) { return prop_holds(c, m, s, var_index); });
    case Prop::Kind::Or:
      return std::any_of(p.children.begin(), p.children.end(),
                         [&](const Prop& c) { return prop_holds(c, m, s, var_index); });
  }
  return false;
}

void validate_prop(const Prop& p, const ptp::Ptp& m) {
  if (p.kind == Prop::Kind::Label && !m.labels.count(p.label))
    throw Error("label \"" + p.label + "\" not defined in the model");
  if (p.kind == Prop::Kind::Cmp) {
    bool declared = std::any_of(m.variables.begin(), m.variables.end(),
                                [&](const ptp::VariableDecl& v) { return v.name == p.var; });
    if (!declared) throw Error("unknown variable '" + p.var + "' in query");
  }
  for (const auto& c : p.children) validate_prop(c, m);
}

}  // namespace

CheckResult check(const ptp::Ptp& m, const PctlQuery& q, std::uint32_t granularity,
                  const CheckOptions& options) {
  auto start = std::chrono::steady_clock::now();
  validate_prop(q.prop, m);

  DigitizeOptions dopts;
  dopts.granularity = granularity;
  dopts.bound = q.bound;
  dopts.state_cap = options.state_cap;
  dopts.cap_slack = options.cap_slack;
  Mdp mdp = digitize(m, dopts);

  std::map<std::string, int> var_index;
  for (std::size_t i = 0; i < m.variables.size(); ++i)
    var_index[m.variables[i].name] = static_cast<int>(i);

  const std::int64_t deadline_ticks =
      q.bound ? *q.bound * static_cast<std::int64_t>(granularity) : 0;
  std::vector<bool> target(mdp.states.size(), false);
  for (std::size_t s = 0; s < mdp.states.size(); ++s) {
    const auto& state = mdp.states[s];
    if (q.bound && state.elapsed > deadline_ticks) continue;
    target[s] = prop_holds(q.prop, m, state, var_index);
  }

  auto reach = optimal_reachability(mdp, target, q.opt, options.solve);

  CheckResult result;
  result.value = reach.values[mdp.initial];
  if (reach.method == Method::TopologicalExact) result.exact = reach.exact[mdp.initial];
  result.granularity = granularity;
  result.reachable_states = mdp.states.size();
  result.iterations = reach.iterations;
  result.method = reach.method;
  result.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<CheckResult> granularity_ladder(const ptp::Ptp& m, const PctlQuery& q,
                                            const std::vector<std::uint32_t>& granularities,
                                            const CheckOptions& options) {
  if (granularities.empty()) throw Error("granularity ladder must not be empty");
  for (std::size_t i = 1; i < granularities.size(); ++i) {
    if (granularities[i] <= granularities[i - 1])
      throw Error("granularities must be strictly increasing");
    if (granularities[i] % granularities[i - 1] != 0)
      throw Error("each granularity must divide the next");
  }
  std::vector<CheckResult> results;
  for (auto g : granularities) results.push_back(check(m, q, g, options));
  return results;
}

bool ladder_monotone(const std::vector<CheckResult>& results, Opt opt) {
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (opt == Opt::Max && results[i].value < results[i - 1].value - 1e-12) return false;
    if (opt == Opt::Min && results[i].value > results[i - 1].value + 1e-12) return false;
  }
  return true;
}

}  // namespace timely::checker
