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

#include "timely/ptp_io.hpp"

#include <json.hpp>

#include "timely/errors.hpp"

namespace timely::ptp {

using nlohmann::json;

namespace {

ClockConstraint::Rel rel_from_string(const std::string& s) {
  if (s == "<") return ClockConstraint::Rel::Lt;
  if (s == "<=") return ClockConstraint::Rel::Le;
  if (s == ">") return ClockConstraint::Rel::Gt;
  if (s == ">=") return ClockConstraint::Rel::Ge;
  throw ParseError("model: unknown clock relation '" + s + "'");
}

Assertion::CmpOp cmp_from_string(const std::string& s) {
  if (s == "=") return Assertion::CmpOp::Eq;
  if (s == "!=") return Assertion::CmpOp::Ne;
  if (s == "<") return Assertion::CmpOp::Lt;
  if (s == "<=") return Assertion::CmpOp::Le;
  if (s == ">") return Assertion::CmpOp::Gt;
  if (s == ">=") return Assertion::CmpOp::Ge;
  throw ParseError("model: unknown comparison '" + s + "'");
}

Zone zone_from_json(const json& j) {
  Zone z;
  if (j.is_null()) return z;
  if (!j.is_array()) throw ParseError("model: zone must be an array of constraints");
  for (const auto& c : j) {
    if (!c.is_array() || (c.size() != 3 && c.size() != 5))
      throw ParseError("model: constraint must be [clock,rel,bound] or [clock,'-',clock,rel,bound]");
    ClockConstraint cc;
    if (c.size() == 3) {
      cc.left = c[0].get<std::string>();
      cc.rel = rel_from_string(c[1].get<std::string>());
      cc.bound = c[2].get<std::int64_t>();
    } else {
      if (c[1].get<std::string>() != "-")
        throw ParseError("model: difference constraint must use '-'");
      cc.left = c[0].get<std::string>();
      cc.right = c[2].get<std::string>();
      cc.rel = rel_from_string(c[3].get<std::string>());
      cc.bound = c[4].get<std::int64_t>();
    }
    z.constraints.push_back(std::move(cc));
  }
  return z;
}

json zone_to_json(const Zone& z) {
  json arr = json::array();
  for (const auto& c : z.constraints) {
    if (c.right)
      arr.push_back({c.left, "-", *c.right, to_string(c.rel), c.bound});
    else
      arr.push_back({c.left, to_string(c.rel), c.bound});
  }
  return arr;
}

Assertion assertion_from_json(const json& j) {
  if (j.is_null() || (j.is_boolean() && j.get<bool>())) return Assertion::truth();
  if (!j.is_array() || j.empty()) throw ParseError("model: guard must be true or an array form");
  const std::string head = j[0].get<std::string>();
  Assertion a;
  if (head == "cmp") {
    if (j.size() != 4) throw ParseError("model: cmp form is ['cmp',var,rel,value]");
    a.op = Assertion::Op::Cmp;
    a.left = j[1].get<std::string>();
    a.cmp = cmp_from_string(j[2].get<std::string>());
    if (j[3].is_string()) {
      a.rhs_is_var = true;
      a.rhs_var = j[3].get<std::string>();
    } else {
      a.rhs_const = j[3].get<std::int64_t>();
    }
    return a;
  }
  if (head == "and" || head == "or") {
    a.op = head == "and" ? Assertion::Op::And : Assertion::Op::Or;
    for (std::size_t i = 1; i < j.size(); ++i) a.children.push_back(assertion_from_json(j[i]));
    if (a.children.empty()) throw ParseError("model: '" + head + "' needs operands");
    return a;
  }
  if (head == "not") {
    if (j.size() != 2) throw ParseError("model: 'not' takes one operand");
    a.op = Assertion::Op::Not;
    a.children.push_back(assertion_from_json(j[1]));
    return a;
  }
  throw ParseError("model: unknown guard operator '" + head + "'");
}

json assertion_to_json(const Assertion& a) {
  switch (a.op) {
    case Assertion::Op::True: return true;
    case Assertion::Op::Cmp: {
      json rhs = a.rhs_is_var ? json(a.rhs_var) : json(a.rhs_const);
      return json::array({"cmp", a.left, to_string(a.cmp), rhs});
    }
    case Assertion::Op::And:
    case Assertion::Op::Or: {
      json arr = json::array({a.op == Assertion::Op::And ? "and" : "or"});
      for (const auto& c : a.children) arr.push_back(assertion_to_json(c));
      return arr;
    }
    case Assertion::Op::Not: return json::array({"not", assertion_to_json(a.children.front())});
  }
  return true;
}

Rational weight_from_json(const json& j) {
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number_float()) return rational_from_double(j.get<double>());
  throw ParseError("model: weight must be a number or string");
}

json weight_to_json(const Rational& r) {
  if (auto dec = decimal_if_finite(r)) return json::parse(*dec);
  return rational_to_string(r);
}

LinearExpr expr_from_json(const json& j) {
  LinearExpr e;
  if (j.is_number_integer()) {
    e.constant = j.get<std::int64_t>();
    return e;
  }
  if (j.is_object()) {
    if (j.contains("const")) e.constant = j["const"].get<std::int64_t>();
    if (j.contains("terms"))
      for (const auto& [var, coef] : j["terms"].items())
        e.terms.emplace_back(coef.get<std::int64_t>(), var);
    return e;
  }
  throw ParseError("model: update must be an integer or {const, terms}");
}

json expr_to_json(const LinearExpr& e) {
  if (e.is_constant()) return e.constant;
  json terms = json::object();
  for (const auto& [coef, var] : e.terms) terms[var] = coef;
  return json{{"const", e.constant}, {"terms", terms}};
}

}  // namespace

Ptp load_model(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model file: top level must be an object");

  Ptp m;
  if (!doc.contains("locations") || !doc["locations"].is_array() || doc["locations"].empty())
    throw ParseError("model file: 'locations' must be a nonempty array");
  for (const auto& l : doc["locations"]) m.locations.push_back(l.get<std::string>());

  auto resolve = [&](const std::string& name, const char* where) {
    int idx = m.location_index(name);
    if (idx < 0)
      throw ParseError(std::string("model file: unknown location '") + name + "' in " + where);
    return idx;
  };

  m.initial = doc.contains("initial") ? resolve(doc["initial"].get<std::string>(), "initial") : 0;

  if (doc.contains("clocks"))
    for (const auto& c : doc["clocks"]) m.clocks.push_back(c.get<std::string>());

  if (doc.contains("invariant"))
    for (const auto& [loc, zone] : doc["invariant"].items())
      m.invariants[resolve(loc, "invariant")] = zone_from_json(zone);

  if (doc.contains("variables"))
    for (const auto& v : doc["variables"])
      m.variables.push_back({v["name"].get<std::string>(), v["lo"].get<std::int64_t>(),
                             v["hi"].get<std::int64_t>()});
  for (const auto& v : m.variables) m.initial_valuation[v.name] = v.lo;
  if (doc.contains("init"))
    for (const auto& [var, value] : doc["init"].items())
      m.initial_valuation[var] = value.get<std::int64_t>();

  if (doc.contains("transitions")) {
    for (const auto& t : doc["transitions"]) {
      Transition tr;
      tr.source = resolve(t["source"].get<std::string>(), "transition source");
      if (t.contains("guard")) tr.guard = assertion_from_json(t["guard"]);
      if (t.contains("enabling")) tr.enabling = zone_from_json(t["enabling"]);
      if (!t.contains("outcomes") || !t["outcomes"].is_array())
        throw ParseError("model file: transition needs an 'outcomes' array");
      for (const auto& o : t["outcomes"]) {
        Outcome out;
        out.weight = o.contains("weight") ? weight_from_json(o["weight"]) : Rational(1);
        out.target = resolve(o["target"].get<std::string>(), "outcome target");
        if (o.contains("resets"))
          for (const auto& r : o["resets"]) out.resets.insert(r.get<std::string>());
        if (o.contains("update"))
          for (const auto& [var, expr] : o["update"].items())
            out.update[var] = expr_from_json(expr);
        tr.outcomes.push_back(std::move(out));
      }
      m.transitions.push_back(std::move(tr));
    }
  }

  if (doc.contains("labels"))
    for (const auto& [label, locs] : doc["labels"].items())
      for (const auto& l : locs) m.labels[label].insert(resolve(l.get<std::string>(), "labels"));

  auto diags = validate_ptp(m);
  if (!diags.empty()) throw Error("invalid model:\n" + join_diagnostics(diags));
  return m;
}

std::string write_model(const Ptp& m) {
  auto diags = validate_ptp(m);
  if (!diags.empty()) throw Error("refusing to write invalid model:\n" + join_diagnostics(diags));

  json doc;
  doc["locations"] = m.locations;
  doc["initial"] = m.locations[m.initial];
  doc["clocks"] = m.clocks;
  json inv = json::object();
  for (const auto& [loc, zone] : m.invariants)
    if (!zone.universal()) inv[m.locations[loc]] = zone_to_json(zone);
  doc["invariant"] = inv;
  json vars = json::array();
  for (const auto& v : m.variables)
    vars.push_back({{"name", v.name}, {"lo", v.lo}, {"hi", v.hi}});
  doc["variables"] = vars;
  json init = json::object();
  for (const auto& [var, value] : m.initial_valuation) init[var] = value;
  doc["init"] = init;

  json trans = json::array();
  for (const auto& t : m.transitions) {
    json tj;
    tj["source"] = m.locations[t.source];
    if (!t.guard.is_true()) tj["guard"] = assertion_to_json(t.guard);
    if (!t.enabling.universal()) tj["enabling"] = zone_to_json(t.enabling);
    json outs = json::array();
    for (const auto& o : t.outcomes) {
      json oj;
      oj["weight"] = weight_to_json(o.weight);
      oj["target"] = m.locations[o.target];
      if (!o.resets.empty()) oj["resets"] = o.resets;
      if (!o.update.empty()) {
        json uj = json::object();
        for (const auto& [var, expr] : o.update) uj[var] = expr_to_json(expr);
        oj["update"] = uj;
      }
      outs.push_back(std::move(oj));
    }
    tj["outcomes"] = std::move(outs);
    trans.push_back(std::move(tj));
  }
  doc["transitions"] = std::move(trans);

  json labels = json::object();
  for (const auto& [label, locs] : m.labels) {
    json arr = json::array();
    for (int l : locs) arr.push_back(m.locations[l]);
    labels[label] = arr;
  }
  doc["labels"] = labels;
  return doc.dump(2) + "\n";
}

}  // namespace timely::ptp
