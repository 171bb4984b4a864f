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

#include "timely/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "timely/errors.hpp"

namespace timely::pipeline {

using nlohmann::json;

const std::string& stage_id(const Stage& s) {
  return std::visit([](const auto& stage) -> const std::string& { return stage.id; }, s);
}

namespace {

std::vector<std::string> successor_ids(const Stage& s) {
  if (const auto* d = std::get_if<Delay>(&s)) return {d->then};
  if (const auto* w = std::get_if<Work>(&s)) return {w->on_success, w->on_fail};
  return {};
}

}  // namespace

std::vector<Diagnostic> validate_pipeline(const PipelineSpec& p) {
  std::vector<Diagnostic> diags;
  auto add = [&](const std::string& code, const std::string& element, const std::string& msg) {
    diags.push_back({code, element, msg});
  };

  std::map<std::string, const Stage*> by_id;
  for (const auto& s : p.stages)
    if (!by_id.emplace(stage_id(s), &s).second)
      add("DuplicateStage", stage_id(s), "stage id used twice");

  if (!by_id.count(p.start)) add("UnknownStage", p.start, "start stage not defined");

  for (const auto& s : p.stages) {
    for (const auto& succ : successor_ids(s))
      if (!by_id.count(succ))
        add("UnknownStage", stage_id(s), "references undefined stage '" + succ + "'");
    if (const auto* w = std::get_if<Work>(&s)) {
      if (w->success_p < 0 || w->success_p > 1)
        add("ProbabilityOutOfRange", w->id,
            "success probability " + rational_to_string(w->success_p) + " outside [0,1]");
    }
    if (const auto* d = std::get_if<Delay>(&s)) {
      if (const auto* hist = std::get_if<stats::IntervalHistogram>(&d->duration)) {
        try {
          stats::check_histogram(*hist);
        } catch (const Error& e) {
          add("InvalidHistogram", d->id, e.what());
        }
      }
    }
  }

  // Some terminal stage must be reachable from start.
  if (by_id.count(p.start)) {
    std::set<std::string> seen{p.start};
    std::vector<std::string> frontier{p.start};
    bool absorb_reachable = false;
    while (!frontier.empty()) {
      const Stage* s = by_id.count(frontier.back()) ? by_id[frontier.back()] : nullptr;
      frontier.pop_back();
      if (!s) continue;
      if (std::holds_alternative<Absorb>(*s)) absorb_reachable = true;
      for (const auto& succ : successor_ids(*s))
        if (seen.insert(succ).second) frontier.push_back(succ);
    }
    if (!absorb_reachable)
      add("NoTerminalStage", p.start, "no terminal stage is reachable from start");
  }

  return diags;
}

PipelineSpec bind_statistics(const PipelineSpec& p, const stats::StatsMap& stats) {
  PipelineSpec bound = p;
  std::vector<std::string> missing;
  for (auto& s : bound.stages) {
    auto* d = std::get_if<Delay>(&s);
    if (!d) continue;
    const auto* ref = std::get_if<DurationRef>(&d->duration);
    if (!ref) continue;
    auto it = stats.find(ref->name);
    if (it == stats.end()) {
      missing.push_back(ref->name);
      continue;
    }
    d->duration = it->second;
  }
  if (!missing.empty()) {
    std::string msg = "unbound distribution reference(s):";
    for (const auto& name : missing) msg += " '" + name + "'";
    throw Error(msg);
  }
  return bound;
}

ptp::Ptp compile_pipeline(const PipelineSpec& p, const CompileOptions& options) {
  auto diags = validate_pipeline(p);
  if (!diags.empty()) throw Error("invalid pipeline:\n" + join_diagnostics(diags));

  // All delay histograms must share one unit: the model's time base.
  std::optional<Rational> unit;
  for (const auto& s : p.stages) {
    const auto* d = std::get_if<Delay>(&s);
    if (!d) continue;
    const auto* hist = std::get_if<stats::IntervalHistogram>(&d->duration);
    if (!hist)
      throw Error("pipeline has unbound duration references; bind statistics first");
    if (unit && *unit != hist->unit)
      throw Error("delay histograms use mismatched units (" + rational_to_string(*unit) + " vs " +
                  rational_to_string(hist->unit) + ")");
    unit = hist->unit;
  }

  ptp::Ptp m;
  m.clocks = {"x"};
  const std::string clock = "x";

  // First pass: allocate locations in stage order so indices are stable.
  std::map<std::string, int> entry;  // stage id -> entry location
  std::map<std::string, std::vector<int>> bin_locations;
  for (const auto& s : p.stages) {
    if (const auto* d = std::get_if<Delay>(&s)) {
      entry[d->id] = static_cast<int>(m.locations.size());
      m.locations.push_back(d->id);
      const auto& hist = std::get<stats::IntervalHistogram>(d->duration);
      for (std::size_t i = 0; i < hist.bins.size(); ++i) {
        bin_locations[d->id].push_back(static_cast<int>(m.locations.size()));
        m.locations.push_back(d->id + "_b" + std::to_string(i));
      }
    } else if (const auto* w = std::get_if<Work>(&s)) {
      entry[w->id] = static_cast<int>(m.locations.size());
      m.locations.push_back(w->id);
    } else {
      const auto& a = std::get<Absorb>(s);
      entry[a.id] = static_cast<int>(m.locations.size());
      m.locations.push_back(a.id);
      m.labels[a.label].insert(entry[a.id]);
    }
  }
  m.initial = entry.at(p.start);

  using Rel = ptp::ClockConstraint::Rel;
  auto upper = [&](std::int64_t hi) {
    return ptp::Zone{{{clock, std::nullopt, Rel::Lt, hi}}};
  };
  auto lower = [&](std::int64_t lo) {
    return ptp::Zone{{{clock, std::nullopt, Rel::Gt, lo}}};
  };

  for (const auto& s : p.stages) {
    if (const auto* d = std::get_if<Delay>(&s)) {
      const auto& hist = std::get<stats::IntervalHistogram>(d->duration);
      const int branch = entry.at(d->id);
      if (options.branch_invariant)
        m.invariants[branch] = ptp::Zone{{{clock, std::nullopt, Rel::Le, 0}}};
      ptp::Transition choose;
      choose.source = branch;
      for (std::size_t i = 0; i < hist.bins.size(); ++i) {
        const int bin_loc = bin_locations.at(d->id)[i];
        choose.outcomes.push_back({hist.bins[i].prob, {}, {clock}, bin_loc});
        m.invariants[bin_loc] = upper(hist.bins[i].hi);
        ptp::Transition exit;
        exit.source = bin_loc;
        exit.enabling = lower(hist.bins[i].lo);
        exit.outcomes.push_back({Rational(1), {}, {clock}, entry.at(d->then)});
        m.transitions.push_back(std::move(exit));
      }
      m.transitions.push_back(std::move(choose));
    } else if (const auto* w = std::get_if<Work>(&s)) {
      if (w->lo >= w->hi)
        throw Error("work stage '" + w->id + "' has degenerate interval (" +
                    std::to_string(w->lo) + "," + std::to_string(w->hi) + ")");
      const int loc = entry.at(w->id);
      m.invariants[loc] = upper(w->hi);
      ptp::Transition exit;
      exit.source = loc;
      exit.enabling = lower(w->lo);
      // Success keeps the clock running; failure restarts timing.
      if (w->success_p > 0)
        exit.outcomes.push_back({w->success_p, {}, {}, entry.at(w->on_success)});
      if (w->success_p < 1)
        exit.outcomes.push_back({1 - w->success_p, {}, {clock}, entry.at(w->on_fail)});
      m.transitions.push_back(std::move(exit));
    } else {
      const auto& a = std::get<Absorb>(s);
      ptp::Transition stay;
      stay.source = entry.at(a.id);
      stay.outcomes.push_back({Rational(1), {}, {}, entry.at(a.id)});
      m.transitions.push_back(std::move(stay));
    }
  }

  auto model_diags = ptp::validate_ptp(m);
  if (!model_diags.empty())
    throw Error("compiled model failed validation:\n" + join_diagnostics(model_diags));
  return m;
}

PipelineSpec load_pipeline(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("pipeline file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("start") || !doc.contains("stages"))
    throw ParseError("pipeline file: needs 'start' and 'stages'");

  PipelineSpec p;
  p.start = doc["start"].get<std::string>();
  for (const auto& s : doc["stages"]) {
    if (!s.contains("kind") || !s.contains("id"))
      throw ParseError("pipeline file: each stage needs 'kind' and 'id'");
    const std::string kind = s["kind"].get<std::string>();
    const std::string id = s["id"].get<std::string>();
    if (kind == "delay") {
      Delay d;
      d.id = id;
      if (!s.contains("duration") || !s.contains("then"))
        throw ParseError("pipeline file: delay stage '" + id + "' needs 'duration' and 'then'");
      const auto& dur = s["duration"];
      if (dur.is_object() && dur.contains("ref")) {
        d.duration = DurationRef{dur["ref"].get<std::string>()};
      } else if (dur.is_object() && dur.contains("bins")) {
        stats::IntervalHistogram hist;
        if (dur.contains("unit")) hist.unit = rational_from_double(dur["unit"].get<double>());
        for (const auto& b : dur["bins"]) {
          if (!b.is_array() || b.size() != 3)
            throw ParseError("pipeline file: bins must be [lo, hi, prob] triples");
          hist.bins.push_back({b[0].get<std::int64_t>(), b[1].get<std::int64_t>(),
                               rational_from_double(b[2].get<double>())});
        }
        d.duration = std::move(hist);
      } else {
        throw ParseError("pipeline file: delay duration must be {'ref': name} or {'bins': ...}");
      }
      d.then = s["then"].get<std::string>();
      p.stages.push_back(std::move(d));
    } else if (kind == "work") {
      if (s.contains("duration"))
        throw ParseError("pipeline file: work stage '" + id +
                         "' takes a single 'lo'/'hi' interval, not a duration distribution");
      Work w;
      w.id = id;
      for (const char* key : {"lo", "hi", "p", "success", "fail"})
        if (!s.contains(key))
          throw ParseError("pipeline file: work stage '" + id + "' missing '" + key + "'");
      w.lo = s["lo"].get<std::int64_t>();
      w.hi = s["hi"].get<std::int64_t>();
      w.success_p = s["p"].is_string() ? rational_from_string(s["p"].get<std::string>())
                                       : rational_from_double(s["p"].get<double>());
      w.on_success = s["success"].get<std::string>();
      w.on_fail = s["fail"].get<std::string>();
      p.stages.push_back(std::move(w));
    } else if (kind == "absorb") {
      Absorb a;
      a.id = id;
      if (!s.contains("label"))
        throw ParseError("pipeline file: absorb stage '" + id + "' needs a 'label'");
      a.label = s["label"].get<std::string>();
      p.stages.push_back(std::move(a));
    } else {
      throw ParseError("pipeline file: unknown stage kind '" + kind + "'");
    }
  }
  return p;
}

}  // namespace timely::pipeline
