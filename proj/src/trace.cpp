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

#include "timely/trace.hpp"

#include <json.hpp>

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>

#include "timely/errors.hpp"

namespace timely::trace {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 7> kKindNames = {
    "svc_req_send", "svc_req_recv", "svc_ans_send", "svc_ans_recv",
    "top_pub",      "top_recv",     "top_done",
};

constexpr std::array<const char*, 5> kDurationNames = {
    "ReqComm", "SvcExec", "AnsComm", "BcastComm", "HandlerTime",
};

}  // namespace

std::string to_string(EventKind kind) { return kKindNames[static_cast<int>(kind)]; }

EventKind event_kind_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (s == kKindNames[i]) return static_cast<EventKind>(i);
  throw ParseError("unknown event kind '" + s + "'");
}

std::string to_string(DurationKind kind) { return kDurationNames[static_cast<int>(kind)]; }

DurationKind duration_kind_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kDurationNames.size(); ++i)
    if (s == kDurationNames[i]) return static_cast<DurationKind>(i);
  throw ParseError("unknown duration kind '" + s + "'");
}

TraceEvent parse_trace_event(const std::string& line) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("trace record: ") + e.what());
  }
  if (!rec.is_object()) throw ParseError("trace record must be a JSON object");

  auto field = [&](const char* name) -> const json& {
    if (!rec.contains(name))
      throw ParseError(std::string("trace record missing field '") + name + "'");
    return rec[name];
  };

  TraceEvent e;
  if (!field("kind").is_string()) throw ParseError("field 'kind' must be a string");
  e.kind = event_kind_from_string(rec["kind"].get<std::string>());
  e.caller = field("caller").get<std::string>();
  e.channel = field("channel").get<std::string>();
  e.observer = field("observer").get<std::string>();
  if (!field("corr").is_number_unsigned())
    throw ParseError("field 'corr' must be a nonnegative integer");
  e.corr_id = rec["corr"].get<std::uint64_t>();
  if (!field("t").is_number()) throw ParseError("field 't' must be a number");
  e.t = rec["t"].get<double>();
  if (e.t < 0) throw ParseError("negative timestamp");
  return e;
}

std::string format_trace_event(const TraceEvent& e) {
  json rec;
  rec["kind"] = to_string(e.kind);
  rec["caller"] = e.caller;
  rec["channel"] = e.channel;
  rec["observer"] = e.observer;
  rec["corr"] = e.corr_id;
  rec["t"] = e.t;
  return rec.dump();
}

std::size_t write_trace(const std::vector<TraceEvent>& events, std::ostream& sink) {
  for (const auto& e : events) {
    sink << format_trace_event(e) << "\n";
    if (!sink) throw Error("trace sink write failed");
  }
  return events.size();
}

std::vector<TraceEvent> read_trace(std::istream& source) {
  std::vector<TraceEvent> events;
  std::map<std::string, double> offsets;
  std::string line;
  bool first = true;
  while (std::getline(source, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      json rec = json::parse(line, nullptr, false);
      if (rec.is_object() && rec.contains("header")) {
        if (rec["header"].contains("offsets"))
          for (const auto& [node, off] : rec["header"]["offsets"].items())
            offsets[node] = off.get<double>();
        continue;
      }
    }
    events.push_back(parse_trace_event(line));
  }
  for (auto& e : events) {
    auto it = offsets.find(e.observer);
    if (it != offsets.end()) e.t -= it->second;
  }
  return events;
}

namespace {

struct Slot {
  std::optional<double> t;
  bool used = false;          // contributed to an emitted sample
  std::size_t event_index = 0;  // back-reference for the unpaired list
};

struct Group {
  std::array<Slot, 7> slots;  // indexed by EventKind
  std::string channel;
  std::uint64_t corr = 0;
  std::size_t first_seen = 0;
};

}  // namespace

PairResult pair_events(const std::vector<TraceEvent>& events) {
  // Service interactions keyed (channel, caller, corr); topic deliveries
  // keyed (channel, publisher, corr, subscriber). TopPub lives in its own
  // group per subscriber-less key and is matched against every subscriber.
  std::map<std::tuple<std::string, std::string, std::uint64_t>, Group> service_groups;
  std::map<std::tuple<std::string, std::string, std::uint64_t>, Slot> publications;
  std::map<std::tuple<std::string, std::string, std::uint64_t, std::string>, Group> topic_groups;

  std::vector<std::string> duplicates;
  auto fill = [&](Slot& slot, const TraceEvent& e, std::size_t index) {
    if (slot.t.has_value()) {
      duplicates.push_back(to_string(e.kind) + " corr=" + std::to_string(e.corr_id) +
                           " channel=" + e.channel + " observer=" + e.observer);
      return;
    }
    slot.t = e.t;
    slot.event_index = index;
  };

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    switch (e.kind) {
      case EventKind::SvcReqSend:
      case EventKind::SvcReqRecv:
      case EventKind::SvcAnsSend:
      case EventKind::SvcAnsRecv: {
        auto& g = service_groups[{e.channel, e.caller, e.corr_id}];
        if (!g.slots[0].t && !g.slots[1].t && !g.slots[2].t && !g.slots[3].t) g.first_seen = i;
        g.channel = e.channel;
        g.corr = e.corr_id;
        fill(g.slots[static_cast<int>(e.kind)], e, i);
        break;
      }
      case EventKind::TopPub:
        fill(publications[{e.channel, e.caller, e.corr_id}], e, i);
        break;
      case EventKind::TopRecv:
      case EventKind::TopDone: {
        auto& g = topic_groups[{e.channel, e.caller, e.corr_id, e.observer}];
        g.channel = e.channel;
        g.corr = e.corr_id;
        fill(g.slots[static_cast<int>(e.kind)], e, i);
        break;
      }
    }
  }
  if (!duplicates.empty()) {
    std::string msg = "duplicate trace entries:";
    for (const auto& d : duplicates) msg += "\n  " + d;
    throw Error(msg);
  }

  std::vector<DurationSample> samples;
  auto emit = [&](Slot& start, Slot& end, DurationKind kind, const std::string& channel,
                  std::uint64_t corr) {
    if (!start.t || !end.t) return;
    samples.push_back({kind, channel, *end.t - *start.t, corr});
    start.used = end.used = true;
  };

  for (auto& [key, g] : service_groups) {
    auto& s = g.slots;
    emit(s[static_cast<int>(EventKind::SvcReqSend)], s[static_cast<int>(EventKind::SvcReqRecv)],
         DurationKind::ReqComm, g.channel, g.corr);
    emit(s[static_cast<int>(EventKind::SvcReqRecv)], s[static_cast<int>(EventKind::SvcAnsSend)],
         DurationKind::SvcExec, g.channel, g.corr);
    emit(s[static_cast<int>(EventKind::SvcAnsSend)], s[static_cast<int>(EventKind::SvcAnsRecv)],
         DurationKind::AnsComm, g.channel, g.corr);
  }
  for (auto& [key, g] : topic_groups) {
    auto pub = publications.find({std::get<0>(key), std::get<1>(key), std::get<2>(key)});
    if (pub != publications.end())
      emit(pub->second, g.slots[static_cast<int>(EventKind::TopRecv)], DurationKind::BcastComm,
           g.channel, g.corr);
    emit(g.slots[static_cast<int>(EventKind::TopRecv)], g.slots[static_cast<int>(EventKind::TopDone)],
         DurationKind::HandlerTime, g.channel, g.corr);
  }

  // Samples come out grouped by interaction; order them by the earliest event
  // of their interaction so the output is deterministic for any input order.
  std::vector<bool> used(events.size(), false);
  for (const auto& [key, g] : service_groups)
    for (const auto& slot : g.slots)
      if (slot.t && slot.used) used[slot.event_index] = true;
  for (const auto& [key, g] : topic_groups)
    for (const auto& slot : g.slots)
      if (slot.t && slot.used) used[slot.event_index] = true;
  for (const auto& [key, slot] : publications)
    if (slot.t && slot.used) used[slot.event_index] = true;

  PairResult result;
  result.samples = std::move(samples);
  for (std::size_t i = 0; i < events.size(); ++i)
    if (!used[i]) result.unpaired.push_back(events[i]);
  return result;
}

}  // namespace timely::trace
