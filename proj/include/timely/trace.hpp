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
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace timely::trace {

/// The seven instrumentation points of a service call / topic broadcast.
/// Service: request sent (caller), request received (provider), answer sent
/// (provider), answer received (caller). Topic: published (publisher),
/// received (subscriber), handler done (subscriber).
enum class EventKind {
  SvcReqSend,
  SvcReqRecv,
  SvcAnsSend,
  SvcAnsRecv,
  TopPub,
  TopRecv,
  TopDone,
};

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& s);

/// One timed record. `caller` is the requesting node (or publisher),
/// `observer` is the node whose clock produced the stamp, `corr_id` the
/// per-interaction sequence number assigned by the caller/publisher.
struct TraceEvent {
  EventKind kind;
  std::string caller;
  std::string channel;
  std::string observer;
  std::uint64_t corr_id = 0;
  double t = 0.0;  // seconds

  bool operator==(const TraceEvent&) const = default;
};

/// The five duration categories derived by pairing trace events.
enum class DurationKind { ReqComm, SvcExec, AnsComm, BcastComm, HandlerTime };

std::string to_string(DurationKind kind);
DurationKind duration_kind_from_string(const std::string& s);

/// A paired duration in seconds. Negative values indicate a causality
/// violation in the input log; they are emitted as-is, never dropped.
struct DurationSample {
  DurationKind kind;
  std::string channel;
  double value = 0.0;  // seconds
  std::uint64_t corr_id = 0;

  bool operator==(const DurationSample&) const = default;
};

struct PairResult {
  std::vector<DurationSample> samples;
  std::vector<TraceEvent> unpaired;  // encounter order
};

/// Parses one JSON Lines record. Throws ParseError naming the bad field.
TraceEvent parse_trace_event(const std::string& line);

std::string format_trace_event(const TraceEvent& event);

/// Matches events by correlation id and emits the five duration kinds.
/// ReqComm/SvcExec/AnsComm per service interaction; BcastComm/HandlerTime per
/// (publication, subscriber). An event that contributed to no sample goes to
/// `unpaired`. Duplicate stamps for the same slot are an error.
PairResult pair_events(const std::vector<TraceEvent>& events);

/// Writes one record per event, in order; returns the record count.
std::size_t write_trace(const std::vector<TraceEvent>& events, std::ostream& sink);

/// Reads a whole log. An optional first line {"header":{"offsets":{node:s}}}
/// gives per-node clock offsets, subtracted from every stamp taken by that
/// node before the events are returned.
std::vector<TraceEvent> read_trace(std::istream& source);

}  // namespace timely::trace
