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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "timely/diagnostics.hpp"

namespace timely::rosgraph {

/// Role of a directed edge, fully determined by which vertex sets the
/// endpoints belong to:
///   node -> topic    publish
///   topic -> node    subscribe
///   node -> service  provide  (the node implements and answers the service)
///   service -> node  request  (the node calls the service and receives answers)
enum class EdgeKind { Publish, Subscribe, ProvideService, RequestService };

std::string to_string(EdgeKind kind);

struct Edge {
  std::string from;
  std::string to;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// Tri-partite communication graph of a message-passing control system:
/// processing nodes, broadcast topics, and request/response services.
/// Payload descriptors (finite sequences of object classes) attach to topic
/// vertices and to service-direction edges. Immutable in practice: build it,
/// validate it, then share freely.
struct RosGraph {
  std::set<std::string> nodes;
  std::set<std::string> topics;
  std::set<std::string> services;
  std::vector<Edge> edges;
  /// Site is either a topic id or an edge rendered "from->to" whose endpoints
  /// are a node/service pair.
  std::map<std::string, std::vector<std::string>> descriptors;
  /// Total labelling; file loads use the vertex id itself as the label.
  std::map<std::string, std::string> labels;
  /// Object classes with an optional parent (empty string = no parent).
  /// Checked for acyclicity only; no subtyping logic is applied.
  std::map<std::string, std::string> classes;

  bool is_node(const std::string& id) const { return nodes.count(id) > 0; }
  bool is_topic(const std::string& id) const { return topics.count(id) > 0; }
  bool is_service(const std::string& id) const { return services.count(id) > 0; }

  /// Classifies an edge by endpoint membership; throws Error if the endpoint
  /// pair is not one of the four legal combinations.
  EdgeKind edge_kind(const Edge& e) const;

  /// Nodes with a publish edge to the topic.
  std::vector<std::string> publishers_of(const std::string& topic) const;
  /// Nodes with a subscribe edge from the topic.
  std::vector<std::string> subscribers_of(const std::string& topic) const;
  /// Nodes providing the service.
  std::vector<std::string> providers_of(const std::string& service) const;
  /// Nodes requesting the service.
  std::vector<std::string> requesters_of(const std::string& service) const;

  bool operator==(const RosGraph&) const = default;
};

/// Parses the graph file format and validates; throws ParseError on malformed
/// JSON and Error (with the full diagnostic list) on invariant violations.
RosGraph load_graph(const std::string& document);

/// Empty result iff every structural invariant holds. Never throws.
std::vector<Diagnostic> validate_graph(const RosGraph& g);

/// Serializes to the same JSON format load_graph accepts.
std::string write_graph(const RosGraph& g);

}  // namespace timely::rosgraph
