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

#include "timely/rosgraph.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

#include "timely/errors.hpp"

namespace timely {

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::ostringstream out;
  for (std::size_t i = 0; i < diags.size(); ++i) {
    if (i) out << "\n";
    out << diags[i].str();
  }
  return out.str();
}

}  // namespace timely

namespace timely::rosgraph {

using nlohmann::json;

std::string to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Publish: return "publish";
    case EdgeKind::Subscribe: return "subscribe";
    case EdgeKind::ProvideService: return "provide-service";
    case EdgeKind::RequestService: return "request-service";
  }
  return "?";
}

EdgeKind RosGraph::edge_kind(const Edge& e) const {
  if (is_node(e.from) && is_topic(e.to)) return EdgeKind::Publish;
  if (is_topic(e.from) && is_node(e.to)) return EdgeKind::Subscribe;
  if (is_node(e.from) && is_service(e.to)) return EdgeKind::ProvideService;
  if (is_service(e.from) && is_node(e.to)) return EdgeKind::RequestService;
  throw Error("edge endpoints must alternate node/channel: " + e.from + "->" + e.to);
}

namespace {

std::vector<std::string> edge_peers(const RosGraph& g, const std::string& channel, bool outgoing) {
  std::vector<std::string> out;
  for (const auto& e : g.edges) {
    if (outgoing && e.from == channel && g.is_node(e.to)) out.push_back(e.to);
    if (!outgoing && e.to == channel && g.is_node(e.from)) out.push_back(e.from);
  }
  return out;
}

}  // namespace

std::vector<std::string> RosGraph::publishers_of(const std::string& topic) const {
  return edge_peers(*this, topic, /*outgoing=*/false);
}

std::vector<std::string> RosGraph::subscribers_of(const std::string& topic) const {
  return edge_peers(*this, topic, /*outgoing=*/true);
}

std::vector<std::string> RosGraph::providers_of(const std::string& service) const {
  return edge_peers(*this, service, /*outgoing=*/false);
}

std::vector<std::string> RosGraph::requesters_of(const std::string& service) const {
  return edge_peers(*this, service, /*outgoing=*/true);
}

namespace {

bool is_vertex(const RosGraph& g, const std::string& id) {
  return g.is_node(id) || g.is_topic(id) || g.is_service(id);
}

// Descriptor sites are topic ids or "from->to" keys over node/service edges.
bool parse_edge_site(const std::string& site, Edge& out) {
  auto arrow = site.find("->");
  if (arrow == std::string::npos) return false;
  out.from = site.substr(0, arrow);
  out.to = site.substr(arrow + 2);
  return !out.from.empty() && !out.to.empty();
}

}  // namespace

std::vector<Diagnostic> validate_graph(const RosGraph& g) {
  std::vector<Diagnostic> diags;
  auto add = [&](const std::string& code, const std::string& element, const std::string& msg) {
    diags.push_back({code, element, msg});
  };

  for (const auto& id : g.nodes) {
    if (g.topics.count(id)) add("DisjointSets", id, "vertex is both a node and a topic");
    if (g.services.count(id)) add("DisjointSets", id, "vertex is both a node and a service");
  }
  for (const auto& id : g.topics)
    if (g.services.count(id)) add("DisjointSets", id, "vertex is both a topic and a service");

  std::set<Edge> seen;
  for (const auto& e : g.edges) {
    const std::string name = e.from + "->" + e.to;
    if (!is_vertex(g, e.from) || !is_vertex(g, e.to)) {
      add("UnknownVertex", name, "edge endpoint is not a declared vertex");
      continue;
    }
    bool legal = (g.is_node(e.from) && (g.is_topic(e.to) || g.is_service(e.to))) ||
                 ((g.is_topic(e.from) || g.is_service(e.from)) && g.is_node(e.to));
    if (!legal) add("EdgeEndpoints", name, "edge endpoints must alternate node/channel");
    if (!seen.insert(e).second) add("DuplicateEdge", name, "edge listed more than once");
  }

  // Labelling is total; within each vertex kind labels must be unique.
  for (const auto* set : {&g.nodes, &g.topics, &g.services}) {
    std::map<std::string, std::string> by_label;
    for (const auto& id : *set) {
      auto it = g.labels.find(id);
      if (it == g.labels.end() || it->second.empty()) {
        add("MissingLabel", id, "vertex has no label");
        continue;
      }
      auto [pos, inserted] = by_label.emplace(it->second, id);
      if (!inserted)
        add("DuplicateLabel", id, "label '" + it->second + "' already used by " + pos->second);
    }
  }

  for (const auto& [site, classes] : g.descriptors) {
    Edge e;
    bool ok = false;
    if (g.is_topic(site)) {
      ok = true;
    } else if (parse_edge_site(site, e)) {
      bool node_service = (g.is_node(e.from) && g.is_service(e.to)) ||
                          (g.is_service(e.from) && g.is_node(e.to));
      ok = node_service && std::find(g.edges.begin(), g.edges.end(), e) != g.edges.end();
    }
    if (!ok)
      add("DescriptorSiteInvalid", site,
          "descriptor site must be a topic or a node/service edge");
    for (const auto& cls : classes)
      if (!g.classes.count(cls))
        add("UnknownClass", site, "descriptor uses undeclared class '" + cls + "'");
  }

  // The class parent relation must be acyclic (it is only stored, never
  // consumed by any algorithm here).
  for (const auto& [child, parent] : g.classes) {
    if (!parent.empty() && !g.classes.count(parent))
      add("UnknownClass", child, "parent class '" + parent + "' not declared");
    std::string cur = child;
    std::set<std::string> walked;
    while (!cur.empty() && g.classes.count(cur)) {
      if (!walked.insert(cur).second) {
        add("ClassCycle", child, "class parent chain contains a cycle");
        break;
      }
      cur = g.classes.at(cur);
    }
  }

  return diags;
}

RosGraph load_graph(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("graph file: top level must be an object");

  RosGraph g;
  auto read_set = [&](const char* key, std::set<std::string>& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_array()) throw ParseError(std::string("graph file: '") + key + "' must be an array");
    for (const auto& v : doc[key]) {
      if (!v.is_string()) throw ParseError(std::string("graph file: '") + key + "' entries must be strings");
      std::string id = v.get<std::string>();
      if (!out.insert(id).second)
        throw Error("graph file: vertex '" + id + "' declared twice in '" + key + "'");
      g.labels[id] = id;
    }
  };
  read_set("nodes", g.nodes);
  read_set("topics", g.topics);
  read_set("services", g.services);

  if (doc.contains("edges")) {
    for (const auto& e : doc["edges"]) {
      if (!e.is_object() || !e.contains("from") || !e.contains("to"))
        throw ParseError("graph file: each edge needs 'from' and 'to'");
      g.edges.push_back({e["from"].get<std::string>(), e["to"].get<std::string>()});
    }
  }
  if (doc.contains("descriptors")) {
    for (const auto& [site, seq] : doc["descriptors"].items()) {
      std::vector<std::string> classes;
      for (const auto& c : seq) classes.push_back(c.get<std::string>());
      g.descriptors[site] = std::move(classes);
    }
  }
  if (doc.contains("classes")) {
    for (const auto& [child, parent] : doc["classes"].items())
      g.classes[child] = parent.is_null() ? "" : parent.get<std::string>();
  }

  auto diags = validate_graph(g);
  if (!diags.empty()) throw Error("invalid graph:\n" + join_diagnostics(diags));
  return g;
}

std::string write_graph(const RosGraph& g) {
  json doc;
  doc["nodes"] = g.nodes;
  doc["topics"] = g.topics;
  doc["services"] = g.services;
  doc["edges"] = json::array();
  for (const auto& e : g.edges) doc["edges"].push_back({{"from", e.from}, {"to", e.to}});
  doc["descriptors"] = json::object();
  for (const auto& [site, seq] : g.descriptors) doc["descriptors"][site] = seq;
  doc["classes"] = json::object();
  for (const auto& [child, parent] : g.classes)
    doc["classes"][child] = parent.empty() ? json() : json(parent);
  return doc.dump(2) + "\n";
}

}  // namespace timely::rosgraph
