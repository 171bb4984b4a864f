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

#include "timely/simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <queue>
#include <tuple>

#include "timely/errors.hpp"

namespace timely::sim {

using nlohmann::json;
using trace::EventKind;
using trace::TraceEvent;

namespace {

Duration duration_from_json(const json& value, const std::string& where) {
  if (value.is_number()) {
    double d = value.get<double>();
    if (d < 0) throw Error("scenario: negative duration for " + where);
    return d;
  }
  if (value.is_object() && value.contains("bins")) {
    stats::IntervalHistogram hist;
    if (value.contains("unit")) hist.unit = rational_from_double(value["unit"].get<double>());
    for (const auto& b : value["bins"]) {
      if (!b.is_array() || b.size() != 3)
        throw ParseError("scenario: bins must be [lo, hi, prob] triples (" + where + ")");
      hist.bins.push_back({b[0].get<std::int64_t>(), b[1].get<std::int64_t>(),
                           rational_from_double(b[2].get<double>())});
    }
    try {
      stats::check_histogram(hist);
    } catch (const Error& e) {
      throw Error("scenario: " + where + ": " + e.what());
    }
    return hist;
  }
  throw ParseError("scenario: duration for " + where +
                   " must be a number or {unit, bins} object");
}

void read_duration_map(const json& doc, const char* key, std::map<std::string, Duration>& out) {
  if (!doc.contains(key)) return;
  for (const auto& [name, value] : doc[key].items())
    out[name] = duration_from_json(value, std::string(key) + "." + name);
}

}  // namespace

ScenarioConfig load_scenario(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario file: ") + e.what());
  }
  ScenarioConfig cfg;
  read_duration_map(doc, "comm", cfg.comm);
  read_duration_map(doc, "exec", cfg.exec);
  read_duration_map(doc, "handler", cfg.handler);
  if (doc.contains("publish_period"))
    for (const auto& [topic, p] : doc["publish_period"].items())
      cfg.publish_period[topic] = p.get<double>();
  if (doc.contains("request_period"))
    for (const auto& [key, p] : doc["request_period"].items()) cfg.request_period[key] = p.get<double>();
  if (doc.contains("horizon")) cfg.horizon = doc["horizon"].get<double>();
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  return cfg;
}

double draw_duration(const stats::IntervalHistogram& hist, Rng& rng) {
  const double u = rng.next_open01();
  double cumulative = 0.0;
  const auto* chosen = &hist.bins.back();
  for (const auto& b : hist.bins) {
    cumulative += to_double(b.prob);
    if (u < cumulative) {
      chosen = &b;
      break;
    }
  }
  const auto lo = static_cast<double>(chosen->lo);
  const auto hi = static_cast<double>(chosen->hi);
  const double width = hi - lo;
  double v = lo + width * rng.next_open01();
  // Keep the draw strictly inside the open interval even after rounding.
  if (v <= lo) v = lo + width * 0x1.0p-30;
  if (v >= hi) v = hi - width * 0x1.0p-30;
  return v * to_double(hist.unit);
}

namespace {

struct PendingEvent {
  double t;
  std::uint64_t seq;
  enum class What { PublishFire, RequestFire, ServiceArrival } what;
  // PublishFire: a = publisher, b = topic.
  // RequestFire: a = requester, b = service.
  // ServiceArrival: a = requester, b = service, c = provider, corr set.
  std::string a, b, c;
  std::uint64_t corr = 0;

  bool operator>(const PendingEvent& o) const { return std::tie(t, seq) > std::tie(o.t, o.seq); }
};

class Simulation {
 public:
  Simulation(const rosgraph::RosGraph& graph, const ScenarioConfig& cfg)
      : graph_(graph), cfg_(cfg), rng_(cfg.seed) {}

  std::vector<TraceEvent> run() {
    validate();
    schedule_periodic();
    while (!queue_.empty()) {
      PendingEvent ev = queue_.top();
      queue_.pop();
      switch (ev.what) {
        case PendingEvent::What::PublishFire: publish(ev); break;
        case PendingEvent::What::RequestFire: request(ev); break;
        case PendingEvent::What::ServiceArrival: service_arrival(ev); break;
      }
    }
    std::stable_sort(out_.begin(), out_.end(), [](const TraceEvent& x, const TraceEvent& y) {
      return std::tie(x.t, x.corr_id, x.kind, x.channel, x.observer) <
             std::tie(y.t, y.corr_id, y.kind, y.channel, y.observer);
    });
    return std::move(out_);
  }

 private:
  void validate() {
    if (cfg_.horizon <= 0) throw Error("scenario horizon must be positive");
    auto edge_exists = [&](const std::string& key) {
      auto arrow = key.find("->");
      if (arrow == std::string::npos) return false;
      rosgraph::Edge e{key.substr(0, arrow), key.substr(arrow + 2)};
      return std::find(graph_.edges.begin(), graph_.edges.end(), e) != graph_.edges.end();
    };
    for (const auto& [key, d] : cfg_.comm)
      if (!edge_exists(key)) throw Error("scenario: comm key '" + key + "' is not a graph edge");
    for (const auto& [key, d] : cfg_.handler)
      if (!edge_exists(key)) throw Error("scenario: handler key '" + key + "' is not a graph edge");
    for (const auto& [svc, d] : cfg_.exec)
      if (!graph_.is_service(svc)) throw Error("scenario: exec key '" + svc + "' is not a service");
    for (const auto& [topic, p] : cfg_.publish_period) {
      if (!graph_.is_topic(topic))
        throw Error("scenario: publish_period key '" + topic + "' is not a topic");
      if (p <= 0) throw Error("scenario: publish period for '" + topic + "' must be positive");
      if (graph_.publishers_of(topic).empty())
        throw Error("scenario: topic '" + topic + "' has no publisher");
    }
    for (const auto& [key, p] : cfg_.request_period) {
      auto arrow = key.find("->");
      if (arrow == std::string::npos)
        throw Error("scenario: request_period key '" + key + "' must be 'node->service'");
      std::string node = key.substr(0, arrow), svc = key.substr(arrow + 2);
      if (!graph_.is_node(node) || !graph_.is_service(svc))
        throw Error("scenario: request_period key '" + key + "' must be 'node->service'");
      if (p <= 0) throw Error("scenario: request period for '" + key + "' must be positive");
      auto requesters = graph_.requesters_of(svc);
      if (std::find(requesters.begin(), requesters.end(), node) == requesters.end())
        throw Error("scenario: graph has no request edge " + svc + "->" + node);
      if (graph_.providers_of(svc).size() != 1)
        throw Error("scenario: service '" + svc + "' must have exactly one provider");
    }
  }

  void schedule_periodic() {
    for (const auto& [topic, period] : cfg_.publish_period)
      for (const auto& pub : graph_.publishers_of(topic))
        for (std::uint64_t k = 0; static_cast<double>(k) * period < cfg_.horizon; ++k)
          push({static_cast<double>(k) * period, seq_++, PendingEvent::What::PublishFire, pub,
                topic, "", 0});
    for (const auto& [key, period] : cfg_.request_period) {
      auto arrow = key.find("->");
      std::string node = key.substr(0, arrow), svc = key.substr(arrow + 2);
      for (std::uint64_t k = 0; static_cast<double>(k) * period < cfg_.horizon; ++k)
        push({static_cast<double>(k) * period, seq_++, PendingEvent::What::RequestFire, node,
              svc, "", 0});
    }
  }

  void push(PendingEvent ev) { queue_.push(std::move(ev)); }

  double draw(const std::string& key, const std::map<std::string, Duration>& table) {
    auto it = table.find(key);
    if (it == table.end()) return 0.0;
    if (const double* d = std::get_if<double>(&it->second)) return *d;
    return draw_duration(std::get<stats::IntervalHistogram>(it->second), rng_);
  }

  void emit(EventKind kind, const std::string& caller, const std::string& channel,
            const std::string& observer, std::uint64_t corr, double t) {
    out_.push_back({kind, caller, channel, observer, corr, t});
  }

  void publish(const PendingEvent& ev) {
    const std::string& pub = ev.a;
    const std::string& topic = ev.b;
    const std::uint64_t corr = next_corr_[topic]++;
    emit(EventKind::TopPub, pub, topic, pub, corr, ev.t);
    const double broker_leg = draw(pub + "->" + topic, cfg_.comm);
    for (const auto& sub : graph_.subscribers_of(topic)) {
      const double delivery = broker_leg + draw(topic + "->" + sub, cfg_.comm);
      const double recv_t = ev.t + delivery;
      emit(EventKind::TopRecv, pub, topic, sub, corr, recv_t);
      const double handler = draw(topic + "->" + sub, cfg_.handler);
      emit(EventKind::TopDone, pub, topic, sub, corr, recv_t + handler);
    }
  }

  void request(const PendingEvent& ev) {
    const std::string& node = ev.a;
    const std::string& svc = ev.b;
    const std::uint64_t corr = next_corr_[svc]++;
    emit(EventKind::SvcReqSend, node, svc, node, corr, ev.t);
    const double req_comm = draw(svc + "->" + node, cfg_.comm);
    const std::string provider = graph_.providers_of(svc).front();
    push({ev.t + req_comm, seq_++, PendingEvent::What::ServiceArrival, node, svc, provider, corr});
  }

  void service_arrival(const PendingEvent& ev) {
    const std::string& node = ev.a;
    const std::string& svc = ev.b;
    const std::string& provider = ev.c;
    emit(EventKind::SvcReqRecv, node, svc, provider, ev.corr, ev.t);
    // Single-server FIFO per provider node: execution starts when the
    // provider finishes its previous job.
    double start = std::max(ev.t, provider_free_[provider]);
    const double exec = draw(svc, cfg_.exec);
    const double ans_t = start + exec;
    provider_free_[provider] = ans_t;
    emit(EventKind::SvcAnsSend, node, svc, provider, ev.corr, ans_t);
    const double ans_comm = draw(provider + "->" + svc, cfg_.comm);
    emit(EventKind::SvcAnsRecv, node, svc, node, ev.corr, ans_t + ans_comm);
  }

  const rosgraph::RosGraph& graph_;
  const ScenarioConfig& cfg_;
  Rng rng_;
  std::uint64_t seq_ = 0;
  std::priority_queue<PendingEvent, std::vector<PendingEvent>, std::greater<>> queue_;
  std::map<std::string, std::uint64_t> next_corr_;
  std::map<std::string, double> provider_free_;
  std::vector<TraceEvent> out_;
};

}  // namespace

std::vector<TraceEvent> simulate(const rosgraph::RosGraph& graph, const ScenarioConfig& config) {
  auto diags = rosgraph::validate_graph(graph);
  if (!diags.empty()) throw Error("invalid graph:\n" + join_diagnostics(diags));
  return Simulation(graph, config).run();
}

}  // namespace timely::sim
