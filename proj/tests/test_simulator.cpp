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

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "timely/errors.hpp"
#include "timely/simulator.hpp"
#include "timely/trace.hpp"

using namespace timely;
using namespace timely::sim;
using trace::EventKind;

namespace {

rosgraph::RosGraph service_graph() {
  return rosgraph::load_graph(R"({
    "nodes": ["nav", "host"],
    "services": ["plan"],
    "edges": [{"from":"host","to":"plan"}, {"from":"plan","to":"nav"}]
  })");
}

rosgraph::RosGraph topic_graph() {
  return rosgraph::load_graph(testing::slurp(testing::data_path("vision.graph.json")));
}

}  // namespace

TEST_CASE("one service request with constant delays hits the four instants") {
  ScenarioConfig cfg;
  cfg.comm["plan->nav"] = 0.1;   // request leg
  cfg.comm["host->plan"] = 0.1;  // answer leg
  cfg.exec["plan"] = 0.5;
  cfg.request_period["nav->plan"] = 10.0;
  cfg.horizon = 1.0;

  auto events = simulate(service_graph(), cfg);
  REQUIRE(events.size() == 4);
  CHECK(events[0].kind == EventKind::SvcReqSend);
  CHECK(events[0].t == doctest::Approx(0.0));
  CHECK(events[1].kind == EventKind::SvcReqRecv);
  CHECK(events[1].t == doctest::Approx(0.1));
  CHECK(events[2].kind == EventKind::SvcAnsSend);
  CHECK(events[2].t == doctest::Approx(0.6));
  CHECK(events[3].kind == EventKind::SvcAnsRecv);
  CHECK(events[3].t == doctest::Approx(0.7));
  CHECK(events[0].observer == "nav");
  CHECK(events[1].observer == "host");
}

TEST_CASE("periodic topic fires strictly before the horizon") {
  ScenarioConfig cfg;
  cfg.comm["images->processor"] = 0.05;
  cfg.publish_period["images"] = 1.0;
  cfg.horizon = 2.5;

  auto events = simulate(topic_graph(), cfg);
  std::vector<double> recv_times;
  int pubs = 0;
  for (const auto& e : events) {
    if (e.kind == EventKind::TopPub) ++pubs;
    if (e.kind == EventKind::TopRecv) recv_times.push_back(e.t);
  }
  CHECK(pubs == 3);
  REQUIRE(recv_times.size() == 3);
  CHECK(recv_times[0] == doctest::Approx(0.05));
  CHECK(recv_times[1] == doctest::Approx(1.05));
  CHECK(recv_times[2] == doctest::Approx(2.05));
}

TEST_CASE("identical configuration gives byte-identical traces") {
  auto scenario = load_scenario(testing::slurp(testing::data_path("vision.scenario.json")));
  scenario.horizon = 50;
  auto graph = topic_graph();

  std::ostringstream a, b;
  trace::write_trace(simulate(graph, scenario), a);
  trace::write_trace(simulate(graph, scenario), b);
  CHECK(a.str() == b.str());
  CHECK(!a.str().empty());

  scenario.seed = 43;
  std::ostringstream c;
  trace::write_trace(simulate(graph, scenario), c);
  CHECK(a.str() != c.str());
}

TEST_CASE("simulated traces are causally ordered and pair cleanly") {
  auto scenario = load_scenario(testing::slurp(testing::data_path("vision.scenario.json")));
  scenario.horizon = 200;
  auto events = simulate(topic_graph(), scenario);

  std::map<std::uint64_t, double> pub_t, recv_t;
  for (const auto& e : events) {
    if (e.kind == EventKind::TopPub) pub_t[e.corr_id] = e.t;
    if (e.kind == EventKind::TopRecv) {
      recv_t[e.corr_id] = e.t;
      CHECK(e.t >= pub_t.at(e.corr_id));
    }
    if (e.kind == EventKind::TopDone) CHECK(e.t >= recv_t.at(e.corr_id));
  }

  auto paired = trace::pair_events(events);
  CHECK(paired.unpaired.empty());
  CHECK(paired.samples.size() == 2 * pub_t.size());
  for (const auto& s : paired.samples) {
    CHECK(s.value >= 0);
    if (s.kind == trace::DurationKind::BcastComm) {
      CHECK(s.value > 3.0);
      CHECK(s.value < 8.0);
    }
  }
}

TEST_CASE("histogram draws stay inside their bin and follow bin weights") {
  auto hist = testing::receive_histogram();
  Rng rng(42);
  std::map<int, int> bin_hits;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    double v = draw_duration(hist, rng);
    int bin = -1;
    for (std::size_t b = 0; b < hist.bins.size(); ++b)
      if (v > static_cast<double>(hist.bins[b].lo) && v < static_cast<double>(hist.bins[b].hi))
        bin = static_cast<int>(b);
    REQUIRE(bin >= 0);
    ++bin_hits[bin];
  }
  // Binomial 3-sigma at p=0.3, n=10^4 is about 0.014, so 0.02 has margin.
  CHECK(std::abs(bin_hits[0] / double(n) - 0.3) < 0.02);
  CHECK(std::abs(bin_hits[1] / double(n) - 0.6) < 0.02);
  CHECK(std::abs(bin_hits[2] / double(n) - 0.1) < 0.02);

  Rng again(42);
  Rng other(42);
  for (int i = 0; i < 100; ++i) CHECK(draw_duration(hist, again) == draw_duration(hist, other));
}

TEST_CASE("the random source is pinned to its documented sequence") {
  // mt19937_64 output is fixed by the standard and the uniform mapping is
  // spelled out in rng.hpp; these golden values freeze both, so a mismatch
  // means traces stopped being reproducible across builds.
  Rng engine(42);
  CHECK(engine.next_u64() == 13930160852258120406ULL);
  CHECK(engine.next_u64() == 11788048577503494824ULL);
  CHECK(engine.next_u64() == 13874630024467741450ULL);

  Rng uniform(42);
  CHECK(uniform.next_open01() == doctest::Approx(0.75515553295453897).epsilon(1e-15));
  CHECK(uniform.next_open01() == doctest::Approx(0.63903139385469743).epsilon(1e-15));

  Rng draws(7);
  auto hist = testing::receive_histogram();
  const double expected[] = {5.8986024057852884, 3.8919131767124764, 3.0550931585039431,
                             5.8014209529194165, 3.7179056846490033, 5.1923775615568664};
  for (double want : expected)
    CHECK(draw_duration(hist, draws) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("scenario validation names the offending element") {
  ScenarioConfig cfg;
  cfg.horizon = 1.0;
  cfg.comm["nope->images"] = 1.0;
  CHECK_THROWS_WITH_AS(simulate(topic_graph(), cfg), doctest::Contains("nope->images"), Error);

  ScenarioConfig cfg2;
  cfg2.horizon = 1.0;
  cfg2.publish_period["ghost"] = 1.0;
  CHECK_THROWS_WITH_AS(simulate(topic_graph(), cfg2), doctest::Contains("ghost"), Error);

  ScenarioConfig cfg3;
  cfg3.horizon = 0.0;
  CHECK_THROWS_AS(simulate(topic_graph(), cfg3), Error);
}

TEST_CASE("publications fan out to every subscriber with its own delay") {
  auto graph = rosgraph::load_graph(R"({
    "nodes": ["cam", "near", "far"],
    "topics": ["img"],
    "edges": [{"from":"cam","to":"img"}, {"from":"img","to":"near"}, {"from":"img","to":"far"}]
  })");
  ScenarioConfig cfg;
  cfg.comm["img->near"] = 0.01;
  cfg.comm["img->far"] = 0.2;
  cfg.publish_period["img"] = 1.0;
  cfg.horizon = 5.0;

  auto events = simulate(graph, cfg);
  std::size_t pubs = 0;
  std::map<std::string, std::vector<double>> recv_by_node;
  for (const auto& e : events) {
    if (e.kind == EventKind::TopPub) ++pubs;
    if (e.kind == EventKind::TopRecv) recv_by_node[e.observer].push_back(e.t - std::floor(e.t));
  }
  CHECK(pubs == 5);
  CHECK(recv_by_node["near"].size() == 5);
  CHECK(recv_by_node["far"].size() == 5);
  for (double offset : recv_by_node["near"]) CHECK(offset == doctest::Approx(0.01));
  for (double offset : recv_by_node["far"]) CHECK(offset == doctest::Approx(0.2));

  // One broadcast sample per delivery, one handler sample per delivery.
  auto paired = trace::pair_events(events);
  std::size_t bcast = 0;
  for (const auto& s : paired.samples)
    if (s.kind == trace::DurationKind::BcastComm) ++bcast;
  CHECK(bcast == pubs * 2);
  CHECK(paired.unpaired.empty());
}

TEST_CASE("queued service requests serialize per provider") {
  ScenarioConfig cfg;
  cfg.exec["plan"] = 3.0;
  cfg.request_period["nav->plan"] = 1.0;  // requests arrive faster than they finish
  cfg.horizon = 3.5;

  auto events = simulate(service_graph(), cfg);
  std::vector<double> ans_times;
  for (const auto& e : events)
    if (e.kind == EventKind::SvcAnsSend) ans_times.push_back(e.t);
  REQUIRE(ans_times.size() == 4);
  CHECK(ans_times[0] == doctest::Approx(3.0));
  CHECK(ans_times[1] == doctest::Approx(6.0));
  CHECK(ans_times[2] == doctest::Approx(9.0));
  CHECK(ans_times[3] == doctest::Approx(12.0));

  // One sample of each service kind per completed request.
  auto paired = trace::pair_events(events);
  std::map<trace::DurationKind, std::size_t> by_kind;
  for (const auto& s : paired.samples) ++by_kind[s.kind];
  CHECK(by_kind[trace::DurationKind::ReqComm] == 4);
  CHECK(by_kind[trace::DurationKind::SvcExec] == 4);
  CHECK(by_kind[trace::DurationKind::AnsComm] == 4);
  CHECK(paired.unpaired.empty());
}
