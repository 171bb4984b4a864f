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

#include "timely/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "timely/checker.hpp"
#include "timely/errors.hpp"
#include "timely/pipeline.hpp"
#include "timely/prism.hpp"
#include "timely/ptp_io.hpp"
#include "timely/rosgraph.hpp"
#include "timely/simulator.hpp"
#include "timely/stats.hpp"
#include "timely/trace.hpp"

namespace timely::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Write to a temporary sibling and rename, so failures never leave a
// truncated output file behind.
void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot replace " + path + ": " + ec.message());
  }
}

struct CheckArgs {
  std::string model_path;
  std::string query;
  std::string granularities = "2";
  double epsilon = 1e-10;
  std::size_t state_cap = 5'000'000;
  bool force_vi = false;
};

std::vector<std::uint32_t> parse_granularities(const std::string& text) {
  std::vector<std::uint32_t> gs;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) throw CLI::ValidationError("--granularity", "empty entry in list");
    std::size_t idx = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(part, &idx);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--granularity", "'" + part + "' is not a positive integer");
    }
    if (idx != part.size() || v == 0)
      throw CLI::ValidationError("--granularity", "'" + part + "' is not a positive integer");
    gs.push_back(static_cast<std::uint32_t>(v));
  }
  if (gs.empty()) throw CLI::ValidationError("--granularity", "list is empty");
  for (std::size_t i = 1; i < gs.size(); ++i) {
    if (gs[i] <= gs[i - 1])
      throw CLI::ValidationError("--granularity", "values must be strictly increasing");
    if (gs[i] % gs[i - 1] != 0)
      throw CLI::ValidationError("--granularity", "each value must divide the next");
  }
  return gs;
}

int run_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
  auto gs = parse_granularities(args.granularities);
  auto model = ptp::load_model(read_file(args.model_path));
  auto query = checker::parse_query(args.query);

  checker::CheckOptions options;
  options.state_cap = args.state_cap;
  options.solve.epsilon = args.epsilon;
  options.solve.force_value_iteration = args.force_vi;

  auto results = checker::granularity_ladder(model, query, gs, options);
  for (const auto& r : results) {
    out << "g=" << r.granularity << " value=" << std::fixed << std::setprecision(6) << r.value;
    out.unsetf(std::ios::fixed);
    if (r.exact) out << " exact=" << rational_to_string(*r.exact);
    out << "\n";
    err << "g=" << r.granularity << ": " << r.reachable_states << " states, "
        << (r.method == checker::Method::TopologicalExact ? "topological-exact"
                                                          : "value-iteration")
        << ", " << r.iterations << " iterations, " << std::setprecision(1) << std::fixed
        << r.wall_ms << " ms\n";
    err.unsetf(std::ios::fixed);
  }
  if (!checker::ladder_monotone(results, query.opt))
    err << "warning: ladder values are not monotone across granularities; "
           "this indicates a bug in the checker\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"timing estimation and probabilistic verification for "
               "message-passing robot systems"};
  app.require_subcommand(1);

  // --- simulate ---
  auto* sim_cmd = app.add_subcommand("simulate", "run a scenario and write a trace log");
  std::string sim_graph, sim_scenario, sim_out;
  std::int64_t sim_seed = -1;
  double sim_horizon = -1;
  sim_cmd->add_option("--graph", sim_graph, "graph JSON file")->required();
  sim_cmd->add_option("--scenario", sim_scenario, "scenario JSON file")->required();
  sim_cmd->add_option("--out", sim_out, "output trace (JSON Lines)")->required();
  sim_cmd->add_option("--seed", sim_seed, "override the scenario seed");
  sim_cmd->add_option("--horizon", sim_horizon, "override the scenario horizon (seconds)");

  // --- estimate ---
  auto* est_cmd = app.add_subcommand("estimate", "build duration histograms from a trace log");
  std::string est_traces, est_out;
  double est_unit = 1.0;
  double est_min_bin_prob = 0.05;
  est_cmd->add_option("--traces", est_traces, "trace log (JSON Lines)")->required();
  est_cmd->add_option("--unit", est_unit, "seconds per model time unit")->check(CLI::PositiveNumber);
  est_cmd->add_option("--min-bin-prob", est_min_bin_prob, "merge bins below this probability")
      ->check(CLI::Range(0.0, 1.0));
  est_cmd->add_option("--out", est_out, "output stats JSON")->required();

  // --- compile ---
  auto* comp_cmd = app.add_subcommand("compile", "compile a pipeline into a model");
  std::string comp_pipeline, comp_stats, comp_out;
  comp_cmd->add_option("--pipeline", comp_pipeline, "pipeline JSON file")->required();
  comp_cmd->add_option("--stats", comp_stats, "stats JSON for duration references");
  comp_cmd->add_option("--out", comp_out, "output model JSON")->required();

  // --- check ---
  auto* check_cmd = app.add_subcommand("check", "answer a reachability query on a model");
  CheckArgs check_args;
  check_cmd->add_option("--model", check_args.model_path, "model JSON file")->required();
  check_cmd->add_option("--query", check_args.query, "e.g. 'Pmax=?[F<=35 \"Success\"]'")
      ->required();
  check_cmd->add_option("--granularity", check_args.granularities,
                        "comma-separated grid subdivisions, e.g. 2,4,8");
  check_cmd->add_option("--epsilon", check_args.epsilon, "value iteration tolerance")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--state-cap", check_args.state_cap, "maximum digitized states");
  check_cmd->add_flag("--value-iteration", check_args.force_vi,
                      "skip the exact topological pass");

  // --- export-prism ---
  auto* exp_cmd = app.add_subcommand("export-prism", "write a model as a pta program");
  std::string exp_model, exp_out;
  exp_cmd->add_option("--model", exp_model, "model JSON file")->required();
  exp_cmd->add_option("--out", exp_out, "output .prism file")->required();

  // --- parse-prism ---
  auto* par_cmd = app.add_subcommand("parse-prism", "convert a pta program to model JSON");
  std::string par_in, par_out;
  par_cmd->add_option("--in", par_in, "input .prism file")->required();
  par_cmd->add_option("--out", par_out, "output model JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (sim_cmd->parsed()) {
      auto graph = rosgraph::load_graph(read_file(sim_graph));
      auto scenario = sim::load_scenario(read_file(sim_scenario));
      if (sim_seed >= 0) scenario.seed = static_cast<std::uint64_t>(sim_seed);
      if (sim_horizon >= 0) scenario.horizon = sim_horizon;
      auto events = sim::simulate(graph, scenario);
      std::ostringstream buf;
      trace::write_trace(events, buf);
      write_file_atomic(sim_out, buf.str());
      err << events.size() << " events written to " << sim_out << "\n";
      return 0;
    }

    if (est_cmd->parsed()) {
      std::istringstream in(read_file(est_traces));
      auto events = trace::read_trace(in);
      auto paired = trace::pair_events(events);
      if (!paired.unpaired.empty())
        err << "note: " << paired.unpaired.size() << " events had no partner and were ignored\n";

      std::map<std::string, std::vector<double>> groups;
      for (const auto& s : paired.samples)
        groups[s.channel + ":" + to_string(s.kind)].push_back(s.value);

      stats::StatsMap out_stats;
      for (const auto& [key, samples] : groups) {
        std::size_t negatives = 0;
        bool has_zero = false;
        for (double v : samples) {
          if (v < 0) ++negatives;
          if (v == 0) has_zero = true;
        }
        if (negatives > 0)
          throw Error(key + ": " + std::to_string(negatives) +
                      " negative durations; check the log's clock offsets");
        if (has_zero) {
          err << "warning: skipping " << key << " (zero-length durations cannot be binned)\n";
          continue;
        }
        out_stats[key] = stats::build_histogram(samples, rational_from_double(est_unit),
                                                rational_from_double(est_min_bin_prob));
        auto summary = stats::summarize_samples(samples);
        out << key << " count=" << summary.count << " mean=" << summary.mean
            << " p50=" << summary.p50 << " p90=" << summary.p90 << " p99=" << summary.p99
            << "\n";
      }
      write_file_atomic(est_out, stats::write_stats(out_stats));
      return 0;
    }

    if (comp_cmd->parsed()) {
      auto spec = pipeline::load_pipeline(read_file(comp_pipeline));
      stats::StatsMap stats_map;
      if (!comp_stats.empty()) stats_map = stats::read_stats(read_file(comp_stats));
      spec = pipeline::bind_statistics(spec, stats_map);
      auto model = pipeline::compile_pipeline(spec);
      write_file_atomic(comp_out, ptp::write_model(model));
      return 0;
    }

    if (check_cmd->parsed()) return run_check(check_args, out, err);

    if (exp_cmd->parsed()) {
      auto model = ptp::load_model(read_file(exp_model));
      write_file_atomic(exp_out, prism::export_prism(model));
      return 0;
    }

    if (par_cmd->parsed()) {
      auto model = prism::parse_prism(read_file(par_in));
      write_file_atomic(par_out, ptp::write_model(model));
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace timely::cli
