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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "timely/cli.hpp"

using namespace timely;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "timely_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = temp_dir() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("check prints one line per granularity with six decimals") {
  auto model_path = (temp_dir() / "fig_original.model.json").string();
  auto compile = cli_run({"compile", "--pipeline",
                          testing::data_path("vision_original_inline.pipeline.json"), "--out",
                          model_path});
  REQUIRE_MESSAGE(compile.code == 0, compile.err);

  auto r = cli_run({"check", "--model", model_path, "--query", "Pmax=?[F<=35 \"Success\"]",
                    "--granularity", "2,4"});
  CHECK(r.code == 0);
  CHECK(testing::contains(r.out, "g=2 value=0.910000"));
  CHECK(testing::contains(r.out, "g=4 value=0.910000"));
  CHECK(testing::contains(r.out, "exact=0.91"));
}

TEST_CASE("missing files give exit 1 with the path in the message") {
  auto r = cli_run({"check", "--model", "missing.json", "--query", "Pmax=?[F \"x\"]"});
  CHECK(r.code == 1);
  CHECK(testing::contains(r.err, "cannot read missing.json"));
}

TEST_CASE("bad granularity lists are usage errors") {
  auto model_path = (temp_dir() / "u.model.json").string();
  REQUIRE(cli_run({"compile", "--pipeline",
                   testing::data_path("vision_original_inline.pipeline.json"), "--out",
                   model_path})
              .code == 0);
  auto r = cli_run({"check", "--model", model_path, "--query", "Pmax=?[F \"Success\"]",
                    "--granularity", "2,2"});
  CHECK(r.code == 2);

  auto r2 = cli_run({"check", "--model", model_path, "--query", "Pmax=?[F \"Success\"]",
                     "--granularity", "0"});
  CHECK(r2.code == 2);
}

TEST_CASE("unknown subcommands and missing options are usage errors") {
  CHECK(cli_run({"frobnicate"}).code == 2);
  CHECK(cli_run({"check"}).code == 2);
  CHECK(cli_run({}).code == 2);
  CHECK(cli_run({"--help"}).code == 0);
}

TEST_CASE("malformed queries are domain errors") {
  auto model_path = (temp_dir() / "q.model.json").string();
  REQUIRE(cli_run({"compile", "--pipeline",
                   testing::data_path("vision_original_inline.pipeline.json"), "--out",
                   model_path})
              .code == 0);
  auto r = cli_run({"check", "--model", model_path, "--query", "P=?[G \"Success\"]"});
  CHECK(r.code == 1);
  CHECK(testing::contains(r.err, "only F and F<=T"));
}

TEST_CASE("compile fails cleanly on unbound references and writes nothing") {
  auto out_path = temp_dir() / "never.model.json";
  fs::remove(out_path);
  auto r = cli_run({"compile", "--pipeline", testing::data_path("vision_original.pipeline.json"),
                    "--out", out_path.string()});
  CHECK(r.code == 1);
  CHECK(testing::contains(r.err, "images:BcastComm"));
  CHECK(!fs::exists(out_path));
}

TEST_CASE("prism conversion commands round-trip through files") {
  auto dir = temp_dir();
  auto model_path = (dir / "ref.model.json").string();
  auto prism_path = (dir / "ref.prism").string();

  auto r1 = cli_run({"parse-prism", "--in", testing::data_path("improved_reference_labeled.prism"),
                     "--out", model_path});
  REQUIRE_MESSAGE(r1.code == 0, r1.err);
  auto r2 = cli_run({"export-prism", "--model", model_path, "--out", prism_path});
  REQUIRE_MESSAGE(r2.code == 0, r2.err);

  auto check = cli_run({"check", "--model", model_path, "--query", "Pmax=?[F<=35 \"Success\"]",
                        "--granularity", "8"});
  REQUIRE_MESSAGE(check.code == 0, check.err);
  CHECK(testing::contains(check.out, "g=8 value=0.972370"));

  auto bad = cli_run({"parse-prism", "--in", write_temp("bad.prism", "mdp\nmodule M\nendmodule\n"),
                      "--out", (dir / "bad.json").string()});
  CHECK(bad.code == 1);
  CHECK(testing::contains(bad.err, "only pta"));
}

TEST_CASE("simulate and estimate chain through files") {
  auto dir = temp_dir();
  auto traces = (dir / "t.jsonl").string();
  auto stats_path = (dir / "stats.json").string();

  auto sim = cli_run({"simulate", "--graph", testing::data_path("vision.graph.json"),
                      "--scenario", testing::data_path("vision.scenario.json"), "--out", traces,
                      "--horizon", "100"});
  REQUIRE_MESSAGE(sim.code == 0, sim.err);
  CHECK(fs::exists(traces));

  auto est = cli_run({"estimate", "--traces", traces, "--unit", "1", "--min-bin-prob", "0.06",
                      "--out", stats_path});
  REQUIRE_MESSAGE(est.code == 0, est.err);
  CHECK(testing::contains(est.out, "images:BcastComm"));
  CHECK(fs::exists(stats_path));

  auto parsed = stats::read_stats(testing::slurp(stats_path));
  CHECK(parsed.count("images:BcastComm") == 1);
  CHECK(parsed.count("images:HandlerTime") == 1);
}
