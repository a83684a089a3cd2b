// Copyright 2026 The gnslab Authors
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


#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "catch_amalgamated.hpp"
#include "gnslab/cli.hpp"

using namespace gnslab;
namespace fs = std::filesystem;

namespace {

struct Proc {
  int code = -1;
  std::string out;
};

Proc run(const std::string& args) {
  const std::string cmd = std::string(GNSLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
  const int status = pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

std::string demo(const char* f) { return (fs::path(GNSLAB_DEMO_DIR) / f).string(); }

cli::RunConfig config(std::vector<std::string> inputs = {}) {
  cli::RunConfig c;
  c.seed = 3;
  c.samples = 300;
  c.inputs = std::move(inputs);
  return c;
}

const Json* find_check(const Json& rep, const std::string& name) {
  for (const auto& c : rep["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("gnslab_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("check on the right-multiplication map", "[cli]") {
  const cli::CommandResult r = cli::cmd_check(config({demo("right_mult_m2.json")}));
  CHECK(r.exit_code == cli::kPass);
  const Json j = Json::parse(r.output);
  for (const char* name : {"positivity", "symmetry", "cs_factor2", "cs_factor1_c_linear", "invariance",
                           "module_bound", "admissibility", "density"}) {
    INFO(name);
    REQUIRE(find_check(j, name) != nullptr);
    CHECK((*find_check(j, name))["status"] == "pass");
  }
  // sorted by name
  std::vector<std::string> names;
  for (const auto& c : j["checks"]) names.push_back(c["name"]);
  CHECK(std::is_sorted(names.begin(), names.end()));
  CHECK(j["environment"]["seed"] == 3);
}

TEST_CASE("broken symmetry", "[cli]") {
  const cli::CommandResult r = cli::cmd_check(config({demo("broken_symmetry.json")}));
  CHECK(r.exit_code == cli::kCheckFailed);
  const Json j = Json::parse(r.output);
  const Json* s = find_check(j, "symmetry");
  REQUIRE(s != nullptr);
  CHECK((*s)["status"] == "fail");
  CHECK((*s)["witness"] == "(i,j)=(0,1)");
  for (const auto& c : j["checks"])
    if (c["status"] == "fail") CHECK(c.contains("witness"));
}

TEST_CASE("suite selection", "[cli]") {
  cli::RunConfig c = config({demo("broken_symmetry.json")});
  c.suite = "";
  cli::CommandResult r = cli::cmd_check(c);
  CHECK(r.exit_code == cli::kPass);
  CHECK(Json::parse(r.output)["checks"].empty());
  c.suite = "positivity";
  r = cli::cmd_check(c);
  CHECK(Json::parse(r.output)["checks"].size() == 1);
  c.suite = "nonsense";
  CHECK(cli::cmd_check(c).exit_code == cli::kInputError);
}

TEST_CASE("input errors", "[cli]") {
  const cli::CommandResult r = cli::cmd_check(config({demo("malformed.json")}));
  CHECK(r.exit_code == cli::kInputError);
  CHECK(r.message.find("malformed JSON at byte") != std::string::npos);
  CHECK(cli::cmd_check(config({demo("does_not_exist.json")})).exit_code == cli::kInputError);
  CHECK(cli::cmd_gns(config()).exit_code == cli::kInputError);
  cli::RunConfig big = config();
  big.m = 9;
  CHECK(cli::cmd_examples(big).exit_code == cli::kInputError);
  big.m = 2;
  big.grid = 257;
  CHECK(cli::cmd_examples(big).exit_code == cli::kInputError);
  big.grid = 16;
  big.which = "unknown";
  CHECK(cli::cmd_examples(big).exit_code == cli::kInputError);
  cli::RunConfig rd = config();
  rd.dim = 0;
  CHECK(cli::cmd_random(rd).exit_code == cli::kInputError);
}

TEST_CASE("gns command", "[cli]") {
  SECTION("trace state") {
    cli::RunConfig c = config({demo("trace_state_m2.json")});
    c.verify_uniqueness = true;
    const cli::CommandResult r = cli::cmd_gns(c);
    CHECK(r.exit_code == cli::kPass);
    const Json j = Json::parse(r.output);
    CHECK(j["triple"]["rep_dim"] == 4);
    for (const auto& [k, v] : j["triple"]["residuals"].items()) CHECK(v.get<double>() <= 1e-9);
    CHECK(find_check(j, "equivalence_intertwining") != nullptr);
    CHECK(find_check(j, "reconstruction") != nullptr);
  }
  SECTION("zero map") {
    const cli::CommandResult r = cli::cmd_gns(config({demo("zero_map.json")}));
    CHECK(r.exit_code == cli::kPass);
    CHECK(Json::parse(r.output)["triple"]["rep_dim"] == 0);
  }
  SECTION("non-dense core") {
    const cli::CommandResult r = cli::cmd_gns(config({demo("non_dense.json")}));
    CHECK(r.exit_code == cli::kCheckFailed);
    const Json j = Json::parse(r.output);
    const Json* ic = find_check(j, "i_class");
    REQUIRE(ic != nullptr);
    CHECK((*ic)["witness"].get<std::string>().find("not in I-class") != std::string::npos);
  }
  SECTION("triple file") {
    const fs::path d = scratch("triple");
    cli::RunConfig c = config({demo("right_mult_m2.json")});
    c.triple_out = (d / "t.json").string();
    CHECK(cli::cmd_gns(c).exit_code == cli::kPass);
    CHECK(io::read_file(d / "t.json")["rep_dim"] == 4);
    fs::remove_all(d);
  }
}

TEST_CASE("examples pass their own checks", "[cli]") {
  const fs::path d = scratch("examples");
  for (const char* which : {"right-mult", "trace-state", "schatten", "pettis", "series", "omega", "omega-pettis"}) {
    INFO(which);
    cli::RunConfig c = config();
    c.which = which;
    c.grid = 8;
    const cli::CommandResult e = cli::cmd_examples(c);
    REQUIRE(e.exit_code == cli::kPass);
    const fs::path f = d / (std::string(which) + ".json");
    io::write_file(f, Json::parse(e.output));
    // round trip re-validates
    const SesquiMap phi = io::load_map(f);
    CHECK(validate(phi.domain()).passed("a0_subalgebra"));
    const cli::CommandResult chk = cli::cmd_check(config({f.string()}));
    CHECK(chk.exit_code == cli::kPass);
    CHECK(cli::cmd_gns(config({f.string()})).exit_code == cli::kPass);
  }
  // instance file
  cli::RunConfig c = config();
  c.instance = demo("instance_m2.json");
  const cli::CommandResult e = cli::cmd_examples(c);
  CHECK(e.exit_code == cli::kPass);
  fs::remove_all(d);
}

TEST_CASE("random maps", "[cli]") {
  cli::RunConfig c = config();
  c.seed = 7;
  const cli::CommandResult a = cli::cmd_random(c), b = cli::cmd_random(c);
  CHECK(a.output == b.output);
  c.seed = 8;
  CHECK(cli::cmd_random(c).output != a.output);
  const fs::path d = scratch("random");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    c.seed = seed;
    c.invariant = true;
    io::write_file(d / "inv.json", Json::parse(cli::cmd_random(c).output));
    cli::RunConfig k = config({(d / "inv.json").string()});
    k.suite = "invariance,positivity";
    CHECK(cli::cmd_check(k).exit_code == cli::kPass);
  }
  fs::remove_all(d);
}

TEST_CASE("report merge", "[cli]") {
  const fs::path d = scratch("report");
  io::write_file(d / "a.json", Json::parse(cli::cmd_check(config({demo("right_mult_m2.json")})).output));
  io::write_file(d / "b.json", Json::parse(cli::cmd_check(config({demo("broken_symmetry.json")})).output));
  const cli::CommandResult r = cli::cmd_report(config({(d / "a.json").string(), (d / "b.json").string()}));
  CHECK(r.exit_code == cli::kCheckFailed);
  const cli::CommandResult ok = cli::cmd_report(config({(d / "a.json").string()}));
  CHECK(ok.exit_code == cli::kPass);
  fs::remove_all(d);
}

TEST_CASE("executable", "[cli][process]") {
  Proc p = run("check --seed 1 --samples 200 " + demo("right_mult_m2.json"));
  CHECK(p.code == 0);
  CHECK(Json::parse(p.out)["environment"]["seed"] == 1);
  CHECK(run("check --samples 200 " + demo("broken_symmetry.json")).code == 1);
  CHECK(run("check " + demo("malformed.json")).code == 2);
  CHECK(run("gns --samples 200 " + demo("non_dense.json")).code == 1);
  CHECK(run("gns --samples 200 " + demo("zero_map.json")).code == 0);
  CHECK(run("check --suite \"\" " + demo("broken_symmetry.json")).code == 0);
  CHECK(run("examples --which schatten --m 9").code == 2);
  CHECK(run("frobnicate").code == 2);
  const Proc r1 = run("random --seed 7"), r2 = run("random --seed 7");
  CHECK(r1.code == 0);
  CHECK(r1.out == r2.out);
  const Proc c1 = run("check --seed 5 --samples 500 " + demo("pettis_m2.json"));
  const Proc c2 = run("check --seed 5 --samples 500 " + demo("pettis_m2.json"));
  CHECK(c1.code == 0);
  CHECK(c1.out == c2.out);
  const fs::path d = scratch("proc");
  const std::string out = (d / "s.json").string();
  CHECK(run("examples --which schatten --m 2 --grid 16 --out " + out).code == 0);
  CHECK(run("check --samples 200 " + out).code == 0);
  fs::remove_all(d);
}
