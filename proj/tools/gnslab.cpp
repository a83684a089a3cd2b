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


#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gnslab/cli.hpp"

namespace {

using gnslab::cli::CommandResult;
using gnslab::cli::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "PRNG seed");
  sub->add_option("--tol", cfg.tol, "relative tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--samples", cfg.samples, "samples per sampled check")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", cfg.out, "output file (default stdout)");
}

void add_example_opts(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--m", cfg.m, "matrix size");
  sub->add_option("--grid", cfg.grid, "grid points");
  sub->add_option("--p", cfg.p, "Schatten exponent");
  sub->add_option("--rho-unit", cfg.rho_unit, "rho(I)");
  sub->add_option("--curve-dim", cfg.h, "size h of the curve codomain M_h");
  sub->add_option("--blocks", cfg.blocks, "block sizes for right-mult");
  sub->add_option("--instance", cfg.instance, "example instance JSON");
}

int emit(const CommandResult& r, const RunConfig& cfg) {
  if (!r.message.empty()) std::cerr << r.message << "\n";
  if (!r.output.empty()) {
    if (cfg.out.empty()) {
      std::cout << r.output;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) {
        std::cerr << "cannot write " << cfg.out << "\n";
        return gnslab::cli::kInputError;
      }
      f << r.output;
    }
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gnslab: GNS representations of positive C*-valued sesquilinear maps"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string suite;

  auto* check = app.add_subcommand("check", "run verification suites on a map file");
  add_common(check, cfg);
  check->add_option("map", cfg.inputs, "map JSON")->expected(0, 1);
  auto* suite_opt = check->add_option("--suite", suite, "comma separated suites");

  auto* gns = app.add_subcommand("gns", "build and verify the GNS triple");
  add_common(gns, cfg);
  gns->add_option("map", cfg.inputs, "map JSON")->required();
  gns->add_flag("--verify-uniqueness", cfg.verify_uniqueness, "rebuild in a rotated basis and compare");
  gns->add_option("--triple", cfg.triple_out, "also write the triple to this file");

  auto* ex = app.add_subcommand("examples", "emit an example map");
  add_common(ex, cfg);
  add_example_opts(ex, cfg);
  ex->add_option("--which", cfg.which, "right-mult|trace-state|schatten|pettis|series|omega|omega-pettis");

  auto* rnd = app.add_subcommand("random", "emit a seeded random map");
  add_common(rnd, cfg);
  rnd->add_option("--dim", cfg.dim, "maximal dimension of A");
  rnd->add_flag("--invariant", cfg.invariant, "invariant by construction");

  auto* rep = app.add_subcommand("report", "merge report files");
  add_common(rep, cfg);
  rep->add_option("reports", cfg.inputs, "report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gnslab::cli::kInputError;
  }
  if (suite_opt->count() > 0) cfg.suite = suite;

  if (check->parsed()) return emit(gnslab::cli::cmd_check(cfg), cfg);
  if (gns->parsed()) return emit(gnslab::cli::cmd_gns(cfg), cfg);
  if (ex->parsed()) return emit(gnslab::cli::cmd_examples(cfg), cfg);
  if (rnd->parsed()) return emit(gnslab::cli::cmd_random(cfg), cfg);
  return emit(gnslab::cli::cmd_report(cfg), cfg);
}
