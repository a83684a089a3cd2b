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

#pragma once

// Command implementations behind the gnslab tool. Each command is a pure
// function of its RunConfig and input files and returns the text to emit.

#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gnslab/cstar.hpp"
#include "gnslab/errors.hpp"
#include "gnslab/gns.hpp"
#include "gnslab/nc_examples.hpp"
#include "gnslab/quasi_algebra.hpp"
#include "gnslab/random.hpp"
#include "gnslab/report.hpp"
#include "gnslab/serialization.hpp"
#include "gnslab/sesq_map.hpp"

namespace gnslab::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kInputError = 2 };

struct RunConfig {
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  int samples = 10000;
  std::vector<std::string> inputs;
  std::string out;
  std::optional<std::string> suite;  // comma separated; empty string selects nothing

  // gns
  bool verify_uniqueness = false;
  std::string triple_out;

  // examples / random
  std::string which = "schatten";
  int m = 2;
  std::vector<int> blocks{2};
  int grid = 16;
  double p = 2.0;
  double rho_unit = 1.0;
  int h = 2;
  std::string instance;
  int dim = 6;
  bool invariant = false;

  int max_m = 8;
  int max_grid = 256;
};

struct CommandResult {
  int exit_code = kPass;
  std::string output;   // JSON document
  std::string message;  // diagnostics for stderr
};

inline const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> s{"admissibility", "cs",        "density",
                                          "invariance",    "module",    "positivity",
                                          "quasi_triangle", "symmetry"};
  return s;
}

namespace detail {

inline io::RunEnvironment environment(const RunConfig& c) { return {c.seed, c.tol, c.samples}; }

inline std::set<std::string> selected_suites(const RunConfig& c) {
  if (!c.suite) return {check_suites().begin(), check_suites().end()};
  std::set<std::string> out;
  std::stringstream ss(*c.suite);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (std::find(check_suites().begin(), check_suites().end(), item) == check_suites().end())
      throw PreconditionError("unknown suite '" + item + "'");
    out.insert(item);
  }
  return out;
}

inline CommandResult finish(Report rep, const RunConfig& c, Json extra = Json::object()) {
  Json j = io::report_to_json(rep, environment(c));
  for (auto& [k, v] : extra.items()) j[k] = v;
  return {rep.all_passed() ? kPass : kCheckFailed, io::dump(j), ""};
}

template <class F>
CommandResult guarded(F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    return {kInputError, "", e.what()};
  } catch (const StructuralError& e) {
    return {kInputError, "", e.what()};
  } catch (const PreconditionError& e) {
    return {kInputError, "", e.what()};
  } catch (const DomainError& e) {
    return {kInputError, "", e.what()};
  } catch (const ClosureError& e) {
    return {kInputError, "", e.what()};
  }
}

inline void require_inputs(const RunConfig& c, std::size_t n) {
  if (c.inputs.size() < n) throw PreconditionError("missing input file");
}

inline CheckResult symmetry_check(const SesquiMap& phi, double tol) {
  CheckResult r{"symmetry"};
  int wi = -1, wj = -1;
  const double scale = std::max(phi.scale(), 1e-300);
  const double res = phi.form().symmetry_residual(&wi, &wj) / scale;
  r.residual = res;
  r.passed = res <= tol;
  if (!r.passed) r.witness = "(i,j)=(" + std::to_string(wi) + "," + std::to_string(wj) + ")";
  return r;
}

}  // namespace detail

/// Runs the selected verification suites on one map file.
inline Report run_checks(const SesquiMap& phi, const std::set<std::string>& suites, const RunConfig& c) {
  Report rep;
  Rng rng(c.seed);
  const double tol = c.tol;
  const int n = c.samples;
  if (suites.count("symmetry")) rep.add(detail::symmetry_check(phi, tol));
  if (suites.count("positivity"))
    rep.add(check_positivity(phi, PositivityMode::Certificate, n, rng, tol).as_check());
  if (suites.count("cs")) rep.merge(check_cs(phi, n, rng, tol, phi.flags().c_linear));
  if (suites.count("invariance")) rep.add(check_invariance(phi, tol));
  if (suites.count("module")) {
    if (phi.action()) {
      rep.merge(check_c_linearity(phi, &*phi.action(), n, rng, tol));
      Report mb = check_module_bound(phi, &*phi.action(), n, rng, tol);
      for (const auto& r : mb.checks())
        if (r.name != "right_action") rep.add(r);
    } else {
      CheckResult r{"module_bound"};
      r.note = "not applicable: no right action declared";
      rep.add(r);
    }
  }
  if (suites.count("admissibility")) rep.add(check_admissibility(phi, n, rng, tol).result);
  if (suites.count("density") || suites.count("quasi_triangle")) {
    const QuotientSpace qs = null_space(phi, tol);
    if (suites.count("density")) rep.add(density_result(phi, qs, tol));
    if (suites.count("quasi_triangle")) rep.merge(quasi_triangle_check(qs, n, rng, tol));
  }
  return rep;
}

inline CommandResult cmd_check(const RunConfig& c) {
  return detail::guarded([&] {
    const std::set<std::string> suites = detail::selected_suites(c);
    if (suites.empty()) return detail::finish(Report{}, c);
    detail::require_inputs(c, 1);
    const SesquiMap phi = io::load_map(c.inputs[0]);
    return detail::finish(run_checks(phi, suites, c), c);
  });
}

inline CommandResult cmd_gns(const RunConfig& c) {
  return detail::guarded([&] {
    detail::require_inputs(c, 1);
    const SesquiMap phi = io::load_map(c.inputs[0]);
    Report rep;
    GnsTriple t;
    try {
      t = build_gns(phi, {c.tol, std::nullopt});
    } catch (const RejectedError& e) {
      CheckResult r{"i_class", false};
      r.witness = e.what();
      rep.add(r);
      CommandResult out = detail::finish(rep, c);
      out.message = e.what();
      return out;
    }
    CheckResult icl{"i_class"};
    icl.note = "rep_dim " + std::to_string(t.rep_dim());
    rep.add(icl);
    rep.merge(verify_representation(t, c.tol));
    if (c.verify_uniqueness) {
      Rng rng(c.seed);
      const GnsTriple t2 = build_gns(phi, {c.tol, random_rotation(t.rep_dim(), rng)});
      rep.merge(unitary_equivalence(t, t2, c.tol).report);
    }
    const Json triple = io::to_json(t);
    if (!c.triple_out.empty()) io::write_file(c.triple_out, triple);
    return detail::finish(rep, c, Json{{"triple", triple}});
  });
}

namespace detail {

inline void require_sizes(const RunConfig& c, int m, int grid) {
  if (m < 1 || m > c.max_m) throw PreconditionError("m must lie in [1, " + std::to_string(c.max_m) + "]");
  if (grid < 2 || grid > c.max_grid)
    throw PreconditionError("grid must lie in [2, " + std::to_string(c.max_grid) + "]");
}

inline Mat default_core(int m) {
  Mat w = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) w(i, i) = static_cast<double>(i + 1) / m;
  return w;
}

inline io::ExampleInstance instance(const RunConfig& c) {
  io::ExampleInstance e;
  if (!c.instance.empty()) {
    e = io::instance_from_json(io::read_file(c.instance));
  } else {
    e.m = c.m;
    e.p = c.p;
    e.rho_unit = c.rho_unit;
    e.n_grid = c.grid;
    e.w = default_core(c.m);
  }
  require_sizes(c, e.m, e.n_grid);
  return e;
}

inline OperatorValuedCurve curve_for(const io::ExampleInstance& e, int h, Rng& rng) {
  const std::vector<double> grid = calculus_grid(e.w, e.n_grid);
  if (e.curve) return OperatorValuedCurve(grid, *e.curve);
  return random_curve(h, grid, rng);
}

}  // namespace detail

/// Materialises an example map at the requested size.
inline SesquiMap build_example(const RunConfig& c) {
  Rng rng(c.seed);
  const std::string& w = c.which;
  if (w == "right-mult") {
    for (int n : c.blocks)
      if (n < 1 || n > c.max_m) throw PreconditionError("block sizes must lie in [1, " + std::to_string(c.max_m) + "]");
    return phi_right_mult(CStarAlgebra(c.blocks));
  }
  if (w == "trace-state") {
    detail::require_sizes(c, c.m, 2);
    auto q = std::make_shared<const QuasiStarAlgebra>(full_matrix_model(c.m));
    LinearMap tr{q, CStarAlgebra({1}), {}};
    for (const Mat& e : q->basis()) tr.values.push_back(AlgebraElement{{Mat::Constant(1, 1, e.trace() / double(c.m))}});
    MapFlags f;
    f.positivity = Certificate::Structural;
    f.invariant = true;
    f.faithful = true;
    return tr.induced_map(c.tol, f);
  }
  if (c.h < 1 || c.h > c.max_m) throw PreconditionError("h must lie in [1, " + std::to_string(c.max_m) + "]");
  const io::ExampleInstance e = detail::instance(c);
  const TraceAlgebra ta(e.m, e.p, e.rho_unit);
  if (w == "schatten") return schatten_trace_map(ta, e.w, e.n_grid, c.tol);
  if (w == "pettis") return pettis_integral_map(ta, e.w, detail::curve_for(e, c.h, rng), c.tol);
  if (w == "omega") {
    MapFlags f;
    f.positivity = Certificate::Structural;
    f.invariant = true;
    return omega_trace_functional(ta, e.w, e.n_grid, c.tol).induced_map(c.tol, f);
  }
  if (w == "omega-pettis") {
    MapFlags f;
    f.positivity = Certificate::Structural;
    f.invariant = true;
    return omega_pettis(ta, e.w, detail::curve_for(e, c.h, rng), c.tol).induced_map(c.tol, f);
  }
  if (w == "series") {
    std::vector<SesquiMap> terms;
    std::vector<AlgebraElement> coeffs;
    const CStarAlgebra ch({c.h});
    for (int n = 0; n < 2; ++n) {
      const Mat wn = n == 0 ? e.w : random_psd_core(e.m, rng, linalg::spectral_norm(e.w));
      const OperatorValuedCurve curve =
          (n == 0 && e.curve) ? OperatorValuedCurve(calculus_grid(wn, e.n_grid), *e.curve)
                              : random_curve(c.h, calculus_grid(wn, e.n_grid), rng);
      terms.push_back(pettis_integral_map(ta, wn, curve, c.tol));
      coeffs.push_back(AlgebraElement{{rng.ginibre(c.h, c.h) * (0.5 / (n + 1))}});
    }
    return series_map(terms, coeffs);
  }
  throw PreconditionError("unknown example '" + w + "'");
}

inline CommandResult cmd_examples(const RunConfig& c) {
  return detail::guarded([&] {
    return CommandResult{kPass, io::dump(io::to_json(build_example(c))), ""};
  });
}

/// Seeded fuzzing maps: block-Gram, or invariant by construction.
inline SesquiMap build_random(const RunConfig& c) {
  if (c.dim < 1 || c.dim > 36) throw PreconditionError("dim must lie in [1, 36]");
  Rng rng(c.seed);
  if (c.invariant) {
    const int m = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(c.dim)))));
    auto q = std::make_shared<const QuasiStarAlgebra>(full_matrix_model(m));
    const CStarAlgebra cod = random_codomain(rng, 3, 3, false);
    return random_invariant_map(q, cod, rng);
  }
  RandomMapOptions opt;
  opt.max_dim = c.dim;
  return random_block_gram_map(rng, opt);
}

inline CommandResult cmd_random(const RunConfig& c) {
  return detail::guarded([&] {
    return CommandResult{kPass, io::dump(io::to_json(build_random(c))), ""};
  });
}

/// Merges report files into one, sorted by check name.
inline CommandResult cmd_report(const RunConfig& c) {
  return detail::guarded([&] {
    Report rep;
    for (const auto& f : c.inputs) rep.merge(io::report_from_json(io::read_file(f), f));
    return detail::finish(rep, c);
  });
}

}  // namespace gnslab::cli
