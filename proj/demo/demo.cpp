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


// Walks through the main constructions on small instances and prints a
// one-line summary per step. Exit status is nonzero if any step fails.

#include <cstdio>
#include <string>

#include "gnslab/gnslab.hpp"

using namespace gnslab;

namespace {

int failures = 0;

void step(const std::string& what, const Report& rep) {
  int bad = 0;
  for (const auto& c : rep.checks()) bad += c.passed ? 0 : 1;
  failures += bad;
  std::printf("%-44s %3zu checks  %s\n", what.c_str(), rep.size(), bad ? "FAIL" : "ok");
  for (const auto& c : rep.checks())
    if (!c.passed) std::printf("    %s: %s\n", c.name.c_str(), c.witness.value_or("").c_str());
}

}  // namespace

int main() {
  Rng rng(2026);

  // b^* a on M_2
  const SesquiMap rm = phi_right_mult(CStarAlgebra({2}));
  Report r1 = check_cs(rm, 1000, rng);
  r1.merge(check_module_bound(rm, &*rm.action(), 500, rng));
  step("right multiplication on M_2: CS, module", r1);
  const GnsTriple t1 = build_gns(rm);
  step("right multiplication on M_2: GNS (r = " + std::to_string(t1.rep_dim()) + ")",
       verify_representation(t1));

  // trace map on M_2 with W = diag(1, 2)
  const TraceAlgebra ta(2, 2.0);
  Mat w = Mat::Zero(2, 2);
  w(0, 0) = 1.0;
  w(1, 1) = 2.0;
  const SesquiMap sm = schatten_trace_map(ta, w, 16);
  Report r2 = check_schatten_lipschitz(ta, sm, calculus_grid(w, 16), 1000, rng);
  r2.add(check_schatten_density_bound(ta, w, sm, 1000, rng));
  step("Schatten trace map m = 2: bounds", r2);
  const GnsTriple t2 = build_gns(sm);
  step("Schatten trace map m = 2: GNS", verify_representation(t2));
  step("Schatten trace map m = 2: intertwiner",
       intertwiner(t2, random_state(sm.codomain(), rng), 500, rng).report);

  // quadrature map into M_2
  const OperatorValuedCurve curve = random_curve(2, calculus_grid(w, 16), rng);
  const SesquiMap pm = pettis_integral_map(ta, w, curve);
  step("integral map h = 2: bound", check_pettis_bound(ta, w, curve, pm, 1000, rng));
  const GnsTriple t3 = build_gns(pm);
  Report r3 = verify_representation(t3);
  r3.merge(unitary_equivalence(t3, build_gns(pm, {kDefaultTol, random_rotation(t3.rep_dim(), rng)})).report);
  step("integral map h = 2: GNS and uniqueness", r3);

  // functional on the grid algebra
  const LinearMap om = omega_trace_functional(ta, w, 16);
  step("trace functional: bound", check_omega_bound(ta, w, om, 1000, rng));
  step("trace functional: GNS from omega",
       gns_from_bounded_functional(om, linalg::spectral_norm(w) * ta.rho_unit(), 200, rng).report);

  std::printf("%s\n", failures ? "demo: failures" : "demo: all steps passed");
  return failures ? 1 : 0;
}
