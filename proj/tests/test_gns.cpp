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


#include <cmath>

#include "catch_amalgamated.hpp"
#include "gnslab/gns.hpp"
#include "gnslab/nc_examples.hpp"
#include "oracles.hpp"

using namespace gnslab;

namespace {

QuasiAlgebraPtr shared(QuasiStarAlgebra q) { return std::make_shared<const QuasiStarAlgebra>(std::move(q)); }

// normalized trace on M_m as a map into C
LinearMap normalized_trace(QuasiAlgebraPtr q) {
  LinearMap om{q, CStarAlgebra({1}), {}};
  const double m = q->ambient_dim();
  for (const Mat& e : q->basis()) om.values.push_back(AlgebraElement{{Mat::Constant(1, 1, e.trace() / m)}});
  return om;
}

// left multiplication by E_a on matrix-unit coordinates (p, q) -> p m + q
Mat left_regular(int m, int a) {
  const int d = m * m, ai = a / m, aj = a % m;
  Mat l = Mat::Zero(d, d);
  for (int q = 0; q < m; ++q) l(ai * m + q, aj * m + q) = 1.0;
  return l;
}

double max_rel(const GnsTriple& t) { return reconstruction_residual(t); }

}  // namespace

TEST_CASE("zero map gives the trivial triple", "[gns]") {
  auto q = shared(full_matrix_model(2));
  const SesquiMap z(q, CStarAlgebra({2}), GramForm::zero(4, {2}));
  const GnsTriple t = build_gns(z);
  CHECK(t.rep_dim() == 0);
  for (const Mat& p : t.pi) CHECK(p.size() == 0);
  CHECK(t.cyclic.size() == 0);
  CHECK(verify_representation(t).all_passed());
}

TEST_CASE("normalized trace on M_2 gives the left regular representation", "[gns]") {
  auto q = shared(full_matrix_model(2));
  const SesquiMap phi = normalized_trace(q).induced_map();
  const GnsTriple t = build_gns(phi);
  REQUIRE(t.rep_dim() == 4);
  const Mat& r = t.quotient.rep_basis;
  CHECK((r.adjoint() * r - Mat::Identity(4, 4)).norm() < 1e-12);
  for (int a = 0; a < 4; ++a) CHECK((t.pi[a] - r.adjoint() * left_regular(2, a) * r).norm() < 1e-12);
  // xi = Lambda(I)
  CHECK((t.cyclic - r.adjoint() * identity_coeffs(2)).norm() < 1e-12);
  const Report rep = verify_representation(t);
  CHECK(rep.all_passed());
  CHECK(rep.find("closed")->note.find("automatic") != std::string::npos);
  CHECK(max_rel(t) <= 1e-9);
  // a = b = e
  const AlgebraElement ee = reconstruct_phi(t, q->unit(), q->unit());
  CHECK(std::abs(ee.blocks[0](0, 0) - 1.0) < 1e-12);
}

TEST_CASE("representation axioms on random I-class maps", "[gns][property]") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = rng.uniform_int(1, 3);
    auto q = shared(full_matrix_model(m));
    const SesquiMap phi = random_invariant_map(q, random_codomain(rng, 2, 2, false), rng);
    const GnsTriple t = build_gns(phi);
    const Report rep = verify_representation(t);
    CHECK(rep.all_passed());
    CHECK(reconstruction_residual(t) <= 1e-9);
    // Pi(ac) = Pi(a) Pi(c) directly
    const int d = q->dim();
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) {
        const Mat pac = t.pi_of(product(*q, q->basis_element(a), q->basis_element(c)));
        CHECK((pac - t.pi[a] * t.pi[c]).norm() <= 1e-10 * std::max(1.0, pac.norm()));
      }
    // unit acts as the identity
    CHECK((t.pi_of(q->unit()) - Mat::Identity(t.rep_dim(), t.rep_dim())).norm() <= 1e-10);
    // random pairs
    for (int s = 0; s < 5; ++s) {
      const QuasiElement a = q->random_element(rng), b = q->random_element(rng);
      const AlgebraElement lhs = reconstruct_phi(t, a, b), rhs = eval(phi, a, b);
      CHECK(op_norm(lhs - rhs) <= 1e-9 * std::max(1.0, op_norm(rhs)));
    }
  }
}

TEST_CASE("Schatten model reconstruction and intertwiner", "[gns]") {
  const TraceAlgebra ta(2);
  Mat w = Mat::Zero(2, 2);
  w(0, 0) = 1.0;
  w(1, 1) = 2.0;
  w(0, 1) = w(1, 0) = 0.5;
  const SesquiMap phi = schatten_trace_map(ta, w, 8);
  const GnsTriple t = build_gns(phi);
  CHECK(verify_representation(t).all_passed());
  CHECK(reconstruction_residual(t) <= 1e-9);
  // explicit basis pairs
  const QuasiStarAlgebra& q = phi.domain();
  for (int i = 0; i < q.dim(); ++i)
    for (int j = 0; j < q.dim(); ++j) {
      const AlgebraElement want = oracle::manual_eval(phi, Vec::Unit(q.dim(), i), Vec::Unit(q.dim(), j));
      CHECK(op_norm(reconstruct_phi(t, q.basis_element(i), q.basis_element(j)) - want) <= 1e-9 * phi.scale());
    }

  Rng rng(22);
  const CStarAlgebra& c = phi.codomain();
  for (int k = 0; k < c.num_blocks(); ++k) {
    std::vector<Mat> dens(c.num_blocks(), Mat::Zero(1, 1));
    dens[k](0, 0) = 1.0;
    const IntertwinerResult ir = intertwiner(t, State(c, dens), 300, rng);
    CHECK(ir.report.all_passed());
    CHECK(ir.bound <= 1.0 + 1e-10);
    CHECK(ir.intertwining <= 1e-10);
  }
  const IntertwinerResult tr = intertwiner(t, tracial_state(c), 300, rng);
  CHECK(tr.report.all_passed());
  CHECK_THROWS_AS(intertwiner(t, tracial_state(CStarAlgebra({2})), 10, rng), PreconditionError);
}

TEST_CASE("intertwiner with a rank-deficient state", "[gns]") {
  Rng rng(23);
  const SesquiMap phi = phi_right_mult(CStarAlgebra({2}));
  const GnsTriple t = build_gns(phi);
  REQUIRE(t.rep_dim() == 4);
  Mat dens = Mat::Zero(2, 2);
  dens(0, 0) = 1.0;
  const IntertwinerResult ir = intertwiner(t, State(phi.codomain(), {dens}), 300, rng);
  CHECK(ir.report.all_passed());
  // trace(E11 b^* a) = <a e_1, b e_1>: kills the second column
  CHECK(ir.t.rows() == 2);
  CHECK(ir.t.cols() == 4);
  Eigen::FullPivLU<Mat> lu(ir.t);
  CHECK(lu.rank() == 2);  // surjective, not injective

  // scalar-valued Phi with the only state on C
  auto q = shared(full_matrix_model(2));
  const GnsTriple ts = build_gns(normalized_trace(q).induced_map());
  const IntertwinerResult is = intertwiner(ts, tracial_state(CStarAlgebra({1})), 300, rng);
  CHECK(is.report.all_passed());
  CHECK(is.t.rows() == 4);
  // T is an isometry between the two inner products
  const Mat h = ts.inner().scalar_matrix({Mat::Identity(1, 1)});
  CHECK((is.t.adjoint() * is.inner * is.t - h).norm() < 1e-10);
  CHECK(std::abs(is.bound - 1.0) < 1e-6);
}

TEST_CASE("hand-corrupted representation fails the adjoint check", "[gns]") {
  const SesquiMap phi = phi_right_mult(CStarAlgebra({2}));
  GnsTriple t = build_gns(phi);
  t.pi[1](0, 1) += 0.7;
  const Report rep = verify_representation(t);
  const CheckResult* adj = rep.find("adjoint");
  REQUIRE(adj != nullptr);
  CHECK_FALSE(adj->passed);
  CHECK(adj->residual);
  CHECK(*adj->residual > 0.1);
}

TEST_CASE("uniqueness up to unitary equivalence", "[gns][property]") {
  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    auto q = shared(full_matrix_model(rng.uniform_int(1, 3)));
    const SesquiMap phi = random_invariant_map(q, random_codomain(rng, 2, 2, false), rng);
    const GnsTriple t1 = build_gns(phi);
    const EquivalenceResult same = unitary_equivalence(t1, t1);
    CHECK(same.ok);
    CHECK((same.u - Mat::Identity(t1.rep_dim(), t1.rep_dim())).norm() < 1e-10);
    const Mat rot = random_rotation(t1.rep_dim(), rng);
    const GnsTriple t2 = build_gns(phi, {kDefaultTol, rot});
    const EquivalenceResult eq = unitary_equivalence(t1, t2);
    CHECK(eq.ok);
    CHECK(eq.report.all_passed());
    // U maps Lambda1(a) to Lambda2(a)
    for (int i = 0; i < q->dim(); ++i) {
      const Vec l1 = t1.quotient.lambda(Vec::Unit(q->dim(), i)), l2 = t2.quotient.lambda(Vec::Unit(q->dim(), i));
      CHECK((eq.u * l1 - l2).norm() <= 1e-10 * std::max(1.0, l2.norm()));
    }
    for (const auto& c : eq.report.checks())
      if (c.residual) CHECK(*c.residual <= 1e-10);
  }
}

TEST_CASE("different maps are not equivalent", "[gns]") {
  auto q = shared(full_matrix_model(2));
  const SesquiMap a = normalized_trace(q).induced_map();
  Mat dens = Mat::Zero(2, 2);
  dens(0, 0) = 0.3;
  dens(1, 1) = 0.7;
  LinearMap om{q, CStarAlgebra({1}), {}};
  for (const Mat& e : q->basis()) om.values.push_back(AlgebraElement{{Mat::Constant(1, 1, (dens * e).trace())}});
  const SesquiMap b = om.induced_map();
  const EquivalenceResult eq = unitary_equivalence(build_gns(a), build_gns(b));
  CHECK_FALSE(eq.ok);
  bool witnessed = false;
  for (const auto& c : eq.report.checks())
    if (!c.passed && c.witness) witnessed = true;
  CHECK(witnessed);
}

TEST_CASE("positive linear maps", "[gns]") {
  Rng rng(25);
  auto q = shared(full_matrix_model(2));
  const GnsResult tr = gns_from_positive_linear_map(normalized_trace(q), 200, rng);
  CHECK(tr.report.all_passed());
  CHECK(tr.triple.rep_dim() == 4);
  // omega(e) = <eta, eta>
  const Vec eta = tr.triple.cyclic;
  CHECK(std::abs(tr.triple.inner().eval(eta, eta).blocks[0](0, 0) - 1.0) < 1e-12);

  // omega(a) = V^* a V with V an isometry column
  auto q3 = shared(full_matrix_model(3));
  for (int trial = 0; trial < 10; ++trial) {
    Vec v = rng.complex_vector(3);
    v.normalize();
    LinearMap om{q3, CStarAlgebra({1}), {}};
    for (const Mat& e : q3->basis()) om.values.push_back(AlgebraElement{{v.adjoint() * e * v}});
    const GnsResult g = gns_from_positive_linear_map(om, 100, rng);
    CHECK(g.report.all_passed());
    CHECK(reconstruction_residual(g.triple) <= 1e-9);
    CHECK(g.triple.rep_dim() == 3);  // the left ideal M_3 (1 - vv^*) is the kernel
  }
  // operator-valued: compression to a corner
  for (int trial = 0; trial < 5; ++trial) {
    const Mat v = rng.ginibre(3, 2);
    LinearMap om{q3, CStarAlgebra({2}), {}};
    for (const Mat& e : q3->basis()) om.values.push_back(AlgebraElement{{v.adjoint() * e * v}});
    CHECK(gns_from_positive_linear_map(om, 100, rng).report.all_passed());
  }
  // A0 != A
  LinearMap bad{shared(scalar_core_model(2)), CStarAlgebra({1}), {}};
  for (const Mat& e : bad.domain->basis()) bad.values.push_back(AlgebraElement{{Mat::Constant(1, 1, e.trace())}});
  CHECK_THROWS_AS(gns_from_positive_linear_map(bad, 10, rng), PreconditionError);
}

TEST_CASE("bounded functionals", "[gns]") {
  Rng rng(26);
  const TraceAlgebra ta(2);
  Mat w = Mat::Zero(2, 2);
  w(0, 0) = 0.5;
  w(1, 1) = 1.5;
  const LinearMap om = omega_trace_functional(ta, w, 8);
  const double bound = linalg::spectral_norm(w) * ta.rho_unit();
  const GnsResult g = gns_from_bounded_functional(om, bound, 200, rng);
  CHECK(g.report.all_passed());
  CHECK(reconstruction_residual(g.triple) <= 1e-9);

  LinearMap zero{om.domain, om.codomain, std::vector<AlgebraElement>(om.values.size(), om.codomain.zero())};
  const GnsResult gz = gns_from_bounded_functional(zero, 1.0, 50, rng);
  CHECK(gz.triple.rep_dim() == 0);
  CHECK(gz.report.all_passed());

  // a bound far too small is a precondition failure
  CHECK_THROWS_AS(gns_from_bounded_functional(om, 1e-6, 50, rng), PreconditionError);
}

TEST_CASE("module GNS", "[gns]") {
  Rng rng(27);
  const SesquiMap rm = phi_right_mult(CStarAlgebra({2, 1}));
  const ModuleGnsResult g = module_gns(rm, nullptr, 200, rng);
  CHECK(g.report.all_passed());
  CHECK(*g.report.find("pi_c_linear")->residual <= 1e-12);
  // x = 1 acts as the identity on the quotient
  const CStarAlgebra& c = rm.codomain();
  Mat one = Mat::Zero(g.triple.rep_dim(), g.triple.rep_dim());
  const Vec uc = c.coordinates(c.unit());
  for (int s = 0; s < c.dimension(); ++s) one += uc(s) * g.action[s];
  CHECK((one - Mat::Identity(one.rows(), one.cols())).norm() < 1e-12);

  // non-C-linear maps violating the bound are rejected
  const CStarAlgebra c2({2});
  int rejected = 0;
  for (int trial = 0; trial < 20 && rejected == 0; ++trial) {
    const SesquiMap base = random_invariant_map(shared(block_model(c2)), c2, rng, 1);
    const SesquiMap phi(base.domain_ptr(), c2, base.form(), base.flags(), right_multiplication_action(c2));
    Rng probe(100 + trial);
    if (!check_module_bound(phi, nullptr, 200, probe).passed("module_bound")) {
      Rng again(100 + trial);
      try {
        module_gns(phi, nullptr, 200, again);
      } catch (const RejectedError& e) {
        ++rejected;
        CHECK(std::string(e.what()).find("module bound fails") == 0);
      }
    }
  }
  CHECK(rejected == 1);
  CHECK_THROWS_AS(module_gns(random_block_gram_map(rng), nullptr, 10, rng), PreconditionError);
}

TEST_CASE("rejections", "[gns]") {
  // density fails
  auto sc = shared(scalar_core_model(2));
  const SesquiMap nd = SesquiMap::from_basis(sc, CStarAlgebra({1}), [&](int i, int j) {
    return AlgebraElement{{Mat::Constant(1, 1, (sc->basis(j).adjoint() * sc->basis(i)).trace() / 2.0)}};
  });
  try {
    build_gns(nd);
    FAIL("expected rejection");
  } catch (const RejectedError& e) {
    CHECK(std::string(e.what()).rfind("not in I-class: Lambda(A0) is not dense", 0) == 0);
  }
  // Phi(a, b) = b^* K a with K not central
  auto q = shared(full_matrix_model(2));
  Mat k = Mat::Zero(2, 2);
  k(0, 0) = 2.0;
  k(1, 1) = 1.0;
  const SesquiMap ni = SesquiMap::from_basis(q, CStarAlgebra({2}), [&](int i, int j) {
    return AlgebraElement{{Mat(q->basis(j).adjoint() * k * q->basis(i))}};
  });
  try {
    build_gns(ni);
    FAIL("expected rejection");
  } catch (const RejectedError& e) {
    CHECK(std::string(e.what()).rfind("invariance fails", 0) == 0);
  }
  // non-unital domain
  const SesquiMap nu(shared(trivial_core_model(2)), CStarAlgebra({1}), GramForm::zero(4, {1}));
  CHECK_THROWS_AS(build_gns(nu), PreconditionError);
}

TEST_CASE("operator norm estimates", "[gns]") {
  Rng rng(28);
  const SesquiMap rm = phi_right_mult(CStarAlgebra({2}));
  const GnsTriple t = build_gns(rm);
  const Admissibility ad = check_admissibility(rm, 100, rng);
  for (int i = 0; i < rm.domain().dim(); ++i) {
    const OperatorNormEstimate e = operator_norm_estimates(t, rm.domain().basis_element(i), 500, rng);
    CHECK(e.sampled <= std::sqrt(ad.gamma[i]) * (1 + 1e-9));
    CHECK(e.trace_form <= 1.0 + 1e-9);  // matrix units have norm 1
    CHECK(e.sampled >= 0.0);
  }
}
