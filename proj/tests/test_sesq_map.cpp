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
#include "gnslab/nc_examples.hpp"
#include "gnslab/sesq_map.hpp"
#include "oracles.hpp"

using namespace gnslab;

namespace {

QuasiAlgebraPtr shared(QuasiStarAlgebra q) { return std::make_shared<const QuasiStarAlgebra>(std::move(q)); }

// Phi(a, b) = omega(b^* a) 1 on M_m with omega = trace(D .)
SesquiMap scalar_trace_map(const Mat& dens) {
  const int m = static_cast<int>(dens.rows());
  auto q = shared(full_matrix_model(m));
  LinearMap om{q, CStarAlgebra({1}), {}};
  for (const Mat& e : q->basis()) om.values.push_back(AlgebraElement{{Mat::Constant(1, 1, (dens * e).trace())}});
  return om.induced_map();
}

double rel_diff(const AlgebraElement& a, const AlgebraElement& b) {
  return op_norm(a - b) / std::max(1.0, std::max(op_norm(a), op_norm(b)));
}

}  // namespace

TEST_CASE("Gram convention round-trips through eval", "[sesq]") {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const SesquiMap phi = random_block_gram_map(rng);
    const Vec a = rng.complex_vector(phi.dim()), b = rng.complex_vector(phi.dim());
    CHECK(rel_diff(phi.form().eval(a, b), oracle::manual_eval(phi, a, b)) < 1e-12);
    // linear in the first slot, conjugate-linear in the second
    const cplx s(0.3, -1.2);
    CHECK(rel_diff(phi.form().eval(s * a, b), s * phi.form().eval(a, b)) < 1e-12);
    CHECK(rel_diff(phi.form().eval(a, s * b), std::conj(s) * phi.form().eval(a, b)) < 1e-12);
    // hermitian symmetry
    CHECK(rel_diff(phi.form().eval(b, a), phi.form().eval(a, b).adjoint()) < 1e-12);
    CHECK(phi.form().symmetry_residual() <= 1e-12 * phi.scale());
  }
  const SesquiMap phi = random_block_gram_map(rng);
  CHECK(op_norm(phi.form().eval(Vec::Zero(phi.dim()), rng.complex_vector(phi.dim()))) == 0.0);
}

TEST_CASE("b^* a on M_2", "[sesq]") {
  const SesquiMap phi = phi_right_mult(CStarAlgebra({2}));
  const QuasiStarAlgebra& q = phi.domain();
  const AlgebraElement v = phi(q.unit(), q.unit());
  CHECK((v.blocks[0] - Mat::Identity(2, 2)).norm() < 1e-15);
  // E11 against itself
  CHECK((phi(q.basis_element(0), q.basis_element(0)).blocks[0] - q.basis(0)).norm() < 1e-15);
  Rng rng(2);
  const PositivityResult pr = check_positivity(phi, PositivityMode::Certificate, 100, rng);
  CHECK(pr.positive);
  CHECK(pr.mode == Certificate::BlockPsd);
  const Report cs = check_cs(phi, 1000, rng);
  REQUIRE(cs.find("cs_factor1_c_linear") != nullptr);
  CHECK(cs.all_passed());
  // ||b^* a||^2 <= ||b||^2 ||a||^2 directly
  for (int s = 0; s < 200; ++s) {
    const QuasiElement a = q.random_element(rng), b = q.random_element(rng);
    const double lhs = std::pow(op_norm(phi(a, b)), 2);
    CHECK(lhs <= op_norm(phi(a, a)) * op_norm(phi(b, b)) * (1 + 1e-12));
  }
  // on C, the standard inner product
  const SesquiMap c1 = phi_right_mult(CStarAlgebra({1}));
  const QuasiElement x{Vec::Constant(1, cplx(1, 2))}, y{Vec::Constant(1, cplx(3, -1))};
  CHECK(std::abs(c1(x, y).blocks[0](0, 0) - std::conj(cplx(3, -1)) * cplx(1, 2)) < 1e-15);
}

TEST_CASE("positivity failure has a basis witness", "[sesq]") {
  auto q = shared(diagonal_model(3));
  const SesquiMap phi = SesquiMap::from_basis(q, CStarAlgebra({1}), [](int i, int j) {
    return AlgebraElement{{Mat::Constant(1, 1, i == j ? -1.0 : 0.0)}};
  });
  Rng rng(3);
  const PositivityResult pr = check_positivity(phi, PositivityMode::Certificate, 100, rng);
  CHECK_FALSE(pr.positive);
  CHECK(pr.mode == Certificate::Sampled);
  REQUIRE(pr.witness);
  CHECK((*pr.witness - Vec::Unit(3, 0)).norm() == 0.0);
  const CheckResult c = pr.as_check();
  CHECK_FALSE(c.passed);
  CHECK(c.witness);
}

TEST_CASE("trace model is positive", "[sesq]") {
  const TraceAlgebra ta(2);
  Mat w = Mat::Zero(2, 2);
  w(0, 0) = 1.0;
  w(1, 1) = 2.0;
  const SesquiMap phi = schatten_trace_map(ta, w, 8);
  Rng rng(4);
  CHECK(check_positivity(phi, PositivityMode::Sampled, 500, rng).positive);
  CHECK(check_positivity(phi, PositivityMode::Certificate, 0, rng).positive);
}

TEST_CASE("factor-2 Cauchy-Schwarz on random block-Gram maps", "[sesq][property]") {
  Rng rng(5);
  RandomMapOptions com;
  com.commutative = true;
  for (int trial = 0; trial < 100; ++trial) {
    const SesquiMap phi = random_block_gram_map(rng, trial % 2 ? com : RandomMapOptions{});
    const Report r = check_cs(phi, 100, rng);
    CHECK(r.all_passed());
    CHECK(*r.find("cs_factor2")->worst_ratio <= 4.0 * (1 + 1e-9));
    if (phi.codomain().commutative()) {
      REQUIRE(r.find("cs_factor1_commutative") != nullptr);
      CHECK(*r.find("cs_factor1_commutative")->worst_ratio <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("a = b gives ratio exactly one", "[sesq]") {
  Rng rng(6);
  const SesquiMap phi = random_block_gram_map(rng);
  const Vec a = rng.complex_vector(phi.dim());
  const CsSample s = cs_sample(phi, a, a);
  CHECK(std::abs(s.ab * s.ab / (s.aa * s.bb) - 1.0) < 1e-12);
}

TEST_CASE("Stinespring-type inequality", "[sesq]") {
  Rng rng(7);
  auto q = shared(full_matrix_model(2));
  LinearMap tr{q, CStarAlgebra({1}), {}};
  for (const Mat& e : q->basis()) tr.values.push_back(AlgebraElement{{Mat::Constant(1, 1, e.trace() / 2.0)}});
  // a = I: ||omega(I)||^2 = 1 <= 4
  CHECK(std::abs(tr(q->unit()).blocks[0](0, 0) - 1.0) < 1e-15);
  CHECK(stinespring_ineq(tr, 200, rng).all_passed());
  CHECK(op_norm(tr(q->zero())) == 0.0);

  // omega(a) = V^* a V with ||V|| = 1, V: C^2 -> C^3
  auto q3 = shared(full_matrix_model(3));
  for (int trial = 0; trial < 20; ++trial) {
    Mat v = rng.ginibre(3, 2);
    v /= linalg::spectral_norm(v);
    LinearMap om{q3, CStarAlgebra({2}), {}};
    for (const Mat& e : q3->basis()) om.values.push_back(AlgebraElement{{v.adjoint() * e * v}});
    const Report r = stinespring_ineq(om, 100, rng);
    CHECK(r.all_passed());
  }
}

TEST_CASE("null space", "[sesq]") {
  SECTION("faithful map") {
    const QuotientSpace qs = null_space(phi_right_mult(CStarAlgebra({2, 1})));
    CHECK(qs.null_dim() == 0);
    CHECK(qs.rep_dim() == 5);
  }
  SECTION("zero map") {
    auto q = shared(full_matrix_model(2));
    const SesquiMap z(q, CStarAlgebra({2}), GramForm::zero(4, {2}));
    const QuotientSpace qs = null_space(z);
    CHECK(qs.null_dim() == 4);
    CHECK(qs.rep_dim() == 0);
  }
  SECTION("rank-deficient scalar functional") {
    // omega = trace(D .) with D = diag(1, 0): Phi(a, a) = ||a e_1||^2 vanishes on a with first column zero
    Mat dens = Mat::Zero(2, 2);
    dens(0, 0) = 1.0;
    const SesquiMap phi = scalar_trace_map(dens);
    const QuotientSpace qs = null_space(phi);
    // nullity of the scalar Gram matrix, by LU on the entries
    Mat s(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s(i, j) = phi.entry(i, j).blocks[0](0, 0);
    Eigen::FullPivLU<Mat> lu(s);
    lu.setThreshold(1e-12);
    CHECK(qs.null_dim() == 4 - static_cast<int>(lu.rank()));
    CHECK(qs.null_dim() == 2);
  }
  SECTION("equivalence with brute force on planted kernels") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = rng.uniform_int(2, 5);
      const auto sweep = oracle::ternary_sweep(d);
      std::vector<Vec> planted;
      const int nk = rng.uniform_int(0, d - 1);
      for (int i = 0; i < nk; ++i) planted.push_back(sweep[rng.uniform_int(0, static_cast<int>(sweep.size()) - 1)]);
      const SesquiMap phi = oracle::planted_kernel_map(rng, d, random_codomain(rng, 2, 2, false), planted);
      const QuotientSpace qs = null_space(phi);
      const Mat brute = oracle::sweep_kernel(phi, 1e-9 * phi.scale());
      const Mat eig = oracle::eigen_kernel(oracle::trace_form(phi), 1e-9);
      CHECK(oracle::max_angle(qs.null_basis, brute) <= 1e-6);
      CHECK(oracle::max_angle(qs.null_basis, eig) <= 1e-6);
      // Phi(v, e_j) = 0 for null vectors
      for (int c = 0; c < qs.null_dim(); ++c)
        for (int j = 0; j < d; ++j)
          CHECK(op_norm(phi.form().eval(qs.null_basis.col(c), Vec::Unit(d, j))) <= 1e-9 * phi.scale());
    }
  }
}

TEST_CASE("quotient inner product", "[sesq][property]") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    RandomMapOptions opt;
    const SesquiMap phi = random_block_gram_map(rng, opt);
    const QuotientSpace qs = null_space(phi);
    const Vec a = rng.complex_vector(phi.dim()), b = rng.complex_vector(phi.dim());
    const AlgebraElement direct = phi.form().eval(a, b);
    CHECK(rel_diff(qs.inner.eval(qs.lambda(a), qs.lambda(b)), direct) < 1e-9);
    if (qs.null_dim() > 0) {
      const Vec n = qs.null_basis * rng.complex_vector(qs.null_dim());
      const Vec m = qs.null_basis * rng.complex_vector(qs.null_dim());
      CHECK(rel_diff(phi.form().eval(a + n, b + m), direct) < 1e-9);
    }
    CHECK(quasi_norm(qs, Vec(Vec::Zero(phi.dim()))) == 0.0);
    CHECK(std::abs(quasi_norm(qs, Vec(2.0 * a)) - 2.0 * quasi_norm(qs, a)) < 1e-12 * (1 + quasi_norm(qs, a)));
    CHECK(std::abs(quasi_norm(qs, a) - std::sqrt(op_norm(direct.blocks.empty() ? direct : phi.form().eval(a, a)))) < 1e-9 * (1 + quasi_norm(qs, a)));
  }
}

TEST_CASE("quasi-triangle", "[sesq][property]") {
  Rng rng(10);
  double worst_general = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const SesquiMap phi = random_block_gram_map(rng);
    const Report r = quasi_triangle_check(null_space(phi), 200, rng);
    CHECK(r.all_passed());
    worst_general = std::max(worst_general, *r.find("quasi_triangle")->worst_ratio);
  }
  CHECK(worst_general <= std::sqrt(2.0) + 1e-9);
  // C-linear maps give a true norm
  for (int trial = 0; trial < 30; ++trial) {
    const SesquiMap phi = random_c_linear_map(random_codomain(rng, 2, 3, false), rng, trial % 2 == 0);
    const Report r = quasi_triangle_check(null_space(phi), 200, rng);
    CHECK(*r.find("quasi_triangle")->worst_ratio <= 1.0 + 1e-9);
  }
}

TEST_CASE("invariance", "[sesq]") {
  CHECK(check_invariance(phi_right_mult(CStarAlgebra({2, 1}))).passed);
  Mat dens = Mat::Zero(2, 2);
  dens(0, 0) = 0.25;
  dens(1, 1) = 0.75;
  CHECK(check_invariance(scalar_trace_map(dens)).passed);
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial)
    CHECK(check_invariance(random_invariant_map(shared(full_matrix_model(2)), CStarAlgebra({2}), rng)).passed);
  // random hermitian-symmetric Gram on M_2: residual computed explicitly for (a, c, d) = (E12, E21, E11)
  auto q = shared(full_matrix_model(2));
  const SesquiMap h = SesquiMap::from_basis(q, CStarAlgebra({1}), [&](int i, int j) {
    Mat g = Mat::Zero(1, 1);
    g(0, 0) = i == j ? cplx(1.0 + i) : (i < j ? cplx(0.1 * (i + 1), 0.2 * j) : std::conj(cplx(0.1 * (j + 1), 0.2 * i)));
    return AlgebraElement{{g}};
  });
  const CheckResult r = check_invariance(h);
  CHECK_FALSE(r.passed);
  // E12 E21 = E11 (index 0), E12^* E11 = E21 E11 = E21 (index 2): Phi(e0, e0) - Phi(e2, e0) = 1 - conj(0.1, 0.4)
  const double explicit_res = std::abs(h.entry(0, 0).blocks[0](0, 0) - h.entry(2, 0).blocks[0](0, 0));
  CHECK(explicit_res > 0.5);
  CHECK(*r.residual >= explicit_res / h.scale() / 1.0 - 1e-12);
  CHECK(r.witness);
}

TEST_CASE("C-linearity", "[sesq]") {
  Rng rng(12);
  const SesquiMap rm = phi_right_mult(CStarAlgebra({2, 1}));
  const Report r = check_c_linearity(rm, nullptr, 200, rng);
  CHECK(r.passed("c_linearity"));
  CHECK(r.passed("module_cs"));
  // x = 1 acts as the identity
  const RightAction& act = *rm.action();
  const QuasiElement a = rm.domain().random_element(rng);
  CHECK((act.apply(rm.domain(), a, rm.codomain().unit()).coeffs - a.coeffs).norm() < 1e-13);

  // V^* B^* A V: C-linear when V = P, not for a generic V in the corner
  Mat p = Mat::Zero(3, 3);
  p.topLeftCorner(2, 2).setIdentity();
  const SesquiMap cp = compression_map(p, 2);
  CHECK(check_c_linearity(cp, nullptr, 100, rng).passed("c_linearity"));
  Mat v = Mat::Zero(3, 3);
  v.topLeftCorner(2, 2) = rng.ginibre(2, 2);
  const SesquiMap cv = compression_map(v, 2);
  const Report rv = check_c_linearity(cv, nullptr, 100, rng);
  CHECK(rv.passed("right_action"));
  CHECK_FALSE(rv.passed("c_linearity"));
  CHECK(rv.find("c_linearity")->witness);
  CHECK(check_invariance(cv).passed);

  // no declared action
  CHECK_THROWS_AS(check_c_linearity(random_block_gram_map(rng), nullptr, 10, rng), PreconditionError);
}

TEST_CASE("module bound", "[sesq]") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const SesquiMap phi = random_c_linear_map(random_codomain(rng, 2, 3, false), rng, trial % 2 == 0);
    const Report r = check_module_bound(phi, nullptr, 200, rng);
    CHECK(r.all_passed());
    CHECK(r.find("quotient_action_bound") != nullptr);
  }
  // K^* b^* a K on block_model(M_2) with right multiplication is not C-linear;
  // some seeds violate the bound and must leave a witness
  int violations = 0;
  const CStarAlgebra c({2});
  for (int trial = 0; trial < 20; ++trial) {
    const SesquiMap base = random_invariant_map(shared(block_model(c)), c, rng, 1);
    const SesquiMap phi(base.domain_ptr(), c, base.form(), base.flags(), right_multiplication_action(c));
    const Report r = check_module_bound(phi, nullptr, 200, rng);
    if (!r.passed("module_bound")) {
      ++violations;
      CHECK(r.find("module_bound")->witness);
    }
  }
  CHECK(violations > 0);
}

TEST_CASE("admissibility", "[sesq]") {
  Rng rng(14);
  const SesquiMap rm = phi_right_mult(CStarAlgebra({2, 1}));
  const Admissibility ad = check_admissibility(rm, 200, rng);
  CHECK(ad.result.passed);
  // every basis element is a matrix unit of norm 1, so gamma = ||a||^2 = 1
  for (double g : ad.gamma) CHECK(std::abs(g - 1.0) < 1e-9);
  // gamma of 2 E11 (as a combination) would be 4: checked on the unit instead
  const QuasiStarAlgebra& q = rm.domain();
  const Vec u = *q.unit_coeffs();
  for (int i = 0; i < q.dim(); ++i)
    if (std::abs(u(i)) > 0) CHECK(ad.gamma[i] <= 1.0 + 1e-9);
  const Admissibility st = check_admissibility(schatten_trace_map(TraceAlgebra(2), Mat::Identity(2, 2), 4), 100, rng);
  CHECK(st.result.passed);
  for (double g : st.gamma) CHECK(std::isfinite(g));

  // declared constants are compared
  MapFlags fl = rm.flags();
  fl.admissible_constants.assign(rm.dim(), 0.5);
  const SesquiMap declared(rm.domain_ptr(), rm.codomain(), rm.form(), fl, rm.action());
  const Admissibility bad = check_admissibility(declared, 50, rng);
  CHECK_FALSE(bad.result.passed);
  CHECK(bad.result.witness->rfind("a=0, gamma", 0) == 0);
  fl.admissible_constants.assign(rm.dim(), 1.0);
  CHECK(check_admissibility(SesquiMap(rm.domain_ptr(), rm.codomain(), rm.form(), fl, rm.action()), 50, rng).result.passed);
  fl.admissible_constants.assign(2, 1.0);
  CHECK_THROWS_AS(check_admissibility(SesquiMap(rm.domain_ptr(), rm.codomain(), rm.form(), fl), 5, rng),
                  StructuralError);

  // Phi(a, b) = <a^* e_1, b^* e_1>: Phi(E21, E21) = 0 while E12 E21 = E11 is not null
  auto m2 = std::make_shared<const QuasiStarAlgebra>(full_matrix_model(2));
  const SesquiMap left = SesquiMap::from_basis(m2, CStarAlgebra({1}), [&](int i, int j) {
    return AlgebraElement{{Mat::Constant(1, 1, (m2->basis(i) * m2->basis(j).adjoint())(0, 0))}};
  });
  CHECK(check_positivity(left, PositivityMode::Certificate, 50, rng).positive);
  const Admissibility inf = check_admissibility(left, 50, rng);
  CHECK_FALSE(inf.result.passed);
  CHECK(std::isinf(inf.gamma[1]));
}

TEST_CASE("density", "[sesq]") {
  auto sc = shared(scalar_core_model(2));
  const SesquiMap faithful = SesquiMap::from_basis(sc, CStarAlgebra({1}), [&](int i, int j) {
    return AlgebraElement{{Mat::Constant(1, 1, (sc->basis(j).adjoint() * sc->basis(i)).trace())}};
  });
  const QuotientSpace qs = null_space(faithful);
  CHECK(qs.rep_dim() == 4);
  CHECK_FALSE(density_check(faithful, qs));
  const CheckResult r = density_result(faithful, qs);
  CHECK_FALSE(r.passed);
  CHECK(r.note == "rank Lambda(A0) = 1, rank Lambda(A) = 4");
  const SesquiMap st = schatten_trace_map(TraceAlgebra(3), Mat::Identity(3, 3), 4);
  CHECK(density_check(st, null_space(st)));
  CHECK(density_check(phi_right_mult(CStarAlgebra({2})), null_space(phi_right_mult(CStarAlgebra({2})))));
}

TEST_CASE("maps reject mismatched shapes", "[sesq]") {
  auto q = shared(full_matrix_model(2));
  CHECK_THROWS_AS(SesquiMap(q, CStarAlgebra({2}), GramForm::zero(3, {2})), StructuralError);
  CHECK_THROWS_AS(SesquiMap(q, CStarAlgebra({2}), GramForm::zero(4, {1})), StructuralError);
  const SesquiMap phi = phi_right_mult(CStarAlgebra({2}));
  CHECK_THROWS_AS(phi.form().eval(Vec::Zero(3), Vec::Zero(4)), StructuralError);
}
