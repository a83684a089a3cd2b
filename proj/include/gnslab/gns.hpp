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

// GNS triples for invariant positive maps: the representation space is the
// quotient A / N_Phi in rep coordinates Lambda(a) = R^* a, and Pi(a) is the
// matrix of Lambda(c) -> Lambda(ac) for c in A0.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gnslab/cstar.hpp"
#include "gnslab/errors.hpp"
#include "gnslab/linalg.hpp"
#include "gnslab/quasi_algebra.hpp"
#include "gnslab/random.hpp"
#include "gnslab/report.hpp"
#include "gnslab/sesq_map.hpp"

namespace gnslab {

struct GnsTriple {
  std::shared_ptr<const SesquiMap> phi;
  QuotientSpace quotient;
  std::vector<Mat> pi;  // Pi(e_i), r x r
  Mat domain_basis;     // r x k, columns Lambda(x_j) for the A0 basis
  Vec cyclic;           // Lambda(e)
  std::map<std::string, double> residuals;

  int rep_dim() const { return quotient.rep_dim(); }
  const GramForm& inner() const { return quotient.inner; }
  const QuasiStarAlgebra& domain() const { return phi->domain(); }

  Mat pi_of(const QuasiElement& a) const {
    domain().check_length(a);
    const int r = rep_dim();
    Mat out = Mat::Zero(r, r);
    for (std::size_t i = 0; i < pi.size(); ++i)
      if (a.coeffs(i) != 0.0) out += a.coeffs(i) * pi[i];
    return out;
  }
};

struct GnsOptions {
  double tol = kDefaultTol;
  std::optional<Mat> rotation;  // unitary change of rep basis
};

namespace detail {

/// Per block, the matrix whose (q, p) block is <P e_p, Q e_q>.
inline std::vector<Mat> pair_blocks(const GramForm& f, const Mat& p, const Mat& q) {
  std::vector<Mat> out;
  for (std::size_t k = 0; k < f.block_dims().size(); ++k) {
    const int n = f.block_dims()[k];
    const Mat pk = linalg::kron(p, Mat::Identity(n, n));
    const Mat qk = linalg::kron(q, Mat::Identity(n, n));
    out.push_back(qk.adjoint() * f.big(k) * pk);
  }
  return out;
}

/// max over (q, p) and blocks of the spectral norm of the n x n sub-block.
inline double max_pair_norm(const std::vector<Mat>& a, const std::vector<Mat>& b,
                            const std::vector<int>& dims) {
  double worst = 0.0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const int n = dims[k];
    const Mat d = a[k] - b[k];
    for (Eigen::Index q = 0; q < d.rows() / n; ++q)
      for (Eigen::Index p = 0; p < d.cols() / n; ++p)
        worst = std::max(worst, linalg::spectral_norm(d.block(q * n, p * n, n, n)));
  }
  return worst;
}

inline double safe_scale(double s) { return s > 0.0 ? s : 1.0; }

}  // namespace detail

/// Builds (Pi, Lambda, X) for Phi in the I-class. Rejects maps that fail
/// invariance or density; Phi = 0 gives the trivial triple.
inline GnsTriple build_gns(const SesquiMap& phi, const GnsOptions& opt = {}) {
  const QuasiStarAlgebra& q = phi.domain();
  const double tol = opt.tol;
  if (!q.unital()) throw PreconditionError("GNS construction needs a unital quasi *-algebra");
  GnsTriple t;
  t.phi = std::make_shared<const SesquiMap>(phi);
  t.quotient = null_space(phi, tol, opt.rotation);
  const int r = t.rep_dim(), d = q.dim(), k = q.a0_dim();
  if (r == 0) {
    t.pi.assign(d, Mat(0, 0));
    t.domain_basis = Mat(0, k);
    t.cyclic = Vec(0);
    t.residuals["well_definedness"] = 0.0;
    t.residuals["invariance"] = 0.0;
    return t;
  }
  const CheckResult inv = check_invariance(phi, tol);
  t.residuals["invariance"] = inv.residual.value_or(0.0);
  if (!inv.passed)
    throw RejectedError("invariance fails (residual " + std::to_string(*inv.residual) + ", " +
                        inv.witness.value_or("") + ")");
  const CheckResult dens = density_result(phi, t.quotient, tol);
  if (!dens.passed) throw RejectedError("not in I-class: Lambda(A0) is not dense (" + dens.note + ")");

  const Mat& rb = t.quotient.rep_basis;
  const Mat c = rb.adjoint() * q.a0_selector();
  const Mat cp = linalg::pseudo_inverse(c, tol);
  t.domain_basis = c;
  double wd = 0.0;
  for (int i = 0; i < d; ++i) {
    Mat ac(r, k);
    for (int j = 0; j < k; ++j)
      ac.col(j) = rb.adjoint() *
                  mod_mult(q, q.basis_element(i), q.a0_basis_element(j), Side::Right, tol).coeffs;
    Mat p = ac * cp;
    const double res = (p * c - ac).norm() / std::max(1.0, ac.norm());
    wd = std::max(wd, res);
    t.pi.push_back(std::move(p));
  }
  t.residuals["well_definedness"] = wd;
  if (wd > std::max(1e3 * tol, 1e-6))
    throw InternalInconsistency("a (N_Phi cap A0) is not inside N_Phi (residual " +
                                std::to_string(wd) + ")");
  t.cyclic = rb.adjoint() * q.unit().coeffs;
  return t;
}

inline AlgebraElement reconstruct_phi(const GnsTriple& t, const QuasiElement& a,
                                      const QuasiElement& b) {
  if (t.rep_dim() == 0) return t.phi->codomain().zero();
  return t.inner().eval(t.pi_of(a) * t.cyclic, t.pi_of(b) * t.cyclic);
}

/// max over basis pairs of ||Phi(e_i, e_j) - <Pi(e_i) xi, Pi(e_j) xi>||,
/// relative to max ||G_ij||.
inline double reconstruction_residual(const GnsTriple& t) {
  const SesquiMap& phi = *t.phi;
  const double scale = detail::safe_scale(phi.scale());
  double worst = 0.0;
  for (int i = 0; i < phi.dim(); ++i)
    for (int j = 0; j < phi.dim(); ++j) {
      const AlgebraElement rec = reconstruct_phi(t, phi.domain().basis_element(i),
                                                 phi.domain().basis_element(j));
      worst = std::max(worst, op_norm(phi.entry(i, j) - rec) / scale);
    }
  return worst;
}

/// Adjoint, weak partial product, composition, unit, cyclicity,
/// reconstruction and (automatic) closedness.
inline Report verify_representation(const GnsTriple& t, double tol = kDefaultTol) {
  Report rep;
  const QuasiStarAlgebra& q = t.domain();
  const int r = t.rep_dim();
  const auto& dims = t.phi->codomain().block_dims();
  const double scale = detail::safe_scale(t.inner().scale());
  CheckResult closed{"closed"};
  closed.note = "automatic (finite dimension)";
  rep.add(closed);
  if (r == 0) {
    for (const char* name : {"adjoint", "weak_product", "composition", "unit", "cyclic", "reconstruction"}) {
      CheckResult c{name};
      c.residual = 0.0;
      c.note = "trivial representation";
      rep.add(c);
    }
    rep.sort();
    return rep;
  }
  const Mat id = Mat::Identity(r, r);
  {
    CheckResult c{"adjoint"};
    double worst = 0.0;
    for (int i = 0; i < q.dim(); ++i) {
      const Mat& p = t.pi[i];
      const Mat ps = t.pi_of(involution(q, q.basis_element(i), tol));
      const double s = scale * std::max(1.0, linalg::spectral_norm(p));
      const double res =
          detail::max_pair_norm(detail::pair_blocks(t.inner(), p, id), detail::pair_blocks(t.inner(), id, ps), dims) / s;
      worst = std::max(worst, res);
      if (res > tol && !c.witness) c.witness = detail::idx("a", i);
    }
    c.residual = worst;
    c.passed = worst <= tol;
    rep.add(c);
  }
  {
    CheckResult weak{"weak_product"}, comp{"composition"};
    double ww = 0.0, wc = 0.0;
    for (int i = 0; i < q.dim(); ++i) {
      const QuasiElement a = q.basis_element(i);
      const Mat pas = t.pi_of(involution(q, a, tol));
      for (int j = 0; j < q.a0_dim(); ++j) {
        const QuasiElement c = q.a0_basis_element(j);
        const Mat pc = t.pi_of(c);
        const Mat pac = t.pi_of(mod_mult(q, a, c, Side::Right, tol));
        const double s = std::max(1.0, linalg::spectral_norm(t.pi[i])) * std::max(1.0, linalg::spectral_norm(pc));
        const double rw = detail::max_pair_norm(detail::pair_blocks(t.inner(), pc, pas),
                                                detail::pair_blocks(t.inner(), pac, id), dims) /
                          (scale * s);
        const double rc = linalg::spectral_norm(pac - t.pi[i] * pc) / s;
        ww = std::max(ww, rw);
        wc = std::max(wc, rc);
        if (rw > tol && !weak.witness) weak.witness = detail::idx("a", i) + ", " + detail::idx("c", j);
        if (rc > tol && !comp.witness) comp.witness = detail::idx("a", i) + ", " + detail::idx("c", j);
      }
    }
    weak.residual = ww;
    weak.passed = ww <= tol;
    comp.residual = wc;
    comp.passed = wc <= tol;
    rep.add(weak);
    rep.add(comp);
  }
  {
    CheckResult c{"unit"};
    const double res = linalg::spectral_norm(t.pi_of(q.unit()) - id);
    c.residual = res;
    c.passed = res <= std::max(tol, 1e-12);
    if (!c.passed) c.witness = "Pi(e) differs from identity";
    rep.add(c);
  }
  {
    CheckResult c{"cyclic"};
    Mat span(r, q.a0_dim());
    for (int j = 0; j < q.a0_dim(); ++j) span.col(j) = t.pi_of(q.a0_basis_element(j)) * t.cyclic;
    const int rank = linalg::numerical_rank(span, tol);
    c.passed = rank == r;
    c.note = "rank " + std::to_string(rank) + " of " + std::to_string(r);
    if (!c.passed) c.witness = c.note;
    rep.add(c);
  }
  {
    CheckResult c{"reconstruction"};
    c.residual = reconstruction_residual(t);
    c.passed = *c.residual <= tol;
    rep.add(c);
  }
  rep.sort();
  return rep;
}

struct OperatorNormEstimate {
  double sampled = 0.0;      // sup ||Pi x||_Phi / ||x||_Phi over samples
  double trace_form = 0.0;   // exact norm for the trace-form Hilbert structure
};

/// Two estimates of the norm of Pi(a); neither is asserted to equal the other.
inline OperatorNormEstimate operator_norm_estimates(const GnsTriple& t, const QuasiElement& a,
                                                    int n_samples, Rng& rng) {
  OperatorNormEstimate out;
  const int r = t.rep_dim();
  if (r == 0) return out;
  const Mat p = t.pi_of(a);
  for (int s = 0; s < r + n_samples; ++s) {
    const Vec x = s < r ? Vec(Vec::Unit(r, s)) : rng.complex_vector(r);
    const double nx = rep_norm(t.inner(), x);
    if (nx <= 0.0) continue;
    out.sampled = std::max(out.sampled, rep_norm(t.inner(), p * x) / nx);
  }
  std::vector<Mat> ids;
  for (int n : t.phi->codomain().block_dims()) ids.push_back(Mat::Identity(n, n));
  const Mat h = t.inner().scalar_matrix(ids);
  const Mat hs = linalg::psd_sqrt(h);
  const Mat hi = linalg::pseudo_inverse(hs, 1e-12);
  out.trace_form = linalg::spectral_norm(hs * p * hi);
  return out;
}

// ---------------------------------------------------------------------------
// Uniqueness

struct EquivalenceResult {
  bool ok = false;
  Mat u;
  Report report;
};

/// U : Lambda1(a) -> Lambda2(a), checked for preservation of the C-valued
/// inner product, U xi1 = xi2 and U Pi1(a) = Pi2(a) U.
inline EquivalenceResult unitary_equivalence(const GnsTriple& t1, const GnsTriple& t2,
                                             double tol = kDefaultTol) {
  EquivalenceResult out;
  const QuasiStarAlgebra& q = t1.domain();
  if (t1.phi->dim() != t2.phi->dim() ||
      !(t1.phi->codomain() == t2.phi->codomain()))
    throw StructuralError("triples are over different algebras");
  const int d = q.dim();
  const auto& dims = t1.phi->codomain().block_dims();
  CheckResult inner{"equivalence_inner"};
  {
    // compare <Lambda(e_i), Lambda(e_j)> on both sides
    const Mat x1 = t1.quotient.rep_basis.adjoint(), x2 = t2.quotient.rep_basis.adjoint();
    const double scale = detail::safe_scale(std::max(t1.inner().scale(), t2.inner().scale()));
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const AlgebraElement g1 = t1.rep_dim() ? t1.inner().eval(x1.col(i), x1.col(j)) : t1.phi->codomain().zero();
        const AlgebraElement g2 = t2.rep_dim() ? t2.inner().eval(x2.col(i), x2.col(j)) : t2.phi->codomain().zero();
        const double r = op_norm(g1 - g2) / scale;
        if (r > worst) {
          worst = r;
          if (r > tol) inner.witness = detail::idx("i", i) + ", " + detail::idx("j", j);
        }
      }
    inner.residual = worst;
    inner.passed = worst <= tol;
  }
  out.report.add(inner);
  if (t1.rep_dim() != t2.rep_dim()) {
    CheckResult c{"equivalence_dimension"};
    c.passed = false;
    c.witness = std::to_string(t1.rep_dim()) + " vs " + std::to_string(t2.rep_dim());
    out.report.add(c);
    out.report.sort();
    return out;
  }
  const int r = t1.rep_dim();
  const Mat& r1 = t1.quotient.rep_basis;
  const Mat& r2 = t2.quotient.rep_basis;
  out.u = r2.adjoint() * r1;
  {
    CheckResult c{"equivalence_well_defined"};
    c.residual = (out.u * r1.adjoint() - r2.adjoint()).norm();
    c.passed = *c.residual <= std::max(tol, 1e-10) * std::max(1, d);
    if (!c.passed) c.witness = "null spaces differ";
    out.report.add(c);
  }
  {
    CheckResult c{"equivalence_unitary"};
    const double scale = detail::safe_scale(t1.inner().scale());
    const Mat id = Mat::Identity(r, r);
    c.residual = r ? detail::max_pair_norm(detail::pair_blocks(t2.inner(), out.u, out.u),
                                           detail::pair_blocks(t1.inner(), id, id), dims) / scale
                   : 0.0;
    c.passed = *c.residual <= tol;
    out.report.add(c);
  }
  {
    CheckResult c{"equivalence_cyclic"};
    c.residual = r ? (out.u * t1.cyclic - t2.cyclic).norm() : 0.0;
    c.passed = *c.residual <= tol;
    out.report.add(c);
  }
  {
    CheckResult c{"equivalence_intertwining"};
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
      const double s = std::max(1.0, linalg::spectral_norm(t1.pi[i]));
      const double res = r ? linalg::spectral_norm(out.u * t1.pi[i] - t2.pi[i] * out.u) / s : 0.0;
      if (res > worst) worst = res;
      if (res > tol && !c.witness) c.witness = detail::idx("a", i);
    }
    c.residual = worst;
    c.passed = worst <= tol;
    out.report.add(c);
  }
  out.report.sort();
  out.ok = out.report.all_passed();
  return out;
}

/// Haar-random unitary r x r used for rotated rebuilds.
inline Mat random_rotation(int r, Rng& rng) { return r ? rng.unitary(r) : Mat(0, 0); }

// ---------------------------------------------------------------------------
// Corollaries

struct GnsResult {
  GnsTriple triple;
  Report report;
};

/// Phi(a, b) = omega(b^* a) on a unital *-algebra model, with
/// omega(a) = <Pi(a) eta, eta> and omega(b^* a c) = <Pi(a) Lambda(c), Lambda(b)>.
inline GnsResult gns_from_positive_linear_map(const LinearMap& omega, int n_samples, Rng& rng,
                                              double tol = kDefaultTol) {
  const QuasiStarAlgebra& q = *omega.domain;
  if (q.a0_dim() != q.dim()) throw PreconditionError("model must satisfy A0 = A");
  MapFlags flags;
  flags.invariant = true;
  SesquiMap phi = omega.induced_map(tol, flags);
  const PositivityResult pos = check_positivity(phi, PositivityMode::Certificate, n_samples, rng, tol);
  if (!pos.positive)
    throw RejectedError("derived map is not positive (witness " +
                        detail::format_vec(pos.witness.value_or(Vec())) + ")");
  phi.flags().positivity = pos.mode;
  GnsResult out{build_gns(phi, {tol, std::nullopt}), {}};
  out.report = verify_representation(out.triple, tol);
  const GnsTriple& t = out.triple;
  const double scale = detail::safe_scale(phi.scale());
  const int d = q.dim();
  CheckResult rec{"omega_recovered"}, tri{"omega_triple_product"};
  double w1 = 0.0, w2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const Mat pa = t.pi[i];
    const AlgebraElement val = t.rep_dim() ? t.inner().eval(pa * t.cyclic, t.cyclic) : phi.codomain().zero();
    const double r1 = op_norm(omega.values[i] - val) / scale;
    w1 = std::max(w1, r1);
    if (r1 > tol && !rec.witness) rec.witness = detail::idx("a", i);
  }
  // triples (b, a, c) over the basis, subsampled for large d
  const long total = static_cast<long>(d) * d * d;
  const long stride = std::max(1L, total / 2000);
  for (long s = 0; s < total; s += stride) {
    const int i = static_cast<int>(s / (d * d)), j = static_cast<int>((s / d) % d), l = static_cast<int>(s % d);
    const QuasiElement bac = q.element(q.basis(j).adjoint() * q.basis(i) * q.basis(l), tol, "b*ac");
    const AlgebraElement lhs = omega(bac);
    const Vec lc = t.quotient.lambda(q.basis_element(l));
    const Vec lb = t.quotient.lambda(q.basis_element(j));
    const AlgebraElement rhs = t.rep_dim() ? t.inner().eval(t.pi[i] * lc, lb) : phi.codomain().zero();
    const double r2 = op_norm(lhs - rhs) / scale;
    w2 = std::max(w2, r2);
    if (r2 > tol && !tri.witness)
      tri.witness = detail::idx("a", i) + ", " + detail::idx("b", j) + ", " + detail::idx("c", l);
  }
  rec.residual = w1;
  rec.passed = w1 <= tol;
  tri.residual = w2;
  tri.passed = w2 <= tol;
  out.report.add(rec);
  out.report.add(tri);
  out.report.sort();
  return out;
}

/// omega bounded by M with respect to the A-norm on A0; Phi(b, c) = omega(c^* b)
/// extended from the A0 basis, then the GNS pipeline. Also checks the
/// Stinespring inequality through convergent sequences c_n = a + 2^-n delta.
inline GnsResult gns_from_bounded_functional(const LinearMap& omega, double bound_m, int n_samples,
                                             Rng& rng, double tol = kDefaultTol) {
  const QuasiStarAlgebra& q = *omega.domain;
  if (q.a0_dim() != q.dim()) throw PreconditionError("A0 must span A");
  double scale = 0.0;
  for (const auto& v : omega.values) scale = std::max(scale, op_norm(v));
  CheckResult bnd{"functional_bound"};
  bnd.worst_ratio = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const QuasiElement c = q.random_a0(rng), d = q.random_a0(rng);
    const Mat dc = q.matrix(d).adjoint() * q.matrix(c);
    const double lhs = op_norm(omega(q.element(dc, tol, "d*c")));
    const double rhs = bound_m * q.norm_a(c) * q.norm_a(d);
    const double floor = tol * scale * c.coeffs.norm() * d.coeffs.norm();
    const double ratio = q.norm_a(c) * q.norm_a(d) > 0.0 ? lhs / (q.norm_a(c) * q.norm_a(d)) : 0.0;
    bnd.worst_ratio = std::max(*bnd.worst_ratio, ratio);
    if (lhs > rhs * (1.0 + tol) + floor)
      throw PreconditionError("functional bound violated for c = " + detail::format_vec(c.coeffs) +
                              ", d = " + detail::format_vec(d.coeffs));
  }
  MapFlags flags;
  SesquiMap phi = omega.induced_map(tol, flags);
  const CheckResult inv = check_invariance(phi, tol);
  if (!inv.passed) throw RejectedError("extension is not invariant");
  phi.flags().invariant = true;
  phi.flags().positivity = check_positivity(phi, PositivityMode::Certificate, n_samples, rng, tol).mode;
  GnsResult out{build_gns(phi, {tol, std::nullopt}), {}};
  out.report = verify_representation(out.triple, tol);
  out.report.add(bnd);
  out.report.add(inv);
  const double sc = detail::safe_scale(scale);
  {
    CheckResult c{"omega_from_phi"};
    double worst = 0.0;
    for (int i = 0; i < q.dim(); ++i)
      worst = std::max(worst, op_norm(omega.values[i] - phi(q.basis_element(i), q.unit())) / sc);
    c.residual = worst;
    c.passed = worst <= tol;
    out.report.add(c);
  }
  {
    CheckResult c{"limit_stinespring"};
    c.worst_ratio = 0.0;
    const double we = op_norm(omega(q.unit()));
    auto sq = [&](const QuasiElement& x) {
      return q.element(q.matrix(x).adjoint() * q.matrix(x), tol, "x*x");
    };
    const int n_seq = 40;
    for (int s = 0; s < std::max(1, n_samples / 10); ++s) {
      const QuasiElement a = q.random_element(rng), delta = q.random_a0(rng);
      const double wa = op_norm(omega(a));
      double last = 0.0;
      for (int n = 1; n <= n_seq; ++n) {
        const QuasiElement cn{a.coeffs + std::ldexp(1.0, -n) * delta.coeffs};
        const double wcc = op_norm(omega(sq(cn)));
        const double wc = op_norm(omega(cn));
        const double fl = tol * sc * std::pow(cn.coeffs.squaredNorm(), 2);
        if (4.0 * we * wcc * (1.0 + tol) + fl < wc * wc && c.passed) {
          c.passed = false;
          c.witness = "sequence term n=" + std::to_string(n);
        }
        last = wcc;
      }
      const double lim = op_norm(omega(sq(a)));
      const double conv = std::abs(last - lim) / std::max(1.0, lim);
      if (conv > 1e-8 && c.passed) {
        c.passed = false;
        c.witness = "sequence does not converge";
      }
      const double fl = tol * sc * std::pow(a.coeffs.squaredNorm(), 2);
      if (4.0 * we * last * (1.0 + tol) + fl < wa * wa && c.passed) {
        c.passed = false;
        c.witness = "limit inequality, a = " + detail::format_vec(a.coeffs);
      }
      if (we * last > 0.0) c.worst_ratio = std::max(*c.worst_ratio, wa * wa / (4.0 * we * last));
    }
    out.report.add(c);
  }
  out.report.sort();
  return out;
}

struct ModuleGnsResult {
  GnsTriple triple;
  std::vector<Mat> action;  // Lambda(c) -> Lambda(c x) for each matrix unit x of C
  Report report;
};

/// GNS for C-linear (or module-bounded) maps, plus C-linearity of Pi(a) on
/// the quotient module.
inline ModuleGnsResult module_gns(const SesquiMap& phi, const RightAction* action, int n_samples,
                                  Rng& rng, double tol = kDefaultTol) {
  if (action == nullptr) action = phi.action() ? &*phi.action() : nullptr;
  if (action == nullptr) throw PreconditionError("no right action declared");
  ModuleGnsResult out;
  const Report lin = check_c_linearity(phi, action, n_samples, rng, tol);
  const bool clinear = lin.passed("c_linearity");
  out.report.merge(lin);
  if (!clinear) {
    const Report mb = check_module_bound(phi, action, n_samples, rng, tol);
    out.report.merge(mb);
    if (!mb.all_passed()) {
      const CheckResult* w = mb.find("module_bound");
      throw RejectedError("module bound fails" +
                          (w && w->witness ? " (" + *w->witness + ")" : std::string()));
    }
  }
  out.triple = build_gns(phi, {tol, std::nullopt});
  out.report.merge(verify_representation(out.triple, tol));
  const GnsTriple& t = out.triple;
  const QuasiStarAlgebra& q = phi.domain();
  const CStarAlgebra& c = action->acting;
  const int r = t.rep_dim(), d = q.dim();
  const Mat& rb = t.quotient.rep_basis;
  CheckResult wd{"module_action_well_defined"}, pil{"pi_c_linear"};
  double wwd = 0.0, wpl = 0.0;
  for (int s = 0; s < c.dimension(); ++s) {
    const AlgebraElement x = c.basis_element(s);
    Mat ax(r, d);
    for (int i = 0; i < d; ++i) ax.col(i) = rb.adjoint() * action->apply(q, q.basis_element(i), x, tol).coeffs;
    Mat rx = ax * rb;
    wwd = std::max(wwd, (rx * rb.adjoint() - ax).norm() / std::max(1.0, ax.norm()));
    for (int i = 0; i < d && r > 0; ++i) {
      const double sc = std::max(1.0, linalg::spectral_norm(t.pi[i]) * linalg::spectral_norm(rx));
      const double res = linalg::spectral_norm(t.pi[i] * rx - rx * t.pi[i]) / sc;
      if (res > wpl) wpl = res;
      if (res > tol && !pil.witness) pil.witness = detail::idx("a", i) + ", " + detail::idx("x", s);
    }
    out.action.push_back(std::move(rx));
  }
  wd.residual = wwd;
  wd.passed = wwd <= tol;
  pil.residual = wpl;
  pil.passed = wpl <= tol;
  out.report.add(wd);
  out.report.add(pil);
  out.report.sort();
  return out;
}

// ---------------------------------------------------------------------------
// Intertwiner with the scalar GNS of theta o Phi

struct IntertwinerResult {
  Mat t;                      // s x r, rep coordinates of X_Phi -> coordinates of H_phi
  Mat h_basis;                // r x s, orthonormal complement of N_phi in rep coordinates
  Mat inner;                  // s x s, scalar inner product on H_phi
  std::vector<Mat> pi_phi;    // s x s per basis element
  Mat lambda;                 // s x d, lambda_phi(e_i)
  double bound = 0.0;         // estimate of ||T||
  double intertwining = 0.0;  // max_a ||T Pi(a) - pi_phi(a) T||
  double well_defined = 0.0;  // N_Phi inside N_phi
  Report report;
};

inline IntertwinerResult intertwiner(const GnsTriple& t, const State& theta, int n_samples, Rng& rng,
                                     double tol = kDefaultTol) {
  const SesquiMap& phi = *t.phi;
  const CStarAlgebra& c = phi.codomain();
  if (static_cast<int>(theta.densities().size()) != c.num_blocks())
    throw PreconditionError("theta is not a state on the codomain");
  for (int k = 0; k < c.num_blocks(); ++k)
    if (theta.densities()[k].rows() != c.block_dim(k))
      throw PreconditionError("theta is not a state on the codomain");
  const QuasiStarAlgebra& q = phi.domain();
  IntertwinerResult out;
  const int r = t.rep_dim(), d = q.dim(), k = q.a0_dim();
  // N_Phi inside N_phi, checked in A coordinates
  {
    const Mat g = phi.form().scalar_matrix(theta.densities());
    double worst = 0.0;
    const double sc = detail::safe_scale(linalg::spectral_norm(g));
    for (int v = 0; v < t.quotient.null_dim(); ++v)
      worst = std::max(worst, (g * t.quotient.null_basis.col(v)).norm() / sc);
    out.well_defined = worst;
  }
  const Mat h = r ? t.inner().scalar_matrix(theta.densities()) : Mat(0, 0);
  const linalg::KernelSplit ks = linalg::kernel_split(h, tol);
  out.h_basis = (ks.rank == r) ? Mat(Mat::Identity(r, r)) : ks.complement;
  const int s = static_cast<int>(out.h_basis.cols());
  out.t = out.h_basis.adjoint();
  out.inner = out.h_basis.adjoint() * h * out.h_basis;
  out.lambda = out.t * t.quotient.rep_basis.adjoint();
  // classical construction pi_phi(a) lambda(c) = lambda(ac)
  const Mat cphi = out.lambda * q.a0_selector();
  const Mat cpinv = linalg::pseudo_inverse(cphi, tol);
  for (int i = 0; i < d; ++i) {
    Mat ac(s, k);
    for (int j = 0; j < k; ++j)
      ac.col(j) = out.lambda * mod_mult(q, q.basis_element(i), q.a0_basis_element(j), Side::Right, tol).coeffs;
    out.pi_phi.push_back(ac * cpinv);
  }
  for (int i = 0; i < d && r > 0; ++i) {
    const double sc = std::max(1.0, linalg::spectral_norm(t.pi[i]));
    out.intertwining = std::max(
        out.intertwining, linalg::spectral_norm(out.t * t.pi[i] - out.pi_phi[i] * out.t) / sc);
  }
  // ||T|| = sup sqrt(theta<x,x>) / sqrt(||<x,x>||)
  if (r > 0) {
    std::vector<Vec> cands;
    for (int j = 0; j < r; ++j) cands.push_back(Vec::Unit(r, j));
    std::vector<Mat> ids;
    for (int n : c.block_dims()) ids.push_back(Mat::Identity(n, n));
    const Mat htr = t.inner().scalar_matrix(ids);
    const Mat hs = linalg::psd_sqrt(htr);
    const Mat hi = linalg::pseudo_inverse(hs, 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> es(hi * (0.5 * (h + h.adjoint())) * hi);
    for (int j = 0; j < r; ++j) cands.push_back(hi * es.eigenvectors().col(j));
    for (int j = 0; j < n_samples; ++j) cands.push_back(rng.complex_vector(r));
    for (const Vec& x : cands) {
      const double den = op_norm(t.inner().eval(x, x));
      if (den <= 0.0) continue;
      const double num = std::max(0.0, std::real(x.dot(h * x)));
      out.bound = std::max(out.bound, std::sqrt(num / den));
    }
  }
  CheckResult wd{"intertwiner_well_defined"};
  wd.residual = out.well_defined;
  wd.passed = out.well_defined <= tol;
  CheckResult nb{"intertwiner_norm"};
  nb.worst_ratio = out.bound;
  nb.passed = out.bound <= 1.0 + 1e-10;
  CheckResult it{"intertwining"};
  it.residual = out.intertwining;
  it.passed = out.intertwining <= tol;
  out.report.add(wd);
  out.report.add(nb);
  out.report.add(it);
  out.report.sort();
  return out;
}

}  // namespace gnslab
