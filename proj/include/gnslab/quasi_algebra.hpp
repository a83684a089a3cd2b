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

// Matrix-realised quasi *-algebras (A, A0). A is the span of a list of m x m
// complex matrices, A0 the span of a sub-list. Module actions and the
// involution are literal matrix operations; every closure question becomes a
// least-squares residual against the basis.

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gnslab/cstar.hpp"
#include "gnslab/errors.hpp"
#include "gnslab/linalg.hpp"
#include "gnslab/random.hpp"
#include "gnslab/report.hpp"

namespace gnslab {

enum class NormKind { Operator, Schatten };

/// A named norm on M_m. Schatten norms are taken against the trace
/// rho = scale * tr, with scale defaulting to 1/m (normalised trace).
struct NormSpec {
  NormKind kind = NormKind::Operator;
  double p = 2.0;
  std::optional<double> trace_scale;

  static NormSpec op() { return {}; }
  static NormSpec schatten(double p, std::optional<double> scale = std::nullopt) {
    return {NormKind::Schatten, p, scale};
  }

  double operator()(const Mat& x) const {
    if (x.size() == 0) return 0.0;
    if (kind == NormKind::Operator) return linalg::spectral_norm(x);
    const double scale = trace_scale.value_or(1.0 / static_cast<double>(x.rows()));
    Eigen::JacobiSVD<Mat> svd(x);
    double s = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      s += std::pow(svd.singularValues()(i), p);
    return std::pow(scale * s, 1.0 / p);
  }
};

/// Coefficient vector over the basis of A.
struct QuasiElement {
  Vec coeffs;
};

enum class Side { Left, Right };  // side of a on which x acts: x·a or a·x

class QuasiStarAlgebra {
 public:
  QuasiStarAlgebra(int ambient_dim, std::vector<Mat> basis, std::vector<int> a0_indices,
                   std::optional<Vec> unit_coeffs = std::nullopt,
                   std::optional<NormSpec> norm_a = std::nullopt,
                   std::optional<NormSpec> norm_a0 = std::nullopt)
      : m_(ambient_dim),
        basis_(std::move(basis)),
        a0_(std::move(a0_indices)),
        unit_(std::move(unit_coeffs)),
        norm_a_(norm_a),
        norm_a0_(norm_a0) {
    if (m_ <= 0) throw StructuralError("ambient dimension must be positive");
    if (basis_.empty()) throw StructuralError("basis of A must be non-empty");
    for (const auto& e : basis_)
      if (e.rows() != m_ || e.cols() != m_)
        throw StructuralError("basis matrix is not " + std::to_string(m_) + "x" +
                              std::to_string(m_));
    std::set<int> seen;
    for (int i : a0_) {
      if (i < 0 || i >= dim()) throw StructuralError("A0 index out of range");
      if (!seen.insert(i).second) throw StructuralError("duplicate A0 index");
    }
    stacked_ = Mat(static_cast<Eigen::Index>(m_) * m_, dim());
    for (int i = 0; i < dim(); ++i) stacked_.col(i) = linalg::vec(basis_[i]);
    if (linalg::numerical_rank(stacked_, 1e-12) != dim())
      throw StructuralError("basis of A is linearly dependent");
    qr_.compute(stacked_);
    if (unit_ && unit_->size() != dim()) throw StructuralError("unit coefficient length");
  }

  int ambient_dim() const { return m_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int a0_dim() const { return static_cast<int>(a0_.size()); }
  const std::vector<Mat>& basis() const { return basis_; }
  const Mat& basis(int i) const { return basis_.at(i); }
  const std::vector<int>& a0_indices() const { return a0_; }
  bool unital() const { return unit_.has_value(); }
  const std::optional<Vec>& unit_coeffs() const { return unit_; }
  const std::optional<NormSpec>& norm_a_spec() const { return norm_a_; }
  const std::optional<NormSpec>& norm_a0_spec() const { return norm_a0_; }

  QuasiElement unit() const {
    if (!unit_) throw PreconditionError("quasi *-algebra has no unit");
    return {*unit_};
  }
  QuasiElement zero() const { return {Vec::Zero(dim())}; }
  QuasiElement basis_element(int i) const { return {Vec::Unit(dim(), i)}; }
  QuasiElement a0_basis_element(int j) const { return basis_element(a0_.at(j)); }

  /// d x k matrix whose columns are the A0 basis elements in A coordinates.
  Mat a0_selector() const {
    Mat s = Mat::Zero(dim(), a0_dim());
    for (int j = 0; j < a0_dim(); ++j) s(a0_[j], j) = 1.0;
    return s;
  }

  Mat matrix(const QuasiElement& a) const {
    check_length(a);
    return linalg::unvec(stacked_ * a.coeffs, m_, m_);
  }

  struct Expansion {
    Vec coeffs;
    double residual = 0.0;  // relative, in Frobenius norm
  };
  Expansion expand(const Mat& x) const {
    if (x.rows() != m_ || x.cols() != m_) throw StructuralError("matrix shape mismatch");
    const Vec v = linalg::vec(x);
    Expansion e;
    e.coeffs = qr_.solve(v);
    const double nv = v.norm();
    e.residual = nv > 0.0 ? (stacked_ * e.coeffs - v).norm() / nv : 0.0;
    return e;
  }
  bool in_span(const Mat& x, double tol = kDefaultTol) const {
    return expand(x).residual <= tol;
  }
  /// Coefficients of a matrix known to lie in span(A).
  QuasiElement element(const Mat& x, double tol = kDefaultTol,
                       const std::string& what = "matrix") const {
    Expansion e = expand(x);
    if (e.residual > tol) throw ClosureError(what + " is not in span(A)", e.residual);
    return {std::move(e.coeffs)};
  }

  /// Relative weight of a's coefficients outside the A0 sub-basis.
  double a0_residual(const QuasiElement& a) const {
    check_length(a);
    const double na = a.coeffs.norm();
    if (na == 0.0) return 0.0;
    Vec off = a.coeffs;
    for (int i : a0_) off(i) = 0.0;
    return off.norm() / na;
  }
  bool in_a0(const QuasiElement& a, double tol = kDefaultTol) const {
    return a0_residual(a) <= tol;
  }

  double norm_a(const QuasiElement& a) const {
    return norm_a_ ? (*norm_a_)(matrix(a)) : a.coeffs.norm();
  }
  double norm_a0(const QuasiElement& a) const {
    return norm_a0_ ? (*norm_a0_)(matrix(a)) : a.coeffs.norm();
  }

  QuasiElement random_element(Rng& rng) const { return {rng.complex_vector(dim())}; }
  QuasiElement random_a0(Rng& rng) const {
    return {a0_selector() * rng.complex_vector(a0_dim())};
  }

  void check_length(const QuasiElement& a) const {
    if (a.coeffs.size() != dim())
      throw StructuralError("coefficient vector has length " +
                            std::to_string(a.coeffs.size()) + ", expected " +
                            std::to_string(dim()));
  }

 private:
  int m_;
  std::vector<Mat> basis_;
  std::vector<int> a0_;
  std::optional<Vec> unit_;
  std::optional<NormSpec> norm_a_;
  std::optional<NormSpec> norm_a0_;
  Mat stacked_;
  Eigen::ColPivHouseholderQR<Mat> qr_;
};

using QuasiAlgebraPtr = std::shared_ptr<const QuasiStarAlgebra>;

// ---------------------------------------------------------------------------
// Operations

inline QuasiElement involution(const QuasiStarAlgebra& q, const QuasiElement& a,
                               double tol = kDefaultTol) {
  return q.element(q.matrix(a).adjoint(), tol, "adjoint");
}

/// a·x (side Right) or x·a (side Left) for x in A0.
inline QuasiElement mod_mult(const QuasiStarAlgebra& q, const QuasiElement& a,
                             const QuasiElement& x, Side side, double tol = kDefaultTol) {
  q.check_length(a);
  q.check_length(x);
  const double r = q.a0_residual(x);
  if (r > tol)
    throw PreconditionError("module multiplier is not in span(A0) (residual " +
                            std::to_string(r) + ")");
  const Mat prod = side == Side::Right ? Mat(q.matrix(a) * q.matrix(x))
                                       : Mat(q.matrix(x) * q.matrix(a));
  return q.element(prod, tol, "module product");
}

/// Product of two elements when it lands back in span(A) (used for *-algebra
/// models where A = A0).
inline QuasiElement product(const QuasiStarAlgebra& q, const QuasiElement& a,
                            const QuasiElement& b, double tol = kDefaultTol) {
  return q.element(q.matrix(a) * q.matrix(b), tol, "product");
}

struct Nondegeneracy {
  bool left = false;   // a x = 0 for all x in A0  =>  a = 0
  bool right = false;  // a x = 0 for all a in A   =>  x = 0
  int left_rank = 0;
  int right_rank = 0;
};

/// Rank tests of a -> (a x_j)_j and x -> (e_i x)_i. A trivial A0 makes both
/// flags false.
inline Nondegeneracy nondegeneracy_check(const QuasiStarAlgebra& q,
                                         double tol = kDefaultTol) {
  Nondegeneracy out;
  const int d = q.dim(), k = q.a0_dim(), m2 = q.ambient_dim() * q.ambient_dim();
  if (k == 0) return out;
  Mat left(static_cast<Eigen::Index>(m2) * k, d);
  Mat right(static_cast<Eigen::Index>(m2) * d, k);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < k; ++j) {
      const Vec p = linalg::vec(q.basis(i) * q.basis(q.a0_indices()[j]));
      left.block(static_cast<Eigen::Index>(j) * m2, i, m2, 1) = p;
      right.block(static_cast<Eigen::Index>(i) * m2, j, m2, 1) = p;
    }
  out.left_rank = linalg::numerical_rank(left, tol);
  out.right_rank = linalg::numerical_rank(right, tol);
  out.left = out.left_rank == d;
  out.right = out.right_rank == k;
  return out;
}

namespace detail {
inline std::string pair_witness(const char* a, int i, const char* b, int j) {
  std::ostringstream os;
  os << a << "=" << i << ", " << b << "=" << j;
  return os.str();
}
}  // namespace detail

/// Checks every structural axiom of a matrix-realised quasi *-algebra and
/// reports residuals. Nothing here throws; failures become report entries.
inline Report validate(const QuasiStarAlgebra& q, double tol = kDefaultTol,
                       std::uint64_t seed = 0, int n_samples = 32) {
  Report rep;
  const int d = q.dim(), k = q.a0_dim();
  const auto& a0 = q.a0_indices();

  {
    CheckResult c{"involution_closure"};
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
      const double r = q.expand(q.basis(i).adjoint()).residual;
      if (r > worst) worst = r;
      if (r > tol && !c.witness) c.witness = "basis index " + std::to_string(i);
    }
    c.residual = worst;
    c.passed = worst <= tol;
    rep.add(std::move(c));
  }
  {
    CheckResult c{"a0_subalgebra"};
    double worst = 0.0;
    auto a0_res = [&](const Mat& x) {
      const auto e = q.expand(x);
      return std::max(e.residual, q.a0_residual({e.coeffs}));
    };
    for (int j = 0; j < k; ++j) {
      const double r = a0_res(q.basis(a0[j]).adjoint());
      worst = std::max(worst, r);
      if (r > tol && !c.witness) c.witness = "adjoint of A0 index " + std::to_string(j);
      for (int l = 0; l < k; ++l) {
        const double s = a0_res(q.basis(a0[j]) * q.basis(a0[l]));
        worst = std::max(worst, s);
        if (s > tol && !c.witness) c.witness = detail::pair_witness("x", j, "y", l);
      }
    }
    c.residual = worst;
    c.passed = worst <= tol;
    rep.add(std::move(c));
  }
  bool module_ok = true;
  {
    CheckResult c{"module_actions"};
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < k; ++j) {
        const Mat& a = q.basis(i);
        const Mat& x = q.basis(a0[j]);
        const double r = std::max(q.expand(a * x).residual, q.expand(x * a).residual);
        worst = std::max(worst, r);
        if (r > tol && !c.witness) c.witness = detail::pair_witness("a", i, "x", j);
      }
    c.residual = worst;
    c.passed = module_ok = worst <= tol;
    rep.add(std::move(c));
  }
  {
    // Through the coefficient pathway: (xa)y = x(ay), a(xy) = (ax)y, and
    // (ax)* = x* a*.
    CheckResult assoc{"associativity"}, adj{"adjoint_of_product"};
    double wa = 0.0, wj = 0.0;
    auto back = [&](const Mat& x) { return q.matrix({q.expand(x).coeffs}); };
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < k; ++j) {
        const Mat& a = q.basis(i);
        const Mat& x = q.basis(a0[j]);
        const Mat ax = back(a * x);
        const double scale = std::max(1.0, a.norm() * x.norm());
        const double rj = (back(ax.adjoint()) - back(x.adjoint() * back(a.adjoint()))).norm() / scale;
        wj = std::max(wj, rj);
        if (rj > tol && !adj.witness) adj.witness = detail::pair_witness("a", i, "x", j);
        for (int l = 0; l < k; ++l) {
          const Mat& y = q.basis(a0[l]);
          const double s3 = std::max(1.0, scale * y.norm());
          const double r1 = (back(back(x * a) * y) - back(x * back(a * y))).norm() / s3;
          const double r2 = (back(a * back(x * y)) - back(ax * y)).norm() / s3;
          const double r = std::max(r1, r2);
          wa = std::max(wa, r);
          if (r > tol && !assoc.witness)
            assoc.witness = "a=" + std::to_string(i) + ", x=" + std::to_string(j) +
                            ", y=" + std::to_string(l);
        }
      }
    assoc.residual = wa;
    assoc.passed = wa <= tol;
    adj.residual = wj;
    adj.passed = wj <= tol;
    if (!module_ok) {
      assoc.note = adj.note = "module actions leave span(A)";
    }
    rep.add(std::move(assoc));
    rep.add(std::move(adj));
  }
  {
    CheckResult c{"unit"};
    if (!q.unital()) {
      c.note = "no unit declared";
    } else {
      const Mat e = q.matrix(q.unit());
      double worst = q.a0_residual(q.unit());
      if (worst > tol) c.witness = "unit is not in A0";
      for (int i = 0; i < d; ++i) {
        const Mat& a = q.basis(i);
        const double r = std::max((a * e - a).norm(), (e * a - a).norm()) /
                         std::max(1.0, a.norm());
        worst = std::max(worst, r);
        if (r > tol && !c.witness) c.witness = "basis index " + std::to_string(i);
      }
      c.residual = worst;
      c.passed = worst <= tol;
    }
    rep.add(std::move(c));
  }
  {
    CheckResult c{"a0_dense"};
    const int rank = linalg::numerical_rank(q.a0_selector(), tol);
    c.passed = true;
    c.note = rank == d ? "span(A0) = span(A)"
                       : "span(A0) has dimension " + std::to_string(rank) + " < " +
                             std::to_string(d);
    rep.add(std::move(c));
  }
  Rng rng(seed);
  if (q.norm_a_spec()) {
    CheckResult c{"bq_star"};
    double worst = 0.0;
    for (int s = 0; s < d + n_samples; ++s) {
      const Mat a = s < d ? q.basis(s) : q.matrix(q.random_element(rng));
      const double na = (*q.norm_a_spec())(a);
      const double r = std::abs((*q.norm_a_spec())(a.adjoint()) - na) / std::max(na, 1e-300);
      worst = std::max(worst, r);
      if (r > tol && !c.witness) c.witness = "sample " + std::to_string(s);
    }
    c.residual = worst;
    c.passed = worst <= tol;
    rep.add(std::move(c));
  }
  if (q.norm_a_spec() && q.norm_a0_spec() && k > 0) {
    // Observed constant c with ||ax||_A <= c ||a||_A ||x||_A0; recorded only.
    CheckResult c{"module_continuity"};
    double worst = 0.0;
    for (int s = 0; s < n_samples; ++s) {
      const Mat a = q.matrix(q.random_element(rng));
      const Mat x = q.matrix(q.random_a0(rng));
      const double den = (*q.norm_a_spec())(a) * (*q.norm_a0_spec())(x);
      if (den <= 0.0) continue;
      worst = std::max({worst, (*q.norm_a_spec())(a * x) / den,
                        (*q.norm_a_spec())(x * a) / den});
    }
    c.worst_ratio = worst;
    c.note = "observed bound constant";
    rep.add(std::move(c));
  }
  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------
// Models

/// Matrix units E_pq of M_m in row-major order.
inline std::vector<Mat> matrix_units(int m) {
  std::vector<Mat> out;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      Mat e = Mat::Zero(m, m);
      e(p, q) = 1.0;
      out.push_back(std::move(e));
    }
  return out;
}

inline Vec identity_coeffs(int m) {
  Vec u = Vec::Zero(m * m);
  for (int p = 0; p < m; ++p) u(p * m + p) = 1.0;
  return u;
}

/// A = A0 = M_m(C) with the matrix-unit basis.
inline QuasiStarAlgebra full_matrix_model(int m, std::optional<NormSpec> norm_a = NormSpec::op(),
                                          std::optional<NormSpec> norm_a0 = NormSpec::op()) {
  std::vector<int> idx(m * m);
  for (int i = 0; i < m * m; ++i) idx[i] = i;
  return QuasiStarAlgebra(m, matrix_units(m), idx, identity_coeffs(m), norm_a, norm_a0);
}

/// Two-norm model of (L^p(rho), L^inf(rho)) on M_m: Schatten-p on A, operator
/// norm on A0, normalised trace.
inline QuasiStarAlgebra schatten_model(int m, double p = 2.0,
                                       std::optional<double> trace_scale = std::nullopt) {
  return full_matrix_model(m, NormSpec::schatten(p, trace_scale), NormSpec::op());
}

/// A = A0 = C realised as block-diagonal matrices; basis follows
/// CStarAlgebra::basis_element ordering.
inline QuasiStarAlgebra block_model(const CStarAlgebra& c) {
  std::vector<Mat> basis;
  std::vector<int> idx;
  for (int s = 0; s < c.dimension(); ++s) {
    basis.push_back(c.embed(c.basis_element(s)));
    idx.push_back(s);
  }
  return QuasiStarAlgebra(c.total_size(), std::move(basis), std::move(idx),
                          c.coordinates(c.unit()), NormSpec::op(), NormSpec::op());
}

/// Commutative C^d realised as diagonal d x d matrices.
inline QuasiStarAlgebra diagonal_model(int d) {
  return block_model(CStarAlgebra(std::vector<int>(d, 1)));
}

/// A = M_m, A0 = C·I. Basis: I followed by all matrix units except E_{m-1,m-1}.
inline QuasiStarAlgebra scalar_core_model(int m) {
  std::vector<Mat> basis{Mat::Identity(m, m)};
  auto units = matrix_units(m);
  units.pop_back();
  for (auto& e : units) basis.push_back(std::move(e));
  Vec u = Vec::Unit(m * m, 0);
  return QuasiStarAlgebra(m, std::move(basis), {0}, u, NormSpec::op(), NormSpec::op());
}

/// A = M_m, A0 = upper-triangular matrices (not *-closed unless m = 1).
inline QuasiStarAlgebra upper_triangular_model(int m) {
  std::vector<int> idx;
  for (int p = 0; p < m; ++p)
    for (int q = p; q < m; ++q) idx.push_back(p * m + q);
  return QuasiStarAlgebra(m, matrix_units(m), idx, identity_coeffs(m), NormSpec::op(),
                          NormSpec::op());
}

/// A = A0 = {0} is not representable (empty basis); this is A = M_m with
/// trivial A0.
inline QuasiStarAlgebra trivial_core_model(int m) {
  return QuasiStarAlgebra(m, matrix_units(m), {}, std::nullopt, NormSpec::op(),
                          NormSpec::op());
}

}  // namespace gnslab
