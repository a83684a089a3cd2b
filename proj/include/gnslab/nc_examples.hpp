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

// Desk-scale noncommutative examples: a trace rho on M_m with Schatten norms,
// maps built from the min-calculus f_t(W) sampled on a grid of [0, ||W||],
// trapezoid-rule operator-valued integrals, and series of maps.

#include <cmath>
#include <memory>
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

/// M_m with rho = rho_unit * tr / m, the Schatten-p norm on the ambient space
/// and the operator norm on the core. rho(I) >= 1 and p >= 2 are required.
class TraceAlgebra {
 public:
  explicit TraceAlgebra(int m, double p = 2.0, double rho_unit = 1.0)
      : m_(m), p_(p), rho_unit_(rho_unit) {
    if (m < 1) throw StructuralError("trace algebra needs m >= 1");
    if (!(p >= 2.0)) throw PreconditionError("Schatten exponent must be >= 2");
    if (!(rho_unit >= 1.0)) throw PreconditionError("rho(I) must be >= 1");
    model_ = std::make_shared<const QuasiStarAlgebra>(schatten_model(m, p, trace_scale()));
  }

  int m() const { return m_; }
  double p() const { return p_; }
  double rho_unit() const { return rho_unit_; }
  double trace_scale() const { return rho_unit_ / m_; }

  cplx rho(const Mat& x) const { return trace_scale() * x.trace(); }
  double norm_p(const Mat& x) const { return NormSpec::schatten(p_, trace_scale())(x); }
  double norm_q(const Mat& x, double q) const { return NormSpec::schatten(q, trace_scale())(x); }
  double norm_inf(const Mat& x) const { return linalg::spectral_norm(x); }

  const QuasiAlgebraPtr& model() const { return model_; }
  QuasiElement element(const Mat& x) const { return model_->element(x); }

 private:
  int m_;
  double p_;
  double rho_unit_;
  QuasiAlgebraPtr model_;
};

/// Faithfulness and traciality on samples, and the recorded monotonicity of
/// the normalised Schatten norms in p.
inline Report trace_properties(const TraceAlgebra& ta, int n_samples, Rng& rng,
                               double tol = kDefaultTol) {
  CheckResult faithful{"trace_faithful"}, tracial{"trace_tracial"}, mono{"schatten_monotone"};
  double wt = 0.0, wm = 0.0, min_ratio = INFINITY;
  for (int s = 0; s < n_samples; ++s) {
    const Mat x = rng.ginibre(ta.m(), ta.m()), y = rng.ginibre(ta.m(), ta.m());
    const double fx = ta.rho(x.adjoint() * x).real() / x.squaredNorm();
    min_ratio = std::min(min_ratio, fx);
    const double r = std::abs(ta.rho(x * y) - ta.rho(y * x)) / std::max(1.0, x.norm() * y.norm());
    wt = std::max(wt, r);
    const double n2 = ta.norm_q(x, 2.0), n4 = ta.norm_q(x, 4.0);
    if (ta.rho_unit() == 1.0) wm = std::max(wm, n2 / n4);
  }
  faithful.worst_ratio = min_ratio;
  faithful.passed = min_ratio > 0.0;
  tracial.residual = wt;
  tracial.passed = wt <= tol;
  mono.worst_ratio = wm;
  mono.note = "observed max ||X||_2 / ||X||_4 under normalised trace";
  Report rep;
  rep.add(faithful);
  rep.add(tracial);
  rep.add(mono);
  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------
// Curves and quadrature

inline std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  if (n < 2) throw PreconditionError("quadrature needs at least 2 points");
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = grid[k + 1] - grid[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

/// PSD h x h samples A_t on a grid with trapezoid weights.
struct OperatorValuedCurve {
  std::vector<double> grid;
  std::vector<Mat> samples;
  std::vector<double> weights;

  OperatorValuedCurve() = default;
  OperatorValuedCurve(std::vector<double> g, std::vector<Mat> a, double tol = kDefaultTol)
      : grid(std::move(g)), samples(std::move(a)) {
    if (grid.size() != samples.size()) throw StructuralError("curve grid/sample count mismatch");
    weights = trapezoid_weights(grid);
    const Eigen::Index h = samples.front().rows();
    for (const auto& s : samples) {
      if (s.rows() != h || s.cols() != h) throw StructuralError("curve samples differ in size");
      if (!is_positive(AlgebraElement{{s}}, tol)) throw PreconditionError("curve sample is not PSD");
    }
  }

  int h() const { return samples.empty() ? 0 : static_cast<int>(samples.front().rows()); }

  /// |||A|||_2 = || sum_k w_k A_k^* A_k ||^{1/2}.
  double l2_norm() const {
    Mat acc = Mat::Zero(h(), h());
    for (std::size_t k = 0; k < samples.size(); ++k)
      acc += weights[k] * samples[k].adjoint() * samples[k];
    return std::sqrt(linalg::spectral_norm(acc));
  }
};

inline OperatorValuedCurve random_curve(int h, const std::vector<double>& grid, Rng& rng) {
  std::vector<Mat> a;
  for (std::size_t k = 0; k < grid.size(); ++k) a.push_back(rng.psd(h, rng.uniform_int(1, h)) / h);
  return OperatorValuedCurve(grid, std::move(a));
}

inline OperatorValuedCurve constant_curve(const Mat& a, const std::vector<double>& grid) {
  return OperatorValuedCurve(grid, std::vector<Mat>(grid.size(), a));
}

/// The grid t_k = k ||W|| / (n - 1) shared by calculus and codomain.
inline std::vector<double> calculus_grid(const Mat& w, int n_grid) {
  return uniform_grid(n_grid, linalg::spectral_norm(w));
}

namespace detail {

inline void require_psd_core(const TraceAlgebra& ta, const Mat& w, double tol) {
  if (w.rows() != ta.m() || w.cols() != ta.m()) throw StructuralError("W has the wrong size");
  if (!is_positive(AlgebraElement{{w}}, tol)) throw PreconditionError("W must be positive semidefinite");
}

/// f_{t_k}(W) for every grid point.
inline std::vector<Mat> calculus_samples(const Mat& w, const std::vector<double>& grid, double tol) {
  std::vector<Mat> out;
  const AlgebraElement we{{w}};
  for (double t : grid) out.push_back(functional_calculus_min(we, t, tol).blocks[0]);
  return out;
}

inline void require_same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw StructuralError("curve grid does not match the calculus grid");
  const double s = std::max(1.0, std::abs(a.back()));
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > 1e-12 * s)
      throw StructuralError("curve grid does not match the calculus grid");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Maps

/// Phi(a, b) = b^* a on A = A0 = C, with C acting by right multiplication.
inline SesquiMap phi_right_mult(const CStarAlgebra& c) {
  auto dom = std::make_shared<const QuasiStarAlgebra>(block_model(c));
  MapFlags flags;
  flags.positivity = Certificate::BlockPsd;
  flags.invariant = true;
  flags.c_linear = true;
  flags.faithful = true;
  return SesquiMap::from_basis(
      dom, c, [&](int i, int j) { return c.basis_element(j).adjoint() * c.basis_element(i); },
      flags, right_multiplication_action(c));
}

/// Phi(A, B) = V^* B^* A V on M_m with V = P V P, P the projection onto the
/// first k coordinates. Values lie in the corner, realised inside
/// C = M_k (+) M_{m-k}, which acts on the right by block-diagonal matrices.
inline SesquiMap compression_map(const Mat& v, int k, double tol = kDefaultTol) {
  const int m = static_cast<int>(v.rows());
  if (v.cols() != m || k < 1 || k > m) throw StructuralError("compression needs square V and 1 <= k <= m");
  if ((v.bottomRows(m - k).norm() + v.rightCols(m - k).norm()) > tol * std::max(1.0, v.norm()))
    throw PreconditionError("V must lie in the corner P M_m P");
  auto dom = std::make_shared<const QuasiStarAlgebra>(full_matrix_model(m));
  const CStarAlgebra c = k < m ? CStarAlgebra({k, m - k}) : CStarAlgebra({m});
  MapFlags flags;
  flags.positivity = Certificate::Structural;
  flags.invariant = true;
  const QuasiStarAlgebra& q = *dom;
  return SesquiMap::from_basis(dom, c, [&](int i, int j) {
    const Mat full = v.adjoint() * q.basis(j).adjoint() * q.basis(i) * v;
    AlgebraElement out{{full.topLeftCorner(k, k)}};
    if (k < m) out.blocks.push_back(Mat::Zero(m - k, m - k));
    return out;
  }, flags, right_multiplication_action(c));
}

/// Phi(X, Y)(t_k) = rho(X f_{t_k}(W) Y^*) into the grid algebra.
inline SesquiMap schatten_trace_map(const TraceAlgebra& ta, const Mat& w, int n_grid,
                                    double tol = kDefaultTol) {
  detail::require_psd_core(ta, w, tol);
  const std::vector<double> grid = calculus_grid(w, n_grid);
  const std::vector<Mat> f = detail::calculus_samples(w, grid, tol);
  const CStarAlgebra c = make_grid_algebra(n_grid);
  const QuasiStarAlgebra& q = *ta.model();
  MapFlags flags;
  flags.positivity = Certificate::Structural;
  flags.invariant = true;
  return SesquiMap::from_basis(ta.model(), c, [&](int i, int j) {
    AlgebraElement out;
    const Mat ej = q.basis(j).adjoint();
    for (const Mat& fk : f) out.blocks.push_back(Mat::Constant(1, 1, ta.rho(q.basis(i) * fk * ej)));
    return out;
  }, flags);
}

/// Phi(X, Y) = sum_k w_k rho(X f_{t_k}(W) Y^*) A_{t_k} into M_h.
inline SesquiMap pettis_integral_map(const TraceAlgebra& ta, const Mat& w,
                                     const OperatorValuedCurve& curve, double tol = kDefaultTol) {
  detail::require_psd_core(ta, w, tol);
  const std::vector<double> grid = calculus_grid(w, static_cast<int>(curve.grid.size()));
  detail::require_same_grid(grid, curve.grid);
  const std::vector<Mat> f = detail::calculus_samples(w, grid, tol);
  const CStarAlgebra c({curve.h()});
  const QuasiStarAlgebra& q = *ta.model();
  MapFlags flags;
  flags.positivity = Certificate::Structural;
  flags.invariant = true;
  return SesquiMap::from_basis(ta.model(), c, [&](int i, int j) {
    Mat acc = Mat::Zero(curve.h(), curve.h());
    const Mat ej = q.basis(j).adjoint();
    for (std::size_t k = 0; k < f.size(); ++k)
      if (curve.weights[k] != 0.0) acc += curve.weights[k] * ta.rho(q.basis(i) * f[k] * ej) * curve.samples[k];
    return AlgebraElement{{acc}};
  }, flags);
}

/// Phi = sum_n x_n Phi_n x_n^*.
inline SesquiMap series_map(const std::vector<SesquiMap>& maps, const std::vector<AlgebraElement>& coeffs) {
  if (maps.empty()) throw StructuralError("series needs at least one term");
  if (maps.size() != coeffs.size()) throw StructuralError("one coefficient per term");
  const SesquiMap& first = maps.front();
  const CStarAlgebra& c = first.codomain();
  const int d = first.dim();
  for (std::size_t n = 0; n < maps.size(); ++n) {
    if (maps[n].dim() != d || !(maps[n].codomain() == c))
      throw StructuralError("series terms have different shapes");
    c.require(coeffs[n]);
  }
  std::vector<Mat> big;
  for (int k = 0; k < c.num_blocks(); ++k) {
    const int nk = c.block_dim(k);
    Mat acc = Mat::Zero(d * nk, d * nk);
    for (std::size_t n = 0; n < maps.size(); ++n) {
      const Mat lift = linalg::kron(Mat::Identity(d, d), coeffs[n].blocks[k]);
      acc += lift * maps[n].form().big(k) * lift.adjoint();
    }
    big.push_back(std::move(acc));
  }
  MapFlags flags;
  flags.positivity = Certificate::Structural;
  bool inv = true;
  for (const auto& m : maps) inv = inv && m.flags().invariant.value_or(false);
  if (inv) flags.invariant = true;
  return SesquiMap(first.domain_ptr(), c, GramForm(d, c.block_dims(), std::move(big)), flags);
}

/// omega(A)(t_k) = rho(A f_{t_k}(W)) into the grid algebra.
inline LinearMap omega_trace_functional(const TraceAlgebra& ta, const Mat& w, int n_grid,
                                        double tol = kDefaultTol) {
  detail::require_psd_core(ta, w, tol);
  const std::vector<double> grid = calculus_grid(w, n_grid);
  const std::vector<Mat> f = detail::calculus_samples(w, grid, tol);
  LinearMap out{ta.model(), make_grid_algebra(n_grid), {}};
  for (const Mat& e : ta.model()->basis()) {
    AlgebraElement v;
    for (const Mat& fk : f) v.blocks.push_back(Mat::Constant(1, 1, ta.rho(e * fk)));
    out.values.push_back(std::move(v));
  }
  return out;
}

/// Omega(X) = sum_k w_k rho(X f_{t_k}(W)) A_{t_k} into M_h.
inline LinearMap omega_pettis(const TraceAlgebra& ta, const Mat& w, const OperatorValuedCurve& curve,
                              double tol = kDefaultTol) {
  detail::require_psd_core(ta, w, tol);
  const std::vector<double> grid = calculus_grid(w, static_cast<int>(curve.grid.size()));
  detail::require_same_grid(grid, curve.grid);
  const std::vector<Mat> f = detail::calculus_samples(w, grid, tol);
  LinearMap out{ta.model(), CStarAlgebra({curve.h()}), {}};
  for (const Mat& e : ta.model()->basis()) {
    Mat acc = Mat::Zero(curve.h(), curve.h());
    for (std::size_t k = 0; k < f.size(); ++k)
      if (curve.weights[k] != 0.0) acc += curve.weights[k] * ta.rho(e * f[k]) * curve.samples[k];
    out.values.push_back(AlgebraElement{{acc}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bounds

/// The constant ||W||^{3/2} rho(I) |||A|||_2 bounding the Pettis map.
inline double pettis_bound_constant(const TraceAlgebra& ta, const Mat& w, const OperatorValuedCurve& curve) {
  return std::pow(linalg::spectral_norm(w), 1.5) * ta.rho_unit() * curve.l2_norm();
}

namespace detail {

struct BoundTracker {
  CheckResult result;
  double tol;
  explicit BoundTracker(std::string name, double t) : result{std::move(name)}, tol(t) {
    result.worst_ratio = 0.0;
  }
  template <class W>
  void add(double lhs, double rhs, double floor, W&& witness) {
    if (rhs > 0.0) result.worst_ratio = std::max(*result.worst_ratio, lhs / rhs);
    else if (lhs > floor) result.worst_ratio = INFINITY;
    if (lhs > rhs * (1.0 + tol) + floor && result.passed) {
      result.passed = false;
      result.witness = witness();
    }
  }
};

inline double abs_floor(double tol, double scale) { return tol * std::max(scale, 1e-300); }

}  // namespace detail

/// |Phi(X,Y)(t_{k+1}) - Phi(X,Y)(t_k)| <= rho(I) ||X||_p ||Y||_p |t_{k+1} - t_k|
/// for all adjacent grid pairs. For p = 2 also the sharper form without rho(I).
inline Report check_schatten_lipschitz(const TraceAlgebra& ta, const SesquiMap& phi,
                                       const std::vector<double>& grid, int n_samples, Rng& rng,
                                       double tol = kDefaultTol) {
  if (static_cast<int>(grid.size()) != phi.codomain().num_blocks())
    throw StructuralError("grid does not match codomain");
  detail::BoundTracker lip("schatten_lipschitz", tol), lip2("schatten_lipschitz_p2", tol);
  for (int s = 0; s < n_samples; ++s) {
    const Mat x = rng.ginibre(ta.m(), ta.m()), y = rng.ginibre(ta.m(), ta.m());
    const AlgebraElement v = phi(ta.element(x), ta.element(y));
    const double nn = ta.norm_p(x) * ta.norm_p(y);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double lhs = std::abs(v.blocks[k + 1](0, 0) - v.blocks[k](0, 0));
      const double dt = std::abs(grid[k + 1] - grid[k]);
      auto wit = [&] { return "sample " + std::to_string(s) + ", grid " + std::to_string(k); };
      const double floor = detail::abs_floor(tol, nn * std::max(1.0, grid.back()));
      lip.add(lhs, ta.rho_unit() * nn * dt, floor, wit);
      if (ta.p() == 2.0) lip2.add(lhs, nn * dt, floor, wit);
    }
  }
  Report rep;
  rep.add(lip.result);
  if (ta.p() == 2.0) rep.add(lip2.result);
  return rep;
}

/// Phi(Z, Z)(t) <= ||Z||_p^2 ||W|| rho(I).
inline CheckResult check_schatten_density_bound(const TraceAlgebra& ta, const Mat& w, const SesquiMap& phi,
                                                int n_samples, Rng& rng, double tol = kDefaultTol) {
  detail::BoundTracker b("schatten_density_bound", tol);
  const double nw = linalg::spectral_norm(w);
  for (int s = 0; s < n_samples; ++s) {
    const Mat z = rng.ginibre(ta.m(), ta.m());
    const QuasiElement ze = ta.element(z);
    const AlgebraElement v = phi(ze, ze);
    const double nz = ta.norm_p(z);
    const double rhs = nz * nz * nw * ta.rho_unit();
    b.add(op_norm(v), rhs, detail::abs_floor(tol, nz * nz * std::max(nw, 1.0)),
          [&] { return "sample " + std::to_string(s); });
  }
  return b.result;
}

/// ||Phi(X, Y)|| <= ||X||_p ||Y||_p ||W||^{3/2} rho(I) |||A|||_2 (asserted) and
/// the observed ratio against ||W|| rho(I) |||A|||_2 (recorded only).
inline Report check_pettis_bound(const TraceAlgebra& ta, const Mat& w, const OperatorValuedCurve& curve,
                                 const SesquiMap& phi, int n_samples, Rng& rng, double tol = kDefaultTol) {
  detail::BoundTracker b("pettis_bound", tol);
  CheckResult obs{"pettis_bound_observed"};
  obs.worst_ratio = 0.0;
  obs.note = "ratio against ||W|| rho(I) |||A|||_2; not asserted";
  const double k32 = pettis_bound_constant(ta, w, curve);
  const double k1 = linalg::spectral_norm(w) * ta.rho_unit() * curve.l2_norm();
  for (int s = 0; s < n_samples; ++s) {
    const Mat x = rng.ginibre(ta.m(), ta.m()), y = rng.ginibre(ta.m(), ta.m());
    const double lhs = op_norm(phi(ta.element(x), ta.element(y)));
    const double nn = ta.norm_p(x) * ta.norm_p(y);
    b.add(lhs, nn * k32, detail::abs_floor(tol, nn * std::max(k32, 1.0)),
          [&] { return "sample " + std::to_string(s); });
    if (k1 * nn > 0.0) obs.worst_ratio = std::max(*obs.worst_ratio, lhs / (k1 * nn));
  }
  Report rep;
  rep.add(b.result);
  rep.add(obs);
  return rep;
}

/// ||Phi(X, Y)|| <= M ||X||_p ||Y||_p sum ||x_n||^2, and the congruence-cone
/// property on samples.
inline Report check_series(const TraceAlgebra& ta, const std::vector<SesquiMap>& maps,
                           const std::vector<AlgebraElement>& coeffs, const SesquiMap& series,
                           double m_bound, int n_samples, Rng& rng, double tol = kDefaultTol) {
  double sx = 0.0;
  for (const auto& x : coeffs) sx += op_norm(x) * op_norm(x);
  detail::BoundTracker b("series_bound", tol);
  CheckResult cone{"series_positivity"};
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Mat x = rng.ginibre(ta.m(), ta.m()), y = rng.ginibre(ta.m(), ta.m());
    const QuasiElement xe = ta.element(x), ye = ta.element(y);
    const double nn = ta.norm_p(x) * ta.norm_p(y);
    b.add(op_norm(series(xe, ye)), m_bound * nn * sx, detail::abs_floor(tol, nn * std::max(1.0, m_bound * sx)),
          [&] { return "sample " + std::to_string(s); });
    bool terms_psd = true;
    for (const auto& m : maps) terms_psd = terms_psd && is_positive(m(xe, xe), tol);
    const AlgebraElement v = series(xe, xe);
    const double nv = op_norm(v);
    if (terms_psd && nv > 0.0) {
      const double me = -min_eigenvalue(v) / nv;
      worst = std::max(worst, me);
      if (me > tol && !cone.witness) cone.witness = "sample " + std::to_string(s);
    }
  }
  cone.residual = worst;
  cone.passed = worst <= tol;
  Report rep;
  rep.add(b.result);
  rep.add(cone);
  return rep;
}

/// ||omega(X^* Y)|| <= ||X||_p ||Y||_p ||W|| rho(I), and omega(c^* c) >= 0.
inline Report check_omega_bound(const TraceAlgebra& ta, const Mat& w, const LinearMap& omega,
                                int n_samples, Rng& rng, double tol = kDefaultTol) {
  detail::BoundTracker b("omega_bound", tol);
  CheckResult pos{"omega_positive"};
  const double nw = linalg::spectral_norm(w);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Mat x = rng.ginibre(ta.m(), ta.m()), y = rng.ginibre(ta.m(), ta.m());
    const double nn = ta.norm_p(x) * ta.norm_p(y);
    b.add(op_norm(omega(ta.element(x.adjoint() * y))), nn * nw * ta.rho_unit(),
          detail::abs_floor(tol, nn * std::max(nw, 1.0)), [&] { return "sample " + std::to_string(s); });
    const AlgebraElement v = omega(ta.element(x.adjoint() * x));
    const double nv = op_norm(v);
    if (nv > 0.0) {
      const double me = -min_eigenvalue(v) / nv;
      worst = std::max(worst, me);
      if (me > tol && !pos.witness) pos.witness = "sample " + std::to_string(s);
    }
  }
  pos.residual = worst;
  pos.passed = worst <= tol;
  Report rep;
  rep.add(b.result);
  rep.add(pos);
  return rep;
}

/// Bilinear form of the Omega estimate:
/// ||Omega(X^* Y)|| <= ||X||_p ||Y||_p ||W||^{3/2} rho(I) |||A|||_2.
inline Report check_omega_pettis_bound(const TraceAlgebra& ta, const Mat& w, const OperatorValuedCurve& curve,
                                       const LinearMap& omega, int n_samples, Rng& rng,
                                       double tol = kDefaultTol) {
  detail::BoundTracker b("omega_pettis_bound", tol);
  CheckResult pos{"omega_pettis_positive"};
  const double k32 = pettis_bound_constant(ta, w, curve);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Mat x = rng.ginibre(ta.m(), ta.m()), y = rng.ginibre(ta.m(), ta.m());
    const double nn = ta.norm_p(x) * ta.norm_p(y);
    b.add(op_norm(omega(ta.element(x.adjoint() * y))), nn * k32, detail::abs_floor(tol, nn * std::max(k32, 1.0)),
          [&] { return "sample " + std::to_string(s); });
    const AlgebraElement v = omega(ta.element(x.adjoint() * x));
    const double nv = op_norm(v);
    if (nv > 0.0) {
      const double me = -min_eigenvalue(v) / nv;
      worst = std::max(worst, me);
      if (me > tol && !pos.witness) pos.witness = "sample " + std::to_string(s);
    }
  }
  pos.residual = worst;
  pos.passed = worst <= tol;
  Report rep;
  rep.add(b.result);
  rep.add(pos);
  return rep;
}

/// A random PSD W with ||W|| = scale.
inline Mat random_psd_core(int m, Rng& rng, double scale = 1.0) {
  Mat w = rng.psd(m, m);
  const double n = linalg::spectral_norm(w);
  return n > 0.0 ? Mat(w * (scale / n)) : w;
}

}  // namespace gnslab
