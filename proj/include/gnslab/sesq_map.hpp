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

// Positive C*-valued sesquilinear maps on a quasi *-algebra, stored as a Gram
// tensor G[i][j] = Phi(e_i, e_j) with
//
//   Phi(sum a_i e_i, sum b_j e_j) = sum_ij a_i conj(b_j) G[i][j].
//
// Internally each codomain block k keeps the (d n_k) x (d n_k) matrix N_k
// whose (i, j) block is G[j][i]. Then Phi(a, b)_k = (b (x) I)^* N_k (a (x) I),
// hermitian symmetry is N_k = N_k^*, and N_k >= 0 certifies positivity.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gnslab/cstar.hpp"
#include "gnslab/errors.hpp"
#include "gnslab/linalg.hpp"
#include "gnslab/quasi_algebra.hpp"
#include "gnslab/random.hpp"
#include "gnslab/report.hpp"

namespace gnslab {

namespace detail {

inline std::string format_vec(const Vec& v) {
  std::ostringstream os;
  os << std::setprecision(6) << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v(i).real();
    if (v(i).imag() != 0.0) os << (v(i).imag() < 0 ? "-" : "+") << std::abs(v(i).imag()) << "i";
  }
  os << "]";
  return os.str();
}

inline std::string idx(const char* name, int i) { return std::string(name) + "=" + std::to_string(i); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Gram forms

/// A C-valued sesquilinear form on C^d given by its per-block N_k matrices.
class GramForm {
 public:
  GramForm() = default;
  GramForm(int dim, std::vector<int> block_dims, std::vector<Mat> big)
      : d_(dim), dims_(std::move(block_dims)), big_(std::move(big)) {
    if (d_ < 0) throw StructuralError("negative form dimension");
    if (big_.size() != dims_.size()) throw StructuralError("one Gram block per codomain block");
    for (std::size_t k = 0; k < dims_.size(); ++k)
      if (big_[k].rows() != d_ * dims_[k] || big_[k].cols() != d_ * dims_[k])
        throw StructuralError("Gram block has wrong size");
  }

  static GramForm zero(int dim, const std::vector<int>& block_dims) {
    std::vector<Mat> big;
    for (int n : block_dims) big.push_back(Mat::Zero(dim * n, dim * n));
    return GramForm(dim, block_dims, std::move(big));
  }

  int dim() const { return d_; }
  const std::vector<int>& block_dims() const { return dims_; }
  const std::vector<Mat>& big() const { return big_; }
  const Mat& big(int k) const { return big_.at(k); }

  /// <x, y>: linear in x, conjugate-linear in y.
  AlgebraElement eval(const Vec& x, const Vec& y) const {
    if (x.size() != d_ || y.size() != d_) throw StructuralError("vector length mismatch in form");
    AlgebraElement out;
    out.blocks.reserve(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const Eigen::Index n = dims_[k];
      const Mat& nk = big_[k];
      Mat sx = Mat::Zero(d_ * n, n);
      for (int i = 0; i < d_; ++i)
        if (x(i) != 0.0) sx.noalias() += x(i) * nk.middleCols(i * n, n);
      Mat r = Mat::Zero(n, n);
      for (int j = 0; j < d_; ++j)
        if (y(j) != 0.0) r.noalias() += std::conj(y(j)) * sx.middleRows(j * n, n);
      out.blocks.push_back(std::move(r));
    }
    return out;
  }

  /// G[i][j] = <e_i, e_j>.
  AlgebraElement entry(int i, int j) const {
    AlgebraElement out;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const Eigen::Index n = dims_[k];
      out.blocks.push_back(big_[k].block(j * n, i * n, n, n));
    }
    return out;
  }

  /// The form (x, y) -> <R x, R y> on C^{R.cols()}.
  GramForm congruence(const Mat& r) const {
    if (r.rows() != d_) throw StructuralError("congruence matrix has wrong row count");
    const int dd = static_cast<int>(r.cols());
    std::vector<Mat> big;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const Mat rk = linalg::kron(r, Mat::Identity(dims_[k], dims_[k]));
      big.push_back(rk.adjoint() * big_[k] * rk);
    }
    return GramForm(dd, dims_, std::move(big));
  }

  /// max_ij ||G[i][j]||.
  double scale() const {
    double s = 0.0;
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) s = std::max(s, op_norm(entry(i, j)));
    return s;
  }

  /// max_ij ||G[j][i] - G[i][j]^*||, with the worst pair.
  double symmetry_residual(int* wi = nullptr, int* wj = nullptr) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const Eigen::Index n = dims_[k];
      for (int i = 0; i < d_; ++i)
        for (int j = i; j < d_; ++j) {
          const Mat diff = big_[k].block(j * n, i * n, n, n) - big_[k].block(i * n, j * n, n, n).adjoint();
          const double r = linalg::spectral_norm(diff);
          if (r > worst) {
            worst = r;
            if (wi) *wi = i;
            if (wj) *wj = j;
          }
        }
    }
    return worst;
  }

  /// For theta(z) = sum_k tr(rho_k z_k): the d x d matrix H with
  /// theta(<x, y>) = y^* H x.
  Mat scalar_matrix(const std::vector<Mat>& densities) const {
    if (densities.size() != dims_.size()) throw StructuralError("density count mismatch");
    Mat h = Mat::Zero(d_, d_);
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const Eigen::Index n = dims_[k];
      for (int q = 0; q < d_; ++q)
        for (int p = 0; p < d_; ++p)
          h(q, p) += (densities[k] * big_[k].block(q * n, p * n, n, n)).trace();
    }
    return h;
  }

 private:
  int d_ = 0;
  std::vector<int> dims_;
  std::vector<Mat> big_;
};

// ---------------------------------------------------------------------------
// Right actions

/// Right action of a block algebra C on a matrix-realised A: a·x := a E(x),
/// with E given on the matrix units of C.
struct RightAction {
  CStarAlgebra acting;
  std::vector<Mat> embedding;

  Mat matrix(const AlgebraElement& x) const {
    const Vec c = acting.coordinates(x);
    if (embedding.empty()) throw StructuralError("empty action embedding");
    Mat out = Mat::Zero(embedding[0].rows(), embedding[0].cols());
    for (Eigen::Index s = 0; s < c.size(); ++s)
      if (c(s) != 0.0) out += c(s) * embedding[s];
    return out;
  }
  QuasiElement apply(const QuasiStarAlgebra& q, const QuasiElement& a, const AlgebraElement& x,
                     double tol = kDefaultTol) const {
    return q.element(q.matrix(a) * matrix(x), tol, "right action product");
  }
};

/// C acting on its own block-diagonal realisation by right multiplication.
inline RightAction right_multiplication_action(const CStarAlgebra& c) {
  RightAction act{c, {}};
  for (int s = 0; s < c.dimension(); ++s) act.embedding.push_back(c.embed(c.basis_element(s)));
  return act;
}

/// The embedding must be a unital *-homomorphism and keep A closed.
inline CheckResult validate_action(const QuasiStarAlgebra& q, const RightAction& act,
                                   double tol = kDefaultTol) {
  CheckResult c{"right_action"};
  const auto& c_alg = act.acting;
  if (static_cast<int>(act.embedding.size()) != c_alg.dimension()) {
    c.passed = false;
    c.witness = "embedding count does not match dim C";
    return c;
  }
  double worst = 0.0;
  for (const auto& e : act.embedding)
    if (e.rows() != q.ambient_dim() || e.cols() != q.ambient_dim()) {
      c.passed = false;
      c.witness = "embedding matrix has wrong size";
      return c;
    }
  const int dc = c_alg.dimension();
  for (int s = 0; s < dc && c.passed; ++s) {
    const AlgebraElement xs = c_alg.basis_element(s);
    const double ra = (act.matrix(xs.adjoint()) - act.matrix(xs).adjoint()).norm();
    worst = std::max(worst, ra);
    for (int t = 0; t < dc; ++t) {
      const AlgebraElement xt = c_alg.basis_element(t);
      const double r = (act.matrix(xs * xt) - act.matrix(xs) * act.matrix(xt)).norm();
      worst = std::max(worst, r);
      if (r > tol && !c.witness) c.witness = detail::idx("x", s) + ", " + detail::idx("y", t);
    }
    for (int i = 0; i < q.dim(); ++i) {
      const double r = q.expand(q.basis(i) * act.embedding[s]).residual;
      worst = std::max(worst, r);
      if (r > tol && !c.witness) c.witness = detail::idx("a", i) + ", " + detail::idx("x", s);
    }
  }
  const double ru = (act.matrix(c_alg.unit()) - Mat::Identity(q.ambient_dim(), q.ambient_dim())).norm();
  worst = std::max(worst, ru);
  if (ru > tol && !c.witness) c.witness = "unit not mapped to identity";
  c.residual = worst;
  c.passed = c.passed && worst <= tol;
  return c;
}

// ---------------------------------------------------------------------------
// Maps

enum class Certificate { Unknown, BlockPsd, Sampled, Structural };

inline std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::BlockPsd: return "block-psd";
    case Certificate::Sampled: return "sampled";
    case Certificate::Structural: return "structural";
    default: return "unknown";
  }
}

inline Certificate certificate_from_string(const std::string& s) {
  if (s == "block-psd") return Certificate::BlockPsd;
  if (s == "sampled") return Certificate::Sampled;
  if (s == "structural") return Certificate::Structural;
  if (s == "unknown") return Certificate::Unknown;
  throw ParseError("unknown positivity certificate '" + s + "'");
}

struct MapFlags {
  Certificate positivity = Certificate::Unknown;
  std::optional<bool> invariant;
  std::optional<bool> c_linear;
  std::optional<bool> faithful;
  std::vector<double> admissible_constants;
};

class SesquiMap {
 public:
  SesquiMap(QuasiAlgebraPtr domain, CStarAlgebra codomain, GramForm form, MapFlags flags = {},
            std::optional<RightAction> action = std::nullopt)
      : domain_(std::move(domain)),
        codomain_(std::move(codomain)),
        form_(std::move(form)),
        flags_(std::move(flags)),
        action_(std::move(action)) {
    if (!domain_) throw StructuralError("map needs a domain");
    if (form_.dim() != domain_->dim()) throw StructuralError("Gram size does not match dim A");
    if (form_.block_dims() != codomain_.block_dims())
      throw StructuralError("Gram blocks do not match codomain");
    if (action_) {
      if (static_cast<int>(action_->embedding.size()) != action_->acting.dimension())
        throw StructuralError("right action embedding count");
      for (const auto& e : action_->embedding)
        if (e.rows() != domain_->ambient_dim() || e.cols() != domain_->ambient_dim())
          throw StructuralError("right action embedding size");
    }
  }

  /// f(i, j) must return Phi(e_i, e_j).
  template <class F>
  static SesquiMap from_basis(QuasiAlgebraPtr domain, const CStarAlgebra& codomain, F&& f,
                              MapFlags flags = {}, std::optional<RightAction> action = std::nullopt) {
    const int d = domain->dim();
    std::vector<Mat> big;
    for (int n : codomain.block_dims()) big.push_back(Mat::Zero(d * n, d * n));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const AlgebraElement g = f(i, j);
        codomain.require(g);
        for (int k = 0; k < codomain.num_blocks(); ++k) {
          const int n = codomain.block_dim(k);
          big[k].block(j * n, i * n, n, n) = g.blocks[k];
        }
      }
    GramForm form(d, codomain.block_dims(), std::move(big));
    return SesquiMap(std::move(domain), codomain, std::move(form), std::move(flags),
                     std::move(action));
  }

  static SesquiMap from_gram(QuasiAlgebraPtr domain, const CStarAlgebra& codomain,
                             const std::vector<std::vector<AlgebraElement>>& g, MapFlags flags = {},
                             std::optional<RightAction> action = std::nullopt) {
    const int d = domain->dim();
    if (static_cast<int>(g.size()) != d) throw StructuralError("Gram tensor row count");
    for (const auto& row : g)
      if (static_cast<int>(row.size()) != d) throw StructuralError("Gram tensor column count");
    return from_basis(
        std::move(domain), codomain, [&](int i, int j) { return g[i][j]; }, std::move(flags),
        std::move(action));
  }

  const QuasiStarAlgebra& domain() const { return *domain_; }
  const QuasiAlgebraPtr& domain_ptr() const { return domain_; }
  const CStarAlgebra& codomain() const { return codomain_; }
  const GramForm& form() const { return form_; }
  const MapFlags& flags() const { return flags_; }
  MapFlags& flags() { return flags_; }
  const std::optional<RightAction>& action() const { return action_; }
  int dim() const { return form_.dim(); }

  AlgebraElement operator()(const QuasiElement& a, const QuasiElement& b) const {
    domain_->check_length(a);
    domain_->check_length(b);
    return form_.eval(a.coeffs, b.coeffs);
  }
  AlgebraElement entry(int i, int j) const { return form_.entry(i, j); }

  std::vector<std::vector<AlgebraElement>> gram() const {
    std::vector<std::vector<AlgebraElement>> g(dim());
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) g[i].push_back(entry(i, j));
    return g;
  }

  double scale() const { return form_.scale(); }

 private:
  QuasiAlgebraPtr domain_;
  CStarAlgebra codomain_;
  GramForm form_;
  MapFlags flags_;
  std::optional<RightAction> action_;
};

inline AlgebraElement eval(const SesquiMap& phi, const QuasiElement& a, const QuasiElement& b) {
  return phi(a, b);
}

/// A C-valued linear map on A given by its values on the basis.
struct LinearMap {
  QuasiAlgebraPtr domain;
  CStarAlgebra codomain;
  std::vector<AlgebraElement> values;

  AlgebraElement operator()(const QuasiElement& a) const {
    domain->check_length(a);
    AlgebraElement out = codomain.zero();
    for (int i = 0; i < domain->dim(); ++i)
      if (a.coeffs(i) != 0.0) out = out + a.coeffs(i) * values.at(i);
    return out;
  }
  /// Phi(a, b) = omega(b^* a); needs A closed under products.
  SesquiMap induced_map(double tol = kDefaultTol, MapFlags flags = {}) const {
    const QuasiStarAlgebra& q = *domain;
    return SesquiMap::from_basis(
        domain, codomain,
        [&](int i, int j) {
          return (*this)(q.element(q.basis(j).adjoint() * q.basis(i), tol, "product b*a"));
        },
        std::move(flags));
  }
};

// ---------------------------------------------------------------------------
// Positivity and inequalities

struct PositivityResult {
  bool positive = true;
  Certificate mode = Certificate::Unknown;
  double worst_min_eig = 0.0;  // most negative relative eigenvalue seen
  std::optional<Vec> witness;

  CheckResult as_check() const {
    CheckResult c{"positivity"};
    c.passed = positive;
    c.residual = std::max(0.0, -worst_min_eig);
    c.note = to_string(mode);
    if (witness) c.witness = "c = " + detail::format_vec(*witness);
    return c;
  }
};

enum class PositivityMode { Certificate, Sampled };

/// Certificate: N_k >= 0 for all k (sufficient). On failure, or in sampled
/// mode, tests Phi(c, c) >= 0 for basis vectors and n_samples random c.
inline PositivityResult check_positivity(const SesquiMap& phi, PositivityMode mode,
                                         int n_samples, Rng& rng, double tol = kDefaultTol) {
  PositivityResult out;
  if (mode == PositivityMode::Certificate) {
    double worst = 0.0, scale = 0.0;
    for (const auto& nk : phi.form().big()) {
      scale = std::max(scale, linalg::spectral_norm(nk));
      const RVec ev = linalg::hermitian_eigenvalues(nk);
      if (ev.size()) worst = std::min(worst, ev(0));
    }
    const double sym = phi.form().symmetry_residual();
    if (scale == 0.0 || (worst >= -tol * scale && sym <= tol * scale)) {
      out.mode = Certificate::BlockPsd;
      out.worst_min_eig = scale > 0 ? worst / scale : 0.0;
      return out;
    }
  }
  out.mode = Certificate::Sampled;
  const int d = phi.dim();
  const QuasiStarAlgebra& q = phi.domain();
  for (int s = 0; s < d + n_samples; ++s) {
    const QuasiElement a = s < d ? q.basis_element(s) : q.random_element(rng);
    const AlgebraElement v = phi(a, a);
    const double nv = op_norm(v);
    if (nv == 0.0) continue;
    const double rel = min_eigenvalue(v) / nv;
    out.worst_min_eig = std::min(out.worst_min_eig, rel);
    if (!is_positive(v, tol) && out.positive) {
      out.positive = false;
      out.witness = a.coeffs;
    }
  }
  return out;
}

inline PositivityResult check_positivity(const SesquiMap& phi, PositivityMode mode = PositivityMode::Certificate,
                                         int n_samples = 10000, std::uint64_t seed = 0,
                                         double tol = kDefaultTol) {
  Rng rng(seed);
  return check_positivity(phi, mode, n_samples, rng, tol);
}

/// The three norms of one Cauchy-Schwarz test.
struct CsSample {
  double ab = 0.0, aa = 0.0, bb = 0.0;
};

inline CsSample cs_sample(const SesquiMap& phi, const Vec& a, const Vec& b) {
  const GramForm& f = phi.form();
  return {op_norm(f.eval(a, b)), op_norm(f.eval(a, a)), op_norm(f.eval(b, b))};
}

namespace detail {
struct RatioTracker {
  CheckResult result;
  double bound;
  double tol;
  template <class W>
  void add(double lhs, double rhs, double floor, W&& witness) {
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > floor ? INFINITY : 0.0);
    if (!result.worst_ratio || ratio > *result.worst_ratio) result.worst_ratio = ratio;
    if (lhs > bound * rhs * (1.0 + tol) + floor && result.passed) {
      result.passed = false;
      result.witness = witness();
    }
  }
};
}  // namespace detail

/// ||Phi(a,b)||^2 <= 4 ||Phi(a,a)|| ||Phi(b,b)|| always; the factor-1 form on
/// commutative codomains and for C-linear maps.
inline Report check_cs(const SesquiMap& phi, int n_samples, Rng& rng, double tol = kDefaultTol,
                       std::optional<bool> c_linear = std::nullopt) {
  const QuasiStarAlgebra& q = phi.domain();
  const double scale = phi.scale();
  const bool commutative = phi.codomain().commutative();
  const bool clin = c_linear.value_or(phi.flags().c_linear.value_or(false));
  detail::RatioTracker f2{{"cs_factor2"}, 4.0, tol};
  detail::RatioTracker f1c{{"cs_factor1_commutative"}, 1.0, tol};
  detail::RatioTracker f1m{{"cs_factor1_c_linear"}, 1.0, tol};
  f2.result.worst_ratio = f1c.result.worst_ratio = f1m.result.worst_ratio = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Vec a = q.random_element(rng).coeffs;
    const Vec b = s == 0 ? a : q.random_element(rng).coeffs;
    const CsSample cs = cs_sample(phi, a, b);
    const double lhs = cs.ab * cs.ab, rhs = cs.aa * cs.bb;
    const double floor = tol * scale * scale * a.squaredNorm() * b.squaredNorm();
    auto wit = [&] { return "a = " + detail::format_vec(a) + ", b = " + detail::format_vec(b); };
    f2.add(lhs, rhs, floor, wit);
    if (commutative) f1c.add(lhs, rhs, floor, wit);
    if (clin) f1m.add(lhs, rhs, floor, wit);
  }
  Report rep;
  rep.add(f2.result);
  if (commutative) rep.add(f1c.result);
  if (clin) rep.add(f1m.result);
  return rep;
}

/// 4 ||omega(e)|| ||omega(a*a)|| >= ||omega(a)||^2 and ||omega(a)|| = ||omega(a*)||.
inline Report stinespring_ineq(const LinearMap& omega, int n_samples, Rng& rng,
                               double tol = kDefaultTol) {
  const QuasiStarAlgebra& q = *omega.domain;
  if (!q.unital()) throw PreconditionError("Stinespring inequality needs a unit");
  const double we = op_norm(omega(q.unit()));
  double scale = 0.0;
  for (const auto& v : omega.values) scale = std::max(scale, op_norm(v));
  detail::RatioTracker ineq{{"stinespring"}, 4.0, tol};
  ineq.result.worst_ratio = 0.0;
  CheckResult herm{"stinespring_adjoint_norm"};
  double worst_h = 0.0;
  for (int s = 0; s < q.dim() + n_samples; ++s) {
    const QuasiElement a = s < q.dim() ? q.basis_element(s) : q.random_element(rng);
    const Mat am = q.matrix(a);
    const AlgebraElement wa = omega(a);
    const AlgebraElement waa = omega(q.element(am.adjoint() * am, tol, "a*a"));
    if (!is_positive(waa, tol))
      throw PreconditionError("omega(a*a) is not positive for a = " + detail::format_vec(a.coeffs));
    const double na = op_norm(wa);
    const double floor = tol * scale * scale * a.coeffs.squaredNorm() * a.coeffs.squaredNorm();
    ineq.add(na * na, we * op_norm(waa), floor,
             [&] { return "a = " + detail::format_vec(a.coeffs); });
    const double nstar = op_norm(omega(involution(q, a, tol)));
    const double r = std::abs(nstar - na) / std::max(1.0, std::max(na, scale * a.coeffs.norm()));
    if (r > worst_h) worst_h = r;
    if (r > tol && !herm.witness) herm.witness = "a = " + detail::format_vec(a.coeffs);
  }
  herm.residual = worst_h;
  herm.passed = worst_h <= tol;
  Report rep;
  rep.add(ineq.result);
  rep.add(herm);
  return rep;
}

// ---------------------------------------------------------------------------
// Null space and quotient

struct QuotientSpace {
  Mat null_basis;  // d x n0, orthonormal
  Mat rep_basis;   // d x r, orthonormal complement
  GramForm inner;  // <Lambda(.), Lambda(.)> in rep coordinates

  int rep_dim() const { return static_cast<int>(rep_basis.cols()); }
  int null_dim() const { return static_cast<int>(null_basis.cols()); }

  /// Rep coordinates of Lambda(a).
  Vec lambda(const QuasiElement& a) const { return rep_basis.adjoint() * a.coeffs; }
  Vec lambda(const Vec& a) const { return rep_basis.adjoint() * a; }
};

/// Matrix of c -> (sum_i c_i G[i][j])_j with all blocks of all j stacked.
inline Mat stacked_gram(const SesquiMap& phi) {
  const int d = phi.dim();
  const auto& dims = phi.codomain().block_dims();
  int per = 0;
  for (int n : dims) per += n * n;
  Mat s = Mat::Zero(static_cast<Eigen::Index>(d) * per, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const AlgebraElement g = phi.entry(i, j);
      Eigen::Index row = static_cast<Eigen::Index>(j) * per;
      for (const auto& b : g.blocks) {
        s.block(row, i, b.size(), 1) = linalg::vec(b);
        row += b.size();
      }
    }
  return s;
}

inline QuotientSpace null_space(const SesquiMap& phi, double tol = kDefaultTol,
                                const std::optional<Mat>& rotation = std::nullopt) {
  QuotientSpace qs;
  const Mat s = stacked_gram(phi);
  const linalg::KernelSplit ks = linalg::kernel_split(s, tol);
  qs.null_basis = ks.kernel;
  qs.rep_basis = ks.complement;
  if (rotation) {
    if (rotation->rows() != qs.rep_dim() || rotation->cols() != qs.rep_dim())
      throw StructuralError("rotation size does not match rep dimension");
    qs.rep_basis = qs.rep_basis * (*rotation);
  }
  const double smax = ks.singular.size() ? ks.singular(0) : 0.0;
  for (int c = 0; c < qs.null_dim(); ++c) {
    const double r = (s * qs.null_basis.col(c)).norm();
    if (r > std::max(tol * smax, 1e-300) * 10.0 + 1e-14 * smax)
      throw InternalInconsistency("null vector fails Phi(v, e_j) = 0 (residual " +
                                  std::to_string(r) + ")");
  }
  qs.inner = phi.form().congruence(qs.rep_basis);
  return qs;
}

inline double quasi_norm(const QuotientSpace& qs, const Vec& a) {
  const Vec x = qs.lambda(a);
  return std::sqrt(op_norm(qs.inner.eval(x, x)));
}
inline double quasi_norm(const QuotientSpace& qs, const QuasiElement& a) {
  return quasi_norm(qs, a.coeffs);
}
/// Quasi-norm of a rep-coordinate vector.
inline double rep_norm(const GramForm& inner, const Vec& x) {
  return std::sqrt(op_norm(inner.eval(x, x)));
}

/// Homogeneity and ||a + b|| <= bound (||a|| + ||b||) with bound sqrt(2).
inline Report quasi_triangle_check(const QuotientSpace& qs, int n_samples, Rng& rng,
                                   double tol = kDefaultTol, double bound = std::sqrt(2.0)) {
  const int d = static_cast<int>(qs.rep_basis.rows());
  CheckResult homo{"quasi_norm_homogeneity"}, tri{"quasi_triangle"};
  tri.worst_ratio = 0.0;
  double worst_h = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Vec a = rng.complex_vector(d), b = rng.complex_vector(d);
    const cplx alpha = rng.complex_normal();
    const double na = quasi_norm(qs, a), nb = quasi_norm(qs, b);
    const double hres = std::abs(quasi_norm(qs, Vec(alpha * a)) - std::abs(alpha) * na) /
                        std::max(1.0, std::abs(alpha) * na);
    if (hres > worst_h) worst_h = hres;
    if (hres > tol && !homo.witness) homo.witness = "a = " + detail::format_vec(a);
    const double nab = quasi_norm(qs, Vec(a + b));
    const double den = na + nb;
    if (den <= 0.0) continue;
    const double ratio = nab / den;
    if (ratio > *tri.worst_ratio) tri.worst_ratio = ratio;
    if (ratio > bound * (1.0 + tol) && tri.passed) {
      tri.passed = false;
      tri.witness = "a = " + detail::format_vec(a) + ", b = " + detail::format_vec(b);
    }
  }
  homo.residual = worst_h;
  homo.passed = worst_h <= tol;
  Report rep;
  rep.add(homo);
  rep.add(tri);
  return rep;
}

// ---------------------------------------------------------------------------
// Invariance, module structure, admissibility, density

/// Phi(ac, d) = Phi(c, a*d) for basis a in A and c, d in A0.
inline CheckResult check_invariance(const SesquiMap& phi, double tol = kDefaultTol) {
  const QuasiStarAlgebra& q = phi.domain();
  CheckResult res{"invariance"};
  const double scale = std::max(phi.scale(), 1e-300);
  double worst = 0.0;
  for (int i = 0; i < q.dim(); ++i) {
    const QuasiElement a = q.basis_element(i);
    const QuasiElement as = involution(q, a, tol);
    for (int j = 0; j < q.a0_dim(); ++j) {
      const QuasiElement c = q.a0_basis_element(j);
      const QuasiElement ac = mod_mult(q, a, c, Side::Right, tol);
      for (int l = 0; l < q.a0_dim(); ++l) {
        const QuasiElement dd = q.a0_basis_element(l);
        const QuasiElement asd = mod_mult(q, as, dd, Side::Right, tol);
        const double r = op_norm(phi(ac, dd) - phi(c, asd)) /
                         (scale * std::max({1.0, ac.coeffs.norm(), asd.coeffs.norm()}));
        if (r > worst) worst = r;
        if (r > tol && !res.witness)
          res.witness = detail::idx("a", i) + ", " + detail::idx("c", j) + ", " + detail::idx("d", l);
      }
    }
  }
  res.residual = worst;
  res.passed = worst <= tol;
  return res;
}

/// Phi(a x, b) = Phi(a, b) x on basis triples; if so, the module
/// Cauchy-Schwarz inequality Phi(a,b) Phi(b,a) <= ||Phi(a,a)|| Phi(b,b).
inline Report check_c_linearity(const SesquiMap& phi, const RightAction* action, int n_samples,
                                Rng& rng, double tol = kDefaultTol) {
  if (action == nullptr) action = phi.action() ? &*phi.action() : nullptr;
  if (action == nullptr) throw PreconditionError("no right action declared");
  const QuasiStarAlgebra& q = phi.domain();
  const CStarAlgebra& c = action->acting;
  if (!(c == phi.codomain())) throw PreconditionError("acting algebra differs from codomain");
  Report rep;
  CheckResult act = validate_action(q, *action, tol);
  const bool act_ok = act.passed;
  rep.add(act);
  CheckResult lin{"c_linearity"};
  if (!act_ok) {
    lin.passed = false;
    lin.witness = "right action invalid";
    rep.add(lin);
    return rep;
  }
  const double scale = std::max(phi.scale(), 1e-300);
  double worst = 0.0;
  for (int s = 0; s < c.dimension(); ++s) {
    const AlgebraElement x = c.basis_element(s);
    for (int i = 0; i < q.dim(); ++i) {
      const QuasiElement ax = action->apply(q, q.basis_element(i), x, tol);
      for (int j = 0; j < q.dim(); ++j) {
        const QuasiElement b = q.basis_element(j);
        const double r = op_norm(phi(ax, b) - phi(q.basis_element(i), b) * x) /
                         (scale * std::max(1.0, ax.coeffs.norm()));
        if (r > worst) worst = r;
        if (r > tol && !lin.witness)
          lin.witness = detail::idx("a", i) + ", " + detail::idx("b", j) + ", " + detail::idx("x", s);
      }
    }
  }
  lin.residual = worst;
  lin.passed = worst <= tol;
  rep.add(lin);
  if (lin.passed) {
    CheckResult mcs{"module_cs"};
    double worst_m = 0.0;
    for (int s = 0; s < n_samples; ++s) {
      const QuasiElement a = q.random_element(rng), b = q.random_element(rng);
      const AlgebraElement pab = phi(a, b), pba = phi(b, a);
      const AlgebraElement diff = op_norm(phi(a, a)) * phi(b, b) - pab * pba;
      const double nd = std::max(op_norm(pab * pba), scale * a.coeffs.squaredNorm() * scale * b.coeffs.squaredNorm());
      const double me = min_eigenvalue(diff) / std::max(nd, 1e-300);
      if (-me > worst_m) worst_m = -me;
      if (-me > tol && !mcs.witness)
        mcs.witness = "a = " + detail::format_vec(a.coeffs) + ", b = " + detail::format_vec(b.coeffs);
    }
    mcs.residual = worst_m;
    mcs.passed = worst_m <= tol;
    rep.add(mcs);
  }
  return rep;
}

/// ||Phi(ax, ax)|| <= ||Phi(a,a)|| ||x||^2 on samples, then invariance of N_Phi
/// under the action and the quotient bound ||Lambda(ax)|| <= ||Lambda(a)|| ||x||.
inline Report check_module_bound(const SesquiMap& phi, const RightAction* action, int n_samples,
                                 Rng& rng, double tol = kDefaultTol) {
  if (action == nullptr) action = phi.action() ? &*phi.action() : nullptr;
  if (action == nullptr) throw PreconditionError("no right action declared");
  const QuasiStarAlgebra& q = phi.domain();
  const CStarAlgebra& c = action->acting;
  Report rep;
  CheckResult act = validate_action(q, *action, tol);
  rep.add(act);
  CheckResult bound{"module_bound"};
  if (!act.passed) {
    bound.passed = false;
    bound.witness = "right action invalid";
    rep.add(bound);
    return rep;
  }
  const double scale = std::max(phi.scale(), 1e-300);
  bound.worst_ratio = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const QuasiElement a = q.random_element(rng);
    const AlgebraElement x = s % 4 == 0 ? c.unit() : c.random_element(rng);
    const QuasiElement ax = action->apply(q, a, x, tol);
    const double lhs = op_norm(phi(ax, ax));
    const double nx = op_norm(x);
    const double rhs = op_norm(phi(a, a)) * nx * nx;
    const double floor = tol * scale * a.coeffs.squaredNorm() * nx * nx;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > floor ? INFINITY : 0.0);
    if (ratio > *bound.worst_ratio) bound.worst_ratio = ratio;
    if (lhs > rhs * (1.0 + tol) + floor && bound.passed) {
      bound.passed = false;
      bound.witness = "a = " + detail::format_vec(a.coeffs) + ", x = " +
                      detail::format_vec(c.coordinates(x));
    }
  }
  rep.add(bound);
  if (bound.passed) {
    const QuotientSpace qs = null_space(phi, tol);
    CheckResult inv{"null_space_action_invariant"};
    double worst = 0.0;
    for (int v = 0; v < qs.null_dim(); ++v)
      for (int s = 0; s < c.dimension(); ++s) {
        const QuasiElement vx = action->apply(q, {qs.null_basis.col(v)}, c.basis_element(s), tol);
        const double r = op_norm(phi(vx, vx)) / scale;
        worst = std::max(worst, r);
        if (r > tol && !inv.witness) inv.witness = detail::idx("null", v) + ", " + detail::idx("x", s);
      }
    inv.residual = worst;
    inv.passed = worst <= tol;
    rep.add(inv);
    CheckResult qb{"quotient_action_bound"};
    qb.worst_ratio = 0.0;
    for (int s = 0; s < n_samples; ++s) {
      const QuasiElement a = q.random_element(rng);
      const AlgebraElement x = c.random_element(rng);
      const double lhs = quasi_norm(qs, action->apply(q, a, x, tol));
      const double rhs = quasi_norm(qs, a) * op_norm(x);
      const double floor = std::sqrt(tol * scale) * a.coeffs.norm() * op_norm(x);
      const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > floor ? INFINITY : 0.0);
      if (ratio > *qb.worst_ratio) qb.worst_ratio = ratio;
      if (lhs > rhs * (1.0 + tol) + floor && qb.passed) {
        qb.passed = false;
        qb.witness = "a = " + detail::format_vec(a.coeffs);
      }
    }
    rep.add(qb);
  }
  return rep;
}

struct Admissibility {
  std::vector<double> gamma;  // per basis element of A
  CheckResult result{"admissibility"};
};

/// gamma_a = sup_c ||Phi(ac, ac)|| / ||Phi(c, c)|| over c in A0 (A0 basis,
/// generalized eigenvectors of the trace form, and n_samples random c).
inline Admissibility check_admissibility(const SesquiMap& phi, int n_samples, Rng& rng,
                                         double tol = kDefaultTol) {
  const QuasiStarAlgebra& q = phi.domain();
  Admissibility out;
  const int k = q.a0_dim();
  const double scale = std::max(phi.scale(), 1e-300);
  const Mat sel = q.a0_selector();
  std::vector<Vec> cands;
  for (int j = 0; j < k; ++j) cands.push_back(Vec::Unit(k, j));
  for (int s = 0; s < n_samples; ++s) cands.push_back(rng.complex_vector(k));
  // trace form restricted to A0
  std::vector<Mat> traces;
  for (int n : phi.codomain().block_dims()) traces.push_back(Mat::Identity(n, n));
  const Mat h = phi.form().scalar_matrix(traces);
  const Mat h0 = sel.adjoint() * h * sel;
  out.gamma.assign(q.dim(), 0.0);
  double worst = 0.0;
  for (int i = 0; i < q.dim(); ++i) {
    const QuasiElement a = q.basis_element(i);
    // columns: coefficients of a x_j
    Mat ax(q.dim(), k);
    for (int j = 0; j < k; ++j) ax.col(j) = mod_mult(q, a, q.a0_basis_element(j), Side::Right, tol).coeffs;
    std::vector<Vec> local = cands;
    if (k > 0) {
      const Mat ha = ax.adjoint() * h * ax;
      const Mat pinv = linalg::pseudo_inverse(h0, tol);
      Eigen::ComplexEigenSolver<Mat> es(pinv * ha);
      for (Eigen::Index c = 0; c < es.eigenvectors().cols(); ++c) local.push_back(es.eigenvectors().col(c));
    }
    double g = 0.0;
    for (const Vec& cc : local) {
      const Vec cvec = sel * cc;
      const double den = op_norm(phi.form().eval(cvec, cvec));
      const Vec acv = ax * cc;
      const double num = op_norm(phi.form().eval(acv, acv));
      if (den <= tol * scale * cvec.squaredNorm()) {
        if (num > std::sqrt(tol) * scale * acv.squaredNorm()) g = INFINITY;
        continue;
      }
      g = std::max(g, num / den);
    }
    out.gamma[i] = g;
    worst = std::max(worst, g);
  }
  out.result.worst_ratio = worst;
  out.result.note = "max gamma over basis";
  const auto& declared = phi.flags().admissible_constants;
  if (!declared.empty() && static_cast<int>(declared.size()) != q.dim())
    throw StructuralError("admissible_constants needs one entry per basis element");
  for (int i = 0; i < q.dim() && out.result.passed; ++i) {
    if (!std::isfinite(out.gamma[i])) {
      out.result.passed = false;
      out.result.witness = detail::idx("a", i) + ", Phi(c, c) = 0 but Phi(ac, ac) != 0";
    } else if (!declared.empty() && out.gamma[i] > declared[i] * (1.0 + tol) + tol) {
      out.result.passed = false;
      out.result.witness = detail::idx("a", i) + ", gamma " + std::to_string(out.gamma[i]) + " > declared " +
                           std::to_string(declared[i]);
    }
  }
  if (!declared.empty()) out.result.note += "; compared with declared constants";
  return out;
}

/// dim Lambda(span A0) = dim Lambda(span A).
inline bool density_check(const SesquiMap& phi, const QuotientSpace& qs, double tol = kDefaultTol) {
  if (qs.rep_dim() == 0) return true;
  const Mat c = qs.rep_basis.adjoint() * phi.domain().a0_selector();
  return linalg::numerical_rank(c, tol) == qs.rep_dim() &&
         linalg::numerical_rank(c, tol) == linalg::numerical_rank(qs.rep_basis, tol);
}

inline CheckResult density_result(const SesquiMap& phi, const QuotientSpace& qs,
                                  double tol = kDefaultTol) {
  CheckResult c{"density"};
  const Mat m = qs.rep_basis.adjoint() * phi.domain().a0_selector();
  const int r0 = qs.rep_dim() ? linalg::numerical_rank(m, tol) : 0;
  c.passed = r0 == qs.rep_dim();
  c.note = "rank Lambda(A0) = " + std::to_string(r0) + ", rank Lambda(A) = " +
           std::to_string(qs.rep_dim());
  if (!c.passed) c.witness = c.note;
  return c;
}

// ---------------------------------------------------------------------------
// Random maps

struct RandomMapOptions {
  int max_dim = 6;
  int max_block = 3;
  int max_blocks = 3;
  bool commutative = false;
  bool allow_rank_deficient = true;
};

inline CStarAlgebra random_codomain(Rng& rng, int max_blocks, int max_block, bool commutative) {
  const int nb = rng.uniform_int(1, max_blocks);
  std::vector<int> dims;
  for (int k = 0; k < nb; ++k) dims.push_back(commutative ? 1 : rng.uniform_int(1, max_block));
  return CStarAlgebra(dims);
}

/// Block-Gram construction N_k = V_k^* V_k on diagonal_model(d): positive by
/// certificate, generally neither invariant nor C-linear.
inline SesquiMap random_block_gram_map(Rng& rng, const RandomMapOptions& opt = {}) {
  const int d = rng.uniform_int(1, opt.max_dim);
  const CStarAlgebra c = random_codomain(rng, opt.max_blocks, opt.max_block, opt.commutative);
  std::vector<Mat> big;
  for (int n : c.block_dims()) {
    const int full = d * n;
    const int rank = opt.allow_rank_deficient ? rng.uniform_int(1, full) : full;
    const Mat v = rng.ginibre(rank, full);
    Mat nk = v.adjoint() * v;
    nk = 0.5 * (nk + nk.adjoint());
    big.push_back(nk);
  }
  MapFlags flags;
  flags.positivity = Certificate::BlockPsd;
  auto dom = std::make_shared<const QuasiStarAlgebra>(diagonal_model(d));
  return SesquiMap(dom, c, GramForm(d, c.block_dims(), std::move(big)), flags);
}

/// Phi(a, b) = sum_r K_r^* b^* a K_r (one K_r per codomain block and term) on
/// a model with A = A0 closed under products. Invariant and positive.
inline SesquiMap random_invariant_map(QuasiAlgebraPtr q, const CStarAlgebra& codomain, Rng& rng,
                                      int n_terms = 2, int max_rank = -1) {
  const int m = q->ambient_dim();
  std::vector<std::vector<Mat>> kraus(codomain.num_blocks());
  for (int k = 0; k < codomain.num_blocks(); ++k)
    for (int r = 0; r < n_terms; ++r) {
      const int n = codomain.block_dim(k);
      Mat kr = rng.ginibre(m, n);
      if (max_rank >= 0 && max_rank < std::min(m, n))
        kr = rng.ginibre(m, max_rank) * rng.ginibre(max_rank, n);
      kraus[k].push_back(kr);
    }
  MapFlags flags;
  flags.positivity = Certificate::Structural;
  flags.invariant = true;
  const QuasiStarAlgebra& qa = *q;
  return SesquiMap::from_basis(std::move(q), codomain, [&](int i, int j) {
    const Mat prod = qa.basis(j).adjoint() * qa.basis(i);
    AlgebraElement out;
    for (int k = 0; k < codomain.num_blocks(); ++k) {
      const int n = codomain.block_dim(k);
      Mat acc = Mat::Zero(n, n);
      for (const auto& kr : kraus[k]) acc += kr.adjoint() * prod * kr;
      out.blocks.push_back(acc);
    }
    return out;
  }, flags);
}

/// Phi(a, b) = b^* Q a on block_model(C) with Q >= 0. C-linear for the right
/// multiplication action; invariant when Q is central.
inline SesquiMap random_c_linear_map(const CStarAlgebra& c, Rng& rng, bool central = true,
                                     bool allow_zero_blocks = true) {
  AlgebraElement qel;
  for (int n : c.block_dims()) {
    if (central) {
      double w = rng.uniform(0.2, 2.0);
      if (allow_zero_blocks && c.num_blocks() > 1 && rng.uniform() < 0.3) w = 0.0;
      qel.blocks.push_back(w * Mat::Identity(n, n));
    } else {
      qel.blocks.push_back(rng.psd(n, rng.uniform_int(1, n)));
    }
  }
  auto dom = std::make_shared<const QuasiStarAlgebra>(block_model(c));
  MapFlags flags;
  flags.positivity = Certificate::Structural;
  flags.c_linear = true;
  if (central) flags.invariant = true;
  return SesquiMap::from_basis(dom, c, [&](int i, int j) {
    return c.basis_element(j).adjoint() * qel * c.basis_element(i);
  }, flags, right_multiplication_action(c));
}

}  // namespace gnslab
