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

// Finite-dimensional unital C*-algebras realised as direct sums of full
// matrix blocks M_{n_1} (+) ... (+) M_{n_K}, together with their norm,
// positive cone, states and the spectral min-calculus s -> min(s, t).

#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gnslab/errors.hpp"
#include "gnslab/linalg.hpp"
#include "gnslab/random.hpp"

namespace gnslab {

/// An element of a block algebra. Carries no reference to its algebra; all
/// binary operations check that the block shapes agree.
struct AlgebraElement {
  std::vector<Mat> blocks;

  std::size_t num_blocks() const { return blocks.size(); }
  bool same_shape(const AlgebraElement& o) const {
    if (blocks.size() != o.blocks.size()) return false;
    for (std::size_t k = 0; k < blocks.size(); ++k)
      if (blocks[k].rows() != o.blocks[k].rows() ||
          blocks[k].cols() != o.blocks[k].cols())
        return false;
    return true;
  }
  AlgebraElement adjoint() const {
    AlgebraElement out;
    out.blocks.reserve(blocks.size());
    for (const auto& b : blocks) out.blocks.push_back(b.adjoint());
    return out;
  }
};

namespace detail {
inline void require_same_shape(const AlgebraElement& a, const AlgebraElement& b,
                               const char* op) {
  if (!a.same_shape(b))
    throw StructuralError(std::string("block shape mismatch in ") + op);
}
}  // namespace detail

inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  detail::require_same_shape(a, b, "sum");
  AlgebraElement out = a;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) out.blocks[k] += b.blocks[k];
  return out;
}

inline AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  detail::require_same_shape(a, b, "difference");
  AlgebraElement out = a;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) out.blocks[k] -= b.blocks[k];
  return out;
}

inline AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  detail::require_same_shape(a, b, "product");
  AlgebraElement out;
  out.blocks.reserve(a.blocks.size());
  for (std::size_t k = 0; k < a.blocks.size(); ++k)
    out.blocks.push_back(a.blocks[k] * b.blocks[k]);
  return out;
}

inline AlgebraElement operator*(cplx s, const AlgebraElement& a) {
  AlgebraElement out = a;
  for (auto& b : out.blocks) b *= s;
  return out;
}

inline AlgebraElement operator*(double s, const AlgebraElement& a) {
  return cplx(s, 0.0) * a;
}

class CStarAlgebra {
 public:
  CStarAlgebra() = default;
  explicit CStarAlgebra(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
    if (dims_.empty()) throw StructuralError("algebra needs at least one block");
    for (int n : dims_)
      if (n <= 0) throw StructuralError("block dimensions must be positive");
  }

  const std::vector<int>& block_dims() const { return dims_; }
  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int block_dim(int k) const { return dims_.at(k); }
  bool commutative() const {
    return std::all_of(dims_.begin(), dims_.end(), [](int n) { return n == 1; });
  }
  /// Complex vector-space dimension sum n_k^2.
  int dimension() const {
    int d = 0;
    for (int n : dims_) d += n * n;
    return d;
  }
  /// Size of the matrix realisation (sum n_k).
  int total_size() const { return std::accumulate(dims_.begin(), dims_.end(), 0); }

  bool operator==(const CStarAlgebra& o) const { return dims_ == o.dims_; }

  bool contains(const AlgebraElement& z) const {
    if (z.blocks.size() != dims_.size()) return false;
    for (std::size_t k = 0; k < dims_.size(); ++k)
      if (z.blocks[k].rows() != dims_[k] || z.blocks[k].cols() != dims_[k]) return false;
    return true;
  }
  void require(const AlgebraElement& z) const {
    if (!contains(z)) throw StructuralError("element does not belong to algebra");
  }

  AlgebraElement zero() const {
    AlgebraElement z;
    for (int n : dims_) z.blocks.push_back(Mat::Zero(n, n));
    return z;
  }
  AlgebraElement unit() const {
    AlgebraElement z;
    for (int n : dims_) z.blocks.push_back(Mat::Identity(n, n));
    return z;
  }
  AlgebraElement scalar(cplx s) const { return s * unit(); }

  /// Matrix unit number s in block-major, row-major order.
  AlgebraElement basis_element(int s) const {
    auto [k, p, q] = locate(s);
    AlgebraElement z = zero();
    z.blocks[k](p, q) = 1.0;
    return z;
  }
  /// Coordinates of z against basis_element(0..dimension()-1).
  Vec coordinates(const AlgebraElement& z) const {
    require(z);
    Vec v(dimension());
    int s = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k)
      for (int p = 0; p < dims_[k]; ++p)
        for (int q = 0; q < dims_[k]; ++q) v(s++) = z.blocks[k](p, q);
    return v;
  }
  AlgebraElement from_coordinates(const Vec& v) const {
    if (v.size() != dimension()) throw StructuralError("coordinate length mismatch");
    AlgebraElement z = zero();
    int s = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k)
      for (int p = 0; p < dims_[k]; ++p)
        for (int q = 0; q < dims_[k]; ++q) z.blocks[k](p, q) = v(s++);
    return z;
  }
  /// Block-diagonal matrix of size total_size().
  Mat embed(const AlgebraElement& z) const {
    require(z);
    const int n = total_size();
    Mat m = Mat::Zero(n, n);
    int off = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      m.block(off, off, dims_[k], dims_[k]) = z.blocks[k];
      off += dims_[k];
    }
    return m;
  }

  AlgebraElement random_element(Rng& rng) const {
    AlgebraElement z;
    for (int n : dims_) z.blocks.push_back(rng.ginibre(n, n));
    return z;
  }
  AlgebraElement random_positive(Rng& rng) const {
    AlgebraElement z;
    for (int n : dims_) z.blocks.push_back(rng.psd(n, n));
    return z;
  }

 private:
  struct Loc {
    int k, p, q;
  };
  Loc locate(int s) const {
    if (s < 0) throw StructuralError("basis index out of range");
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const int n2 = dims_[k] * dims_[k];
      if (s < n2) return {static_cast<int>(k), s / dims_[k], s % dims_[k]};
      s -= n2;
    }
    throw StructuralError("basis index out of range");
  }

  std::vector<int> dims_;
};

/// C*-norm: the largest singular value over all blocks.
inline double op_norm(const AlgebraElement& z) {
  double n = 0.0;
  for (const auto& b : z.blocks) {
    if (b.rows() != b.cols()) throw StructuralError("non-square block");
    n = std::max(n, linalg::spectral_norm(b));
  }
  return n;
}

inline double op_norm(const CStarAlgebra& c, const AlgebraElement& z) {
  c.require(z);
  return op_norm(z);
}

/// Membership in the positive cone: every block hermitian to within tol and
/// with smallest eigenvalue >= -tol * ||z||.
inline bool is_positive(const AlgebraElement& z, double tol = kDefaultTol) {
  const double nz = op_norm(z);
  if (nz == 0.0) return true;
  for (const auto& b : z.blocks) {
    if (linalg::hermitian_residual(b) > tol * nz) return false;
    const RVec ev = linalg::hermitian_eigenvalues(b);
    if (ev.size() && ev(0) < -tol * nz) return false;
  }
  return true;
}

/// Smallest eigenvalue across blocks of the hermitian part.
inline double min_eigenvalue(const AlgebraElement& z) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : z.blocks) {
    const RVec ev = linalg::hermitian_eigenvalues(b);
    if (ev.size()) m = std::min(m, ev(0));
  }
  return m;
}

inline bool commutes(const AlgebraElement& a, const AlgebraElement& b, double tol) {
  const AlgebraElement c = a * b - b * a;
  return op_norm(c) <= tol * std::max(1.0, op_norm(a) * op_norm(b));
}

// ---------------------------------------------------------------------------
// States

/// A state omega(z) = sum_k trace(rho_k z_k) given by block density matrices.
class State {
 public:
  State() = default;
  State(const CStarAlgebra& c, std::vector<Mat> densities, double tol = kDefaultTol)
      : densities_(std::move(densities)) {
    if (static_cast<int>(densities_.size()) != c.num_blocks())
      throw StructuralError("state needs one density per block");
    double tr = 0.0;
    for (std::size_t k = 0; k < densities_.size(); ++k) {
      const auto& r = densities_[k];
      if (r.rows() != c.block_dim(k) || r.cols() != c.block_dim(k))
        throw StructuralError("density shape mismatch");
      if (!is_positive(AlgebraElement{{r}}, tol))
        throw PreconditionError("density matrix is not positive semidefinite");
      tr += r.trace().real();
    }
    if (std::abs(tr - 1.0) > std::max(tol, 1e-12))
      throw PreconditionError("densities must have total trace 1");
  }

  const std::vector<Mat>& densities() const { return densities_; }

  cplx operator()(const AlgebraElement& z) const {
    if (z.blocks.size() != densities_.size())
      throw StructuralError("state/element block count mismatch");
    cplx s = 0.0;
    for (std::size_t k = 0; k < densities_.size(); ++k) {
      if (z.blocks[k].rows() != densities_[k].rows())
        throw StructuralError("state/element block shape mismatch");
      s += (densities_[k] * z.blocks[k]).trace();
    }
    return s;
  }

 private:
  std::vector<Mat> densities_;
};

inline cplx state_eval(const State& omega, const AlgebraElement& z) { return omega(z); }

/// Normalised trace over the whole realisation: rho_k = I / sum(n_k).
inline State tracial_state(const CStarAlgebra& c) {
  std::vector<Mat> d;
  const double n = c.total_size();
  for (int nk : c.block_dims()) d.push_back(Mat::Identity(nk, nk) / n);
  return State(c, std::move(d));
}

/// Vector state of a unit vector h in block k.
inline State vector_state(const CStarAlgebra& c, int k, const Vec& h) {
  std::vector<Mat> d;
  for (int j = 0; j < c.num_blocks(); ++j) {
    const int n = c.block_dim(j);
    d.push_back(Mat::Zero(n, n));
  }
  const Vec u = h / h.norm();
  d.at(k) = u * u.adjoint();
  return State(c, std::move(d));
}

/// Point evaluation at block k (a character when the algebra is commutative).
inline State point_state(const CStarAlgebra& c, int k) {
  return vector_state(c, k, Vec::Unit(c.block_dim(k), 0));
}

/// Haar-like random pure state: a block chosen with probability proportional
/// to its size, then a uniformly random unit vector inside it.
inline State random_pure_state(const CStarAlgebra& c, Rng& rng) {
  const double u = rng.uniform(0.0, c.total_size());
  double acc = 0.0;
  int k = c.num_blocks() - 1;
  for (int j = 0; j < c.num_blocks(); ++j) {
    acc += c.block_dim(j);
    if (u < acc) {
      k = j;
      break;
    }
  }
  return vector_state(c, k, rng.unit_vector(c.block_dim(k)));
}

/// Random mixed state; `full_rank` false allows rank-deficient densities.
inline State random_state(const CStarAlgebra& c, Rng& rng, bool full_rank = true) {
  std::vector<Mat> d;
  double tr = 0.0;
  for (int n : c.block_dims()) {
    const int rank = full_rank ? n : rng.uniform_int(0, n);
    Mat r = rank > 0 ? rng.psd(n, rank) : Mat::Zero(n, n);
    tr += r.trace().real();
    d.push_back(std::move(r));
  }
  if (tr <= 0.0) return random_pure_state(c, rng);
  for (auto& r : d) r /= tr;
  return State(c, std::move(d));
}

/// Monte-Carlo estimate of sup |omega(z)| over pure states; for normal z this
/// approaches op_norm(z) from below. The analytic value stays authoritative.
inline double sampled_state_norm(const CStarAlgebra& c, const AlgebraElement& z,
                                 Rng& rng, int n_states) {
  c.require(z);
  double best = 0.0;
  for (int i = 0; i < n_states; ++i)
    best = std::max(best, std::abs(random_pure_state(c, rng)(z)));
  return best;
}

// ---------------------------------------------------------------------------
// Functional calculus

/// f_t(W) for f_t(s) = min(s, t), computed blockwise on the spectrum of a
/// positive W. Requires 0 <= t <= ||W||.
inline AlgebraElement functional_calculus_min(const AlgebraElement& w, double t,
                                              double tol = kDefaultTol) {
  const double nw = op_norm(w);
  if (!is_positive(w, tol)) throw PreconditionError("W must be positive semidefinite");
  if (t < 0.0 || t > nw * (1.0 + tol) + tol)
    throw DomainError("t = " + std::to_string(t) + " outside [0, ||W||]");
  AlgebraElement out;
  out.blocks.reserve(w.blocks.size());
  for (const auto& b : w.blocks)
    out.blocks.push_back(linalg::apply_hermitian(
        b, [t](double s) { return std::min(std::max(s, 0.0), t); }));
  return out;
}

/// Commutative algebra of n_points one-dimensional blocks: a grid model of
/// C([0, T]) whose norm is the max over grid points.
inline CStarAlgebra make_grid_algebra(int n_points) {
  if (n_points < 2) throw PreconditionError("grid needs at least 2 points");
  return CStarAlgebra(std::vector<int>(n_points, 1));
}

/// Uniform grid t_k = k * upper / (n - 1).
inline std::vector<double> uniform_grid(int n_points, double upper) {
  if (n_points < 2) throw PreconditionError("grid needs at least 2 points");
  std::vector<double> g(n_points);
  for (int k = 0; k < n_points; ++k) g[k] = upper * k / (n_points - 1);
  return g;
}

/// Sample a scalar function onto the grid algebra.
template <class F>
AlgebraElement sample_on_grid(const std::vector<double>& grid, F&& f) {
  AlgebraElement z;
  for (double t : grid) z.blocks.push_back(Mat::Constant(1, 1, cplx(f(t))));
  return z;
}

}  // namespace gnslab
