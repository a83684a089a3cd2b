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

// Small dense linear-algebra helpers shared by every module: norms, SVD based
// rank/kernel splits, pseudo-inverses, hermitian functional calculus and
// principal angles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

namespace gnslab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;

namespace linalg {

inline double spectral_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

inline Mat adjoint(const Mat& a) { return a.adjoint(); }

inline double hermitian_residual(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).norm();
}

// Ascending eigenvalues of the hermitian part of `a`.
inline RVec hermitian_eigenvalues(const Mat& a) {
  if (a.size() == 0) return RVec();
  Mat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// f(H) for hermitian H via its eigendecomposition.
template <class F>
Mat apply_hermitian(const Mat& h, F&& f) {
  if (h.size() == 0) return h;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  RVec vals = es.eigenvalues().unaryExpr([&](double s) { return f(s); });
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

inline Mat psd_sqrt(const Mat& h) {
  return apply_hermitian(h, [](double s) { return std::sqrt(std::max(s, 0.0)); });
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Orthonormal bases of the kernel of `a` (as a map on C^cols) and of its
// orthogonal complement. Singular values at or below rel_tol * sigma_max
// count as zero; an all-zero map has everything in its kernel.
struct KernelSplit {
  Mat kernel;      // cols x k, orthonormal
  Mat complement;  // cols x (cols - k), orthonormal
  RVec singular;
  int rank = 0;
};

inline KernelSplit kernel_split(const Mat& a, double rel_tol) {
  const Eigen::Index n = a.cols();
  KernelSplit out;
  if (n == 0) {
    out.kernel = Mat(0, 0);
    out.complement = Mat(0, 0);
    return out;
  }
  if (a.rows() == 0) {
    out.kernel = Mat::Identity(n, n);
    out.complement = Mat(n, 0);
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  out.singular = svd.singularValues();
  const double smax = out.singular.size() ? out.singular(0) : 0.0;
  int rank = 0;
  if (smax > 0.0) {
    for (Eigen::Index i = 0; i < out.singular.size(); ++i)
      if (out.singular(i) > rel_tol * smax) ++rank;
  }
  out.rank = rank;
  const Mat& v = svd.matrixV();
  out.complement = v.leftCols(rank);
  out.kernel = v.rightCols(n - rank);
  return out;
}

inline int numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const RVec& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

inline Mat pseudo_inverse(const Mat& a, double rel_tol) {
  if (a.size() == 0) return Mat::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  RVec inv = RVec::Zero(s.size());
  const double cut = s.size() ? rel_tol * s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// Orthonormal basis for the column span of `a`.
inline Mat column_span(const Mat& a, double rel_tol) {
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  int r = 0;
  if (s.size() && s(0) > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

// Principal angles (radians, ascending) between the spans of two matrices
// with orthonormal columns. Different dimensions give +inf for the surplus.
inline RVec principal_angles(const Mat& u, const Mat& v) {
  const Eigen::Index k = std::max(u.cols(), v.cols());
  RVec out = RVec::Constant(k, std::numeric_limits<double>::infinity());
  const Eigen::Index m = std::min(u.cols(), v.cols());
  if (m == 0) {
    if (k == 0) return RVec();
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(u.adjoint() * v);
  const RVec& c = svd.singularValues();
  for (Eigen::Index i = 0; i < m; ++i)
    out(i) = std::acos(std::clamp(c(i), -1.0, 1.0));
  std::sort(out.data(), out.data() + out.size());
  return out;
}

// Columnwise vectorisation of an n x n matrix (Eigen storage order).
inline Vec vec(const Mat& a) {
  return Eigen::Map<const Vec>(a.data(), a.size());
}

inline Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

}  // namespace linalg
}  // namespace gnslab
