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

#include <cstdint>
#include <random>

#include "gnslab/linalg.hpp"

namespace gnslab {

/// The single seeded source of randomness. Nothing in the library draws from
/// ambient entropy; every sampler takes an Rng& explicitly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int uniform_int(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  double normal() { return normal_(engine_); }
  cplx complex_normal() { return {normal(), normal()}; }

  Vec complex_vector(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal();
    return v;
  }
  Vec unit_vector(Eigen::Index n) {
    Vec v = complex_vector(n);
    const double nv = v.norm();
    return nv > 0 ? Vec(v / nv) : v;
  }
  Mat ginibre(Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
    return m;
  }
  Mat hermitian(Eigen::Index n) {
    Mat g = ginibre(n, n);
    return 0.5 * (g + g.adjoint());
  }
  Mat psd(Eigen::Index n, Eigen::Index rank) {
    Mat g = ginibre(n, rank);
    return g * g.adjoint();
  }
  Mat unitary(Eigen::Index n) {
    Eigen::HouseholderQR<Mat> qr(ginibre(n, n));
    Mat q = qr.householderQ();
    // fix phases so the distribution is Haar
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(r(i, i));
      if (a > 0) q.col(i) *= r(i, i) / a;
    }
    return q;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gnslab
