// Copyright 2026 The MPRU Authors
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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mpru/core.hpp"

namespace mpru {

/// Orthogonal projection onto the hyperplane orthogonal to a direction u.
///
/// Only the unit vector is stored; applying it costs O(n) through the rank-one
/// identity P = I - u u^T. dense() materializes P for inspection and tests.
template <typename Scalar>
class ProjectionOperator {
 public:
  using VectorType = Vector<Scalar>;
  using MatrixType = Matrix<Scalar>;

  explicit ProjectionOperator(VectorType unit_direction) : u_(std::move(unit_direction)) {}

  const VectorType& unit_direction() const noexcept { return u_; }
  Index dim() const noexcept { return u_.size(); }

  template <typename Derived>
  VectorType operator()(const Eigen::MatrixBase<Derived>& v) const {
    return v - u_ * u_.dot(v);
  }

  /// i-th coordinate of P v without forming the rest of the vector.
  template <typename Derived>
  Scalar coordinate(const Eigen::MatrixBase<Derived>& v, Index i) const {
    return v(i) - u_(i) * u_.dot(v);
  }

  MatrixType dense() const {
    return MatrixType::Identity(dim(), dim()) - u_ * u_.transpose();
  }

 private:
  VectorType u_;
};

/// Normalizes `direction` in L2. Throws ZeroCentroid when its norm is <= 1e-12.
template <typename Derived>
ProjectionOperator<typename Derived::Scalar> build_projector(
    const Eigen::MatrixBase<Derived>& direction) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = direction.norm();
  if (!(norm > Scalar(1e-12))) {
    throw Error(Errc::ZeroCentroid, "projection direction has L2 norm <= 1e-12");
  }
  return ProjectionOperator<Scalar>(direction / norm);
}

/// Orthonormal basis {q_1..q_{n-1}} of the complement of `direction`, as the
/// columns of an n x (n-1) matrix.
///
/// Standard basis vectors are orthogonalized against u and against the
/// accepted columns with two passes of modified Gram-Schmidt. Candidates are
/// visited in order of increasing |u_i|, so the candidate left with a
/// (numerically) zero residual is the one most aligned with u. A residual
/// below `drop_tolerance` is discarded. O(n^3) multiplications.
template <typename Derived>
Matrix<typename Derived::Scalar> orthonormal_complement_basis(
    const Eigen::MatrixBase<Derived>& direction,
    typename Derived::Scalar drop_tolerance = typename Derived::Scalar(1e-10)) {
  using Scalar = typename Derived::Scalar;
  const Index n = direction.size();
  const Scalar norm = direction.norm();
  if (!(norm > Scalar(1e-12))) {
    throw Error(Errc::ZeroCentroid, "projection direction has L2 norm <= 1e-12");
  }
  const Vector<Scalar> u = direction / norm;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(u(a)) < std::abs(u(b)); });

  Matrix<Scalar> basis(n, std::max<Index>(n - 1, 0));
  Index accepted = 0;
  Vector<Scalar> w(n);
  for (const Index i : order) {
    if (accepted == n - 1) break;
    w.setZero();
    w(i) = Scalar(1);
    for (int pass = 0; pass < 2; ++pass) {
      w -= u * u.dot(w);
      for (Index k = 0; k < accepted; ++k) {
        w -= basis.col(k) * basis.col(k).dot(w);
      }
    }
    const Scalar residual = w.norm();
    if (residual <= drop_tolerance) continue;
    basis.col(accepted++) = w / residual;
  }
  if (accepted != n - 1) {
    throw Error(Errc::RankDeficiency, "only " + std::to_string(accepted) + " of " +
                                          std::to_string(n - 1) +
                                          " basis vectors survived orthogonalization");
  }
  return basis;
}

/// Dense P = A A^T assembled from the Gram-Schmidt basis. Reference path for
/// tests and benchmarks; production code uses build_projector().
template <typename Derived>
Matrix<typename Derived::Scalar> build_projector_gram_schmidt(
    const Eigen::MatrixBase<Derived>& direction) {
  const auto basis = orthonormal_complement_basis(direction);
  return basis * basis.transpose();
}

}  // namespace mpru
