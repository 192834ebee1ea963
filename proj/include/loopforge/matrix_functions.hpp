// Copyright 2026 The loopforge Authors
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

#include <Eigen/Eigenvalues>

#include "loopforge/core.hpp"
#include "loopforge/trig_loop.hpp"

namespace loopforge {

/// Eigenvalue phases of a unitary argument to matrix_log_principal must stay
/// this far inside (-pi, pi).
inline constexpr double kLogPhaseMargin = 0.1;

/**
 * e^X for skew-Hermitian X, through the unitary diagonalization of the
 * Hermitian matrix -iX. The result is unitary to roundoff, and det = 1 when
 * trace(X) = 0.
 */
template <typename Derived>
typename Derived::PlainObject matrix_exp_skew(const Eigen::MatrixBase<Derived>& x) {
  using Real = typename Derived::RealScalar;
  using Scalar = std::complex<Real>;
  using Matrix = typename Derived::PlainObject;
  if (x.rows() != x.cols()) throw std::invalid_argument("matrix_exp_skew: matrix must be square");
  const Real scale = x.norm();
  if ((x + x.adjoint()).norm() > Real(1e-12) * scale) {
    throw std::invalid_argument("matrix_exp_skew: input is not skew-Hermitian");
  }
  const Matrix hermitian = Scalar(0, -1) * skew_part(x);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian);
  const auto& v = eig.eigenvectors();
  const auto phases = eig.eigenvalues().unaryExpr([](Real p) { return std::polar(Real(1), p); });
  return v * phases.asDiagonal() * v.adjoint();
}

/**
 * Principal logarithm of a unitary matrix via its Schur form. Every eigenvalue
 * phase must lie in (-pi + margin, pi - margin); otherwise BranchCutError.
 */
template <typename Derived>
typename Derived::PlainObject matrix_log_principal(const Eigen::MatrixBase<Derived>& u,
                                                   double margin = kLogPhaseMargin) {
  using Real = typename Derived::RealScalar;
  using Scalar = std::complex<Real>;
  using Matrix = typename Derived::PlainObject;
  if (u.rows() != u.cols()) throw std::invalid_argument("matrix_log_principal: matrix must be square");
  Eigen::ComplexSchur<Matrix> schur(u.derived().eval());
  const Matrix& q = schur.matrixU();
  const auto& t = schur.matrixT();
  const Real limit = std::numbers::pi_v<Real> - Real(margin);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> logs(u.rows());
  for (Index i = 0; i < u.rows(); ++i) {
    const Real phase = std::arg(t(i, i));
    if (std::abs(phase) >= limit) {
      throw BranchCutError("matrix_log_principal: eigenvalue phase " + std::to_string(phase) +
                           " too close to the branch cut");
    }
    logs(i) = Scalar(0, phase);
  }
  const Matrix log = q * logs.asDiagonal() * q.adjoint();
  return skew_part(log);
}

/// Pointwise exponential of algebra-valued samples.
template <typename Real>
GridLoop<Real> exp_samples(const GridLoop<Real>& algebra) {
  GridLoop<Real> out(algebra.size(), algebra.length());
  for (Index g = 0; g < algebra.length(); ++g) {
    out.at(g) = matrix_exp_skew(skew_part(algebra.at(g)));
  }
  return out;
}

/// e^{A(t)} sampled on a grid of the given length.
template <typename Real>
GridLoop<Real> exp_samples(const TrigMatrixLoop<Real>& algebra, Index grid_length) {
  return exp_samples(sample(algebra, grid_length));
}

}  // namespace loopforge
