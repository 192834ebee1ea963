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

#include <algorithm>
#include <utility>
#include <vector>

#include "loopforge/matrix_functions.hpp"
#include "loopforge/su2_basis.hpp"

namespace loopforge {

/// Triple-jump weights (a_s, b_s) lifting a symmetric order-2s method to order 2s+2.
inline std::pair<double, double> yoshida_coeffs(int s) {
  if (s < 1) throw std::invalid_argument("yoshida_coeffs: s must be >= 1");
  const double root = std::pow(2.0, 1.0 / (2.0 * s + 1.0));
  const double a = 1.0 / (2.0 - root);
  return {a, -root * a};
}

/**
 * Flattened composition method: the approximation of e^{X_1 + ... + X_J} is
 * the ordered product of e^{w X_j} over the steps. s = 0 is the first-order
 * product, s = 1 the symmetric second-order one, s >= 2 the Yoshida
 * recursion of order 2s.
 */
struct SplittingScheme {
  int s = 1;
  Index generators = 1;
  std::vector<ProductStep> steps;

  int order() const { return s == 0 ? 1 : 2 * s; }
};

/// Exponent of the local error in lambda: order + 1.
inline int local_error_order(int s) { return s == 0 ? 2 : 2 * s + 1; }

/// Degree multiplier of one scheme application relative to m: 6 for s = 0, else 12 * 3^(s-1).
inline Index scheme_degree_factor(int s) {
  if (s < 0) throw std::invalid_argument("scheme_degree_factor: s must be >= 0");
  if (s == 0) return 6;
  Index f = 12;
  for (int i = 1; i < s; ++i) f *= 3;
  return f;
}

inline SplittingScheme build_scheme(int s, Index generators) {
  if (s < 0) throw std::invalid_argument("build_scheme: s must be >= 0");
  if (generators < 1) throw std::invalid_argument("build_scheme: need at least one generator");
  SplittingScheme scheme;
  scheme.s = s;
  scheme.generators = generators;
  if (s == 0) {
    for (Index j = 0; j < generators; ++j) scheme.steps.push_back({j, 1.0});
  } else if (s == 1) {
    for (Index j = 0; j + 1 < generators; ++j) scheme.steps.push_back({j, 0.5});
    scheme.steps.push_back({generators - 1, 1.0});
    for (Index j = generators - 2; j >= 0; --j) scheme.steps.push_back({j, 0.5});
  } else {
    const auto inner = build_scheme(s - 1, generators);
    const auto [a, b] = yoshida_coeffs(s - 1);
    for (double w : {a, b, a}) {
      for (const auto& step : inner.steps) scheme.steps.push_back({step.generator, w * step.weight});
    }
  }
  return scheme;
}

/// Sum of step weights for each generator (all ones for a consistent method).
inline std::vector<double> weight_totals(const SplittingScheme& scheme) {
  std::vector<double> totals(scheme.generators, 0.0);
  for (const auto& step : scheme.steps) totals[step.generator] += step.weight;
  return totals;
}

inline double max_abs_weight(const SplittingScheme& scheme) {
  double w = 0;
  for (const auto& step : scheme.steps) w = std::max(w, std::abs(step.weight));
  return w;
}

/// Product over the steps of exp(lambda * w * X_j) for constant skew-Hermitian X_j.
template <typename Real>
MatrixC<Real> apply_scheme_matrices(const SplittingScheme& scheme,
                                    const std::vector<MatrixC<Real>>& gens, Real lambda) {
  if (Index(gens.size()) != scheme.generators) {
    throw std::invalid_argument("apply_scheme_matrices: generator count mismatch");
  }
  const Index n = gens.front().rows();
  MatrixC<Real> acc = MatrixC<Real>::Identity(n, n);
  for (const auto& step : scheme.steps) {
    acc = acc * matrix_exp_skew(MatrixC<Real>(gens[step.generator] * (lambda * Real(step.weight))));
  }
  return acc;
}

template <typename Real>
MatrixC<Real> generator_sum(const std::vector<MatrixC<Real>>& gens) {
  MatrixC<Real> sum = MatrixC<Real>::Zero(gens.front().rows(), gens.front().cols());
  for (const auto& x : gens) sum += x;
  return sum;
}

/// ||e^{lambda sum X_j} - scheme(lambda X)||_2.
template <typename Real>
Real splitting_error(const SplittingScheme& scheme, const std::vector<MatrixC<Real>>& gens,
                     Real lambda) {
  const MatrixC<Real> exact = matrix_exp_skew(MatrixC<Real>(lambda * generator_sum(gens)));
  return operator_norm(exact - apply_scheme_matrices(scheme, gens, lambda));
}

/**
 * The scheme applied to the basis generators c_{r,k} B_{r,k} (per plane for
 * su(N)), each factor exp(lambda w c B) being a closed-form polynomial loop.
 */
template <typename Real>
TrigMatrixLoop<Real> apply_scheme_loops(const SplittingScheme& scheme,
                                        const PairExpansion<Real>& expansion, Real lambda) {
  const auto gens = expansion.generators();
  if (Index(gens.size()) != scheme.generators) {
    throw std::invalid_argument("apply_scheme_loops: scheme has " +
                                std::to_string(scheme.generators) + " generators, expansion has " +
                                std::to_string(gens.size()));
  }
  return exp_product(gens, expansion.size, std::span<const ProductStep>(scheme.steps), lambda);
}

template <typename Real>
TrigMatrixLoop<Real> apply_scheme_loops(const SplittingScheme& scheme,
                                        const BasisCoeffs<Real>& coeffs, Real lambda) {
  return apply_scheme_loops(scheme, as_pair_expansion(coeffs), lambda);
}

/// Errors at each lambda and the fitted log-log slope.
struct OrderStudy {
  struct Row {
    double lambda = 0;
    double error = 0;
  };
  std::vector<Row> rows;
  double slope = 0;
};

/// Errors at or below this are treated as roundoff and left out of slope fits.
inline constexpr double kRoundoffFloor = 1e-13;

template <typename Real>
OrderStudy order_study(const std::vector<MatrixC<Real>>& gens, int s,
                       const std::vector<double>& lambdas) {
  if (gens.empty()) throw std::invalid_argument("order_study: no generators");
  const auto scheme = build_scheme(s, Index(gens.size()));
  Real norm_sum = 0;
  for (const auto& x : gens) norm_sum += operator_norm(x);
  const double reach = max_abs_weight(scheme) * double(norm_sum);
  OrderStudy study;
  std::vector<double> xs, ys;
  for (double lambda : lambdas) {
    if (std::abs(lambda) * reach > 2.0) {
      throw std::invalid_argument("order_study: lambda " + std::to_string(lambda) +
                                  " outside the small-step regime");
    }
    const double err = double(splitting_error(scheme, gens, Real(lambda)));
    study.rows.push_back({lambda, err});
    if (err > kRoundoffFloor) {
      xs.push_back(lambda);
      ys.push_back(err);
    }
  }
  if (xs.size() < 2) throw NumericalError("order_study: errors at roundoff, slope undefined");
  study.slope = loglog_fit(xs, ys).slope;
  return study;
}

template <typename Derived>
typename Derived::PlainObject commutator(const Eigen::MatrixBase<Derived>& a,
                                         const Eigen::MatrixBase<Derived>& b) {
  return a * b - b * a;
}

/// (1/12) (||[[A,B],B]|| + (1/2) ||[[A,B],A]||).
template <typename Real>
Real suzuki_delta2(const MatrixC<Real>& a, const MatrixC<Real>& b) {
  const MatrixC<Real> ab = commutator(a, b);
  return (operator_norm(commutator(ab, b)) + Real(0.5) * operator_norm(commutator(ab, a))) / Real(12);
}

/// Commutator bound for the symmetric second-order product:
/// sum_{k=1}^{J-1} Delta2(X_k, X_{k+1} + ... + X_J).
template <typename Real>
Real suzuki_bound(const std::vector<MatrixC<Real>>& gens) {
  if (gens.size() < 2) return 0;
  Real total = 0;
  MatrixC<Real> tail = MatrixC<Real>::Zero(gens.front().rows(), gens.front().cols());
  for (size_t k = gens.size() - 1; k >= 1; --k) {
    tail += gens[k];
    total += suzuki_delta2(gens[k - 1], tail);
  }
  return total;
}

}  // namespace loopforge
