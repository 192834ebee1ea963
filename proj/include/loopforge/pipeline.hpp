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

#include <optional>
#include <variant>

#include "loopforge/classify.hpp"
#include "loopforge/embed.hpp"
#include "loopforge/matrix_functions.hpp"
#include "loopforge/splitting.hpp"
#include "loopforge/su2_basis.hpp"
#include "loopforge/vp_approx.hpp"

namespace loopforge {

/// Grid used for every sup-norm and structure measurement unless told otherwise.
inline constexpr Index kMeasurementGrid = 4096;

/// Default bound on ||psi(xi_{k-1}) - psi(xi_k)||_C between homotopy nodes.
inline constexpr double kDefaultHomotopyStep = 0.5;

/// Parameters of one end-to-end construction.
struct ApproxPlan {
  Index size = 2;
  Index factors = 1;  // L: number of su(2) planes over all factors
  double alpha = 2.0;
  double epsilon = 1.0;
  int s = 1;
  Index m = 0;
  Index M = 0;
  Index n = 0;
  bool feasible = false;

  /// factor(s) * L * M * m, an upper bound on the degree of the result.
  Index degree_bound() const { return scheme_degree_factor(s) * factors * M * m; }
};

/// Smallest s >= 1 with alpha^2 / (alpha + 2s) <= epsilon.
inline int splitting_level_for(double alpha, double epsilon) {
  if (!(alpha > 0) || !(epsilon > 0)) {
    throw std::invalid_argument("splitting_level_for: alpha and epsilon must be positive");
  }
  int s = 1;
  while (alpha * alpha / (alpha + 2.0 * s) > epsilon) {
    if (++s > 64) throw std::invalid_argument("splitting_level_for: epsilon too small");
  }
  return s;
}

/**
 * M = max(1, floor(n^{alpha/(alpha+p)} / (f L))), m = floor(n / (f L M)),
 * with p the scheme order and f = scheme_degree_factor(s). Infeasible when
 * m < 1; the caller then falls back to the constant identity loop.
 */
inline ApproxPlan plan_parameters(Index n, double alpha, double epsilon, Index factors,
                                  std::optional<int> s_override = std::nullopt) {
  if (n < 0) throw std::invalid_argument("plan_parameters: n must be non-negative");
  if (!(alpha > 1)) throw std::invalid_argument("plan_parameters: alpha must exceed 1");
  if (!(epsilon > 0)) throw std::invalid_argument("plan_parameters: epsilon must be positive");
  if (factors < 1) throw std::invalid_argument("plan_parameters: need at least one factor");
  if (s_override && *s_override < 0) throw std::invalid_argument("plan_parameters: s must be >= 0");

  ApproxPlan plan;
  plan.factors = factors;
  plan.alpha = alpha;
  plan.epsilon = epsilon;
  plan.n = n;
  plan.s = s_override ? *s_override : splitting_level_for(alpha, epsilon);
  const double order = plan.s == 0 ? 1.0 : 2.0 * plan.s;
  const Index per_step = scheme_degree_factor(plan.s) * factors;
  const double target = std::pow(double(n), alpha / (alpha + order)) / double(per_step);
  plan.M = std::max<Index>(1, Index(std::floor(target)));
  plan.m = n / (per_step * plan.M);
  plan.feasible = plan.m >= 1;
  return plan;
}

/// Exponent of one factor: polynomial loop or sampled grid.
template <typename Real>
using ExponentLoop = std::variant<TrigMatrixLoop<Real>, GridLoop<Real>>;

template <typename Real>
Index exponent_size(const ExponentLoop<Real>& a) {
  return std::visit([](const auto& x) { return x.size(); }, a);
}

/// U_0 e^{A(t)}, with A either 2x2 embedded into a plane or full size.
template <typename Real>
struct LoopFactor {
  MatrixC<Real> u0;
  ExponentLoop<Real> exponent;
  std::optional<PlanePair> plane;
};

/// U(t) = prod_l U_{0,l} exp(A_l(t)) (A_l lifted into its plane when one is given).
template <typename Real>
struct FactoredLoop {
  Index size = 2;
  std::vector<LoopFactor<Real>> factors;

  /// Number of su(2) planes the factors occupy; full-size factors count N(N-1)/2.
  Index plane_count() const {
    Index count = 0;
    for (const auto& f : factors) count += f.plane ? 1 : size * (size - 1) / 2;
    return count;
  }
};

template <typename Real>
void validate(const FactoredLoop<Real>& f) {
  if (f.size < 2) throw std::invalid_argument("FactoredLoop: size must be >= 2");
  if (f.factors.empty()) throw std::invalid_argument("FactoredLoop: no factors");
  for (const auto& factor : f.factors) {
    if (factor.u0.rows() != f.size || factor.u0.cols() != f.size) {
      throw std::invalid_argument("FactoredLoop: constant factor has the wrong size");
    }
    const Index expected = factor.plane ? 2 : f.size;
    if (exponent_size(factor.exponent) != expected) {
      throw std::invalid_argument("FactoredLoop: exponent size does not match its embedding");
    }
    if (factor.plane) check_pair(*factor.plane, f.size);
  }
}

namespace detail {

template <typename Real>
GridLoop<Real> exponent_samples(const ExponentLoop<Real>& a, Index grid_length) {
  if (const auto* loop = std::get_if<TrigMatrixLoop<Real>>(&a)) return sample(*loop, grid_length);
  const auto& grid = std::get<GridLoop<Real>>(a);
  if (grid.length() != grid_length) {
    throw std::invalid_argument("exponent grid length " + std::to_string(grid.length()) +
                                " does not match measurement grid " + std::to_string(grid_length));
  }
  return grid;
}

}  // namespace detail

/// Samples of U_0 exp(A(t)) (embedded) for one factor.
template <typename Real>
GridLoop<Real> factor_samples(const LoopFactor<Real>& factor, Index size, Index grid_length) {
  const auto e = exp_samples(detail::exponent_samples(factor.exponent, grid_length));
  GridLoop<Real> out(size, grid_length);
  for (Index g = 0; g < grid_length; ++g) {
    const MatrixC<Real> v = e.at(g);
    out.at(g) = factor.plane ? embed_T(v, *factor.plane, size) : v;
  }
  return out;
}

/// prod_l U_{0,l} exp(A_l(t)) on a grid.
template <typename Real>
GridLoop<Real> reconstruct(const FactoredLoop<Real>& f, Index grid_length) {
  validate(f);
  GridLoop<Real> acc(f.size, grid_length);
  for (Index g = 0; g < grid_length; ++g) acc.at(g).setIdentity();
  for (const auto& factor : f.factors) {
    const auto e = factor_samples(factor, f.size, grid_length);
    for (Index g = 0; g < grid_length; ++g) {
      const MatrixC<Real> next = acc.at(g) * factor.u0 * e.at(g);
      acc.at(g) = next;
    }
  }
  return acc;
}

/**
 * Geodesic homotopy psi(xi) = exp(xi Lambda) with Lambda = log U pointwise,
 * cut into K equal pieces so that consecutive nodes differ by at most
 * max_step in sup norm. Factor k is log(psi(xi_{k-1})^H psi(xi_k)).
 */
template <typename Real>
FactoredLoop<Real> homotopy_factorize(const GridLoop<Real>& u, double max_step = kDefaultHomotopyStep) {
  using Matrix = MatrixC<Real>;
  if (!(max_step > 0 && max_step < std::sqrt(2.0))) {
    throw std::invalid_argument("homotopy_factorize: max_step must lie in (0, sqrt(2))");
  }
  const Index n = u.size();
  const Index G = u.length();
  GridLoop<Real> lambda(n, G);
  Real sup_norm = 0;
  for (Index g = 0; g < G; ++g) {
    const Matrix log = matrix_log_principal(u.at(g));
    if (std::abs(log.trace()) > 1e-8) {
      throw BranchCutError("homotopy_factorize: principal logarithm at grid point " +
                           std::to_string(g) + " is not traceless");
    }
    lambda.at(g) = log;
    sup_norm = std::max(sup_norm, operator_norm(log));
  }
  const double theta = 2.0 * std::asin(max_step / 2.0);
  const Index pieces = std::max<Index>(1, Index(std::ceil(double(sup_norm) / theta)));

  FactoredLoop<Real> f;
  f.size = n;
  for (Index k = 1; k <= pieces; ++k) {
    const Real lo = Real(k - 1) / Real(pieces), hi = Real(k) / Real(pieces);
    GridLoop<Real> a(n, G);
    for (Index g = 0; g < G; ++g) {
      const Matrix l = lambda.at(g);
      const Matrix step = matrix_exp_skew(Matrix(lo * l)).adjoint() * matrix_exp_skew(Matrix(hi * l));
      a.at(g) = matrix_log_principal(step);
    }
    f.factors.push_back({Matrix::Identity(n, n), std::move(a), std::nullopt});
  }
  return f;
}

/**
 * Polynomial SU-valued approximation of exp(A(t)): smooth A by the degree-m
 * de la Vallee Poussin mean, expand it in the basis, apply the order-2s
 * splitting with step 1/M and take the M-th power.
 */
template <typename Real>
TrigMatrixLoop<Real> approximate_factor(const ExponentLoop<Real>& exponent, const ApproxPlan& plan) {
  if (!plan.feasible) throw NumericalError("approximate_factor: plan is infeasible");
  const auto smoothed = std::visit([&](const auto& a) { return vp_mean(a, plan.m); }, exponent);
  const auto expansion = expand_pairs(smoothed, plan.m);
  const auto scheme = build_scheme(plan.s, Index(expansion.generators().size()));
  const auto step = detail::trim_roundoff(
      apply_scheme_loops(scheme, expansion, Real(1) / Real(plan.M)));
  return degree_trim(power(step, plan.M), Real(kRoundoffTrimTolerance));
}

/// prod_l U_{0,l} P_l(t), with P_l embedded into its plane when the factor has one.
template <typename Real>
TrigMatrixLoop<Real> assemble(const FactoredLoop<Real>& f,
                              const std::vector<TrigMatrixLoop<Real>>& per_factor) {
  validate(f);
  if (per_factor.size() != f.factors.size()) {
    throw std::invalid_argument("assemble: per-factor count does not match the factorization");
  }
  auto acc = TrigMatrixLoop<Real>::identity(f.size);
  for (size_t l = 0; l < per_factor.size(); ++l) {
    const auto& factor = f.factors[l];
    const auto& p = per_factor[l];
    const Index expected = factor.plane ? 2 : f.size;
    if (p.size() != expected) throw std::invalid_argument("assemble: factor size mismatch");
    const auto lifted = factor.plane ? embed_T(p, *factor.plane, f.size) : p;
    acc = detail::trim_roundoff(multiply(acc, factor.u0 * lifted));
  }
  return degree_trim(acc, Real(kRoundoffTrimTolerance));
}

struct ApproxOptions {
  Index n = 0;
  double alpha = 2.0;
  double epsilon = 1.0;
  std::optional<int> s;
  Index grid = kMeasurementGrid;
  double max_step = kDefaultHomotopyStep;
};

struct ApproxReport {
  Index n = 0;
  ApproxPlan plan;
  double sup_error = 0;
  Index degree = 0;
  double unitarity_defect = 0;
  double det_defect = 0;
  /// sup_t ||U_{0,l} e^{A_l(t)} - U_{0,l} P_l(t)|| per factor; empty on the fallback path.
  std::vector<double> factor_errors;
};

template <typename Real>
struct ApproxResult {
  TrigMatrixLoop<Real> loop;
  ApproxReport report;
};

/// Full construction for a factored input, measured against `reference` samples.
template <typename Real>
ApproxResult<Real> approximate_loop(const FactoredLoop<Real>& f, const ApproxOptions& options,
                                    const std::optional<GridLoop<Real>>& reference = std::nullopt) {
  validate(f);
  const auto target = reference ? *reference : reconstruct(f, options.grid);
  const Index grid = target.length();

  ApproxResult<Real> result;
  auto& report = result.report;
  report.n = options.n;
  report.plan = plan_parameters(options.n, options.alpha, options.epsilon, f.plane_count(), options.s);
  report.plan.size = f.size;

  if (!report.plan.feasible) {
    result.loop = TrigMatrixLoop<Real>::identity(f.size);
  } else {
    std::vector<TrigMatrixLoop<Real>> per_factor;
    per_factor.reserve(f.factors.size());
    for (const auto& factor : f.factors) {
      per_factor.push_back(approximate_factor(factor.exponent, report.plan));
      const auto exact = factor_samples(factor, f.size, grid);
      const auto& p = per_factor.back();
      const auto lifted = factor.plane ? embed_T(p, *factor.plane, f.size) : p;
      report.factor_errors.push_back(double(sup_distance(factor.u0 * lifted, exact)));
    }
    result.loop = assemble(f, per_factor);
  }

  report.degree = result.loop.degree();
  if (report.plan.feasible && report.degree > options.n) {
    throw NumericalError("approximate_loop: degree " + std::to_string(report.degree) +
                         " exceeds the target " + std::to_string(options.n));
  }
  report.sup_error = double(sup_distance(result.loop, target));
  const Index check_grid = std::max(kMeasurementGrid, measurement_grid(report.degree, 4));
  const auto structure = classify(sample(result.loop, check_grid), LoopClass::UnitaryGroup);
  report.unitarity_defect = structure.unitarity_defect;
  report.det_defect = structure.determinant_defect;
  return result;
}

/// Raw sampled loop: factorized along the geodesic homotopy first.
template <typename Real>
ApproxResult<Real> approximate_loop(const GridLoop<Real>& u, const ApproxOptions& options) {
  return approximate_loop(homotopy_factorize(u, options.max_step), options,
                          std::optional<GridLoop<Real>>(u));
}

}  // namespace loopforge
