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
#include <array>
#include <optional>
#include <span>
#include <utility>

#include "loopforge/classify.hpp"
#include "loopforge/embed.hpp"
#include "loopforge/trig_loop.hpp"

namespace loopforge {

inline constexpr int kBasisFamilies = 6;

/// Quaternion axes of su(2): X1 = [[0,1],[-1,0]], X2 = [[0,i],[i,0]],
/// X3 = [[i,0],[0,-i]]. Each squares to -I and distinct axes anticommute.
template <typename Real = double>
MatrixC<Real> su2_axis(int a) {
  using Scalar = std::complex<Real>;
  MatrixC<Real> x = MatrixC<Real>::Zero(2, 2);
  switch (a) {
    case 1:
      x(0, 1) = Scalar(1);
      x(1, 0) = Scalar(-1);
      break;
    case 2:
      x(0, 1) = Scalar(0, 1);
      x(1, 0) = Scalar(0, 1);
      break;
    case 3:
      x(0, 0) = Scalar(0, 1);
      x(1, 1) = Scalar(0, -1);
      break;
    default:
      throw std::invalid_argument("su2_axis: axis must be 1, 2 or 3");
  }
  return x;
}

/// Coordinate of an su(2) matrix along axis a: -Re tr(X_a Y) / 2.
template <typename Derived>
typename Derived::RealScalar su2_component(const Eigen::MatrixBase<Derived>& y, int a) {
  using Real = typename Derived::RealScalar;
  return -Real(0.5) * (su2_axis<Real>(a) * y).trace().real();
}

/// Axis pair (X_a, X_b) rotated by family r: (X3,X1), (X1,X2), (X2,X3).
inline std::pair<int, int> family_axes(int r) {
  static constexpr std::array<std::pair<int, int>, 3> kPairs{{{3, 1}, {1, 2}, {2, 3}}};
  if (r < 1 || r > kBasisFamilies) throw std::invalid_argument("family_axes: r must be in 1..6");
  return kPairs[(r - 1) / 2];
}

inline bool is_fake_slot(int r, Index k) { return k == 0 && r % 2 == 0; }

/// B_{r,k}(t) = cos(kt) P + sin(kt) Q. Odd r: P = X_a, Q = -X_b; even r: P = X_b, Q = X_a.
template <typename Real = double>
std::pair<MatrixC<Real>, MatrixC<Real>> basis_cos_sin(int r) {
  const auto [a, b] = family_axes(r);
  if (r % 2 == 1) return {su2_axis<Real>(a), MatrixC<Real>(-su2_axis<Real>(b))};
  return {su2_axis<Real>(b), su2_axis<Real>(a)};
}

template <typename Real>
struct BasisElement {
  int r = 1;
  Index k = 0;
  TrigMatrixLoop<Real> loop;
};

/// Element (r, k) of the real basis of su(2)-valued loops of degree <= m.
template <typename Real = double>
BasisElement<Real> basis_element(int r, Index k) {
  using Scalar = std::complex<Real>;
  if (r < 1 || r > kBasisFamilies) throw std::invalid_argument("basis_element: r must be in 1..6");
  if (k < 0) throw std::invalid_argument("basis_element: k must be non-negative");
  if (is_fake_slot(r, k)) {
    throw std::invalid_argument("basis_element: slot (" + std::to_string(r) + ",0) is fake");
  }
  const auto [p, q] = basis_cos_sin<Real>(r);
  TrigMatrixLoop<Real> loop(2, k);
  if (k == 0) {
    loop.coeff(0) = p;
  } else {
    const Scalar i(0, 1);
    loop.coeff(k) = (p - i * q) * Real(0.5);
    loop.coeff(-k) = (p + i * q) * Real(0.5);
  }
  return {r, k, std::move(loop)};
}

/// Real coefficients c_{r,k}, r = 1..6, k = 0..m; fake slots are zero.
template <typename Real>
class BasisCoeffs {
 public:
  BasisCoeffs() : BasisCoeffs(0) {}
  explicit BasisCoeffs(Index m) : m_(m), values_(Values::Zero(kBasisFamilies, m + 1)) {
    if (m < 0) throw std::invalid_argument("BasisCoeffs: m must be non-negative");
  }

  Index m() const { return m_; }

  Real operator()(int r, Index k) const {
    check(r, k);
    return values_(r - 1, k);
  }

  void set(int r, Index k, Real v) {
    check(r, k);
    if (is_fake_slot(r, k) && v != 0) {
      throw std::invalid_argument("BasisCoeffs: fake slot must stay zero");
    }
    values_(r - 1, k) = v;
  }

  /// Sum of |c_{r,k}| over all slots.
  Real l1_norm() const { return values_.cwiseAbs().sum(); }

  /// max_r |c_{r,k}| for each k.
  Eigen::Matrix<Real, Eigen::Dynamic, 1> max_per_frequency() const {
    return values_.cwiseAbs().colwise().maxCoeff().transpose();
  }

 private:
  using Values = Eigen::Matrix<Real, kBasisFamilies, Eigen::Dynamic>;

  void check(int r, Index k) const {
    if (r < 1 || r > kBasisFamilies || k < 0 || k > m_) {
      throw std::out_of_range("BasisCoeffs: slot (" + std::to_string(r) + "," + std::to_string(k) +
                              ") out of range for m = " + std::to_string(m_));
    }
  }

  Index m_;
  Values values_;
};

namespace detail {

// Maps family coefficients (c_1..c_6) at a fixed k >= 1 to the six real
// coordinates (cos part on X1..X3, sin part on X1..X3). Invertible.
template <typename Real>
Eigen::Matrix<Real, 6, 6> family_to_components() {
  Eigen::Matrix<Real, 6, 6> sys;
  for (int r = 1; r <= kBasisFamilies; ++r) {
    const auto [p, q] = basis_cos_sin<Real>(r);
    for (int a = 1; a <= 3; ++a) {
      sys(a - 1, r - 1) = su2_component(p, a);
      sys(a + 2, r - 1) = su2_component(q, a);
    }
  }
  return sys;
}

template <typename Real>
const Eigen::Matrix<Real, 6, 6>& components_to_family() {
  static const Eigen::Matrix<Real, 6, 6> inv = family_to_components<Real>().inverse();
  return inv;
}

}  // namespace detail

/**
 * Unique real coefficients with sum c_{r,k} B_{r,k} = R for an su(2)-valued
 * loop R of degree <= m.
 */
template <typename Real>
BasisCoeffs<Real> expand_in_basis(const TrigMatrixLoop<Real>& algebra_loop, Index m) {
  using Scalar = std::complex<Real>;
  using Matrix = MatrixC<Real>;
  if (algebra_loop.size() != 2) throw std::invalid_argument("expand_in_basis: expected a loop of size 2");
  if (m < 0) throw std::invalid_argument("expand_in_basis: m must be non-negative");
  const Real scale = std::max(Real(1), max_coeff_norm(algebra_loop));
  const auto defects = classify(algebra_loop, LoopClass::Algebra);
  if (std::max(defects.skewness_defect, defects.trace_defect) > 1e-10 * scale) {
    throw std::invalid_argument("expand_in_basis: loop is not su(2)-valued");
  }
  const auto loop = degree_trim(algebra_loop);
  if (loop.degree() > m) {
    throw std::invalid_argument("expand_in_basis: loop degree " + std::to_string(loop.degree()) +
                                " exceeds m = " + std::to_string(m));
  }

  BasisCoeffs<Real> coeffs(m);
  const Matrix c0 = loop.coeff(0);
  coeffs.set(1, 0, su2_component(c0, 3));
  coeffs.set(3, 0, su2_component(c0, 1));
  coeffs.set(5, 0, su2_component(c0, 2));

  const auto& solve = detail::components_to_family<Real>();
  const Scalar i(0, 1);
  for (Index k = 1; k <= loop.degree(); ++k) {
    const Matrix p = loop.coeff(k) + loop.coeff(-k);
    const Matrix q = i * (loop.coeff(k) - loop.coeff(-k));
    Eigen::Matrix<Real, 6, 1> rhs;
    for (int a = 1; a <= 3; ++a) {
      rhs(a - 1) = su2_component(p, a);
      rhs(a + 2) = su2_component(q, a);
    }
    const Eigen::Matrix<Real, 6, 1> c = solve * rhs;
    for (int r = 1; r <= kBasisFamilies; ++r) coeffs.set(r, k, c(r - 1));
  }
  return coeffs;
}

/// sum c_{r,k} B_{r,k} as a loop of degree m.
template <typename Real>
TrigMatrixLoop<Real> synthesize(const BasisCoeffs<Real>& coeffs) {
  TrigMatrixLoop<Real> out(2, coeffs.m());
  for (int r = 1; r <= kBasisFamilies; ++r) {
    for (Index k = 0; k <= coeffs.m(); ++k) {
      if (is_fake_slot(r, k) || coeffs(r, k) == 0) continue;
      out = out + coeffs(r, k) * basis_element<Real>(r, k).loop;
    }
  }
  return out;
}

/// e^{lambda c B(t)} = cos(lambda c) I + sin(lambda c) B(t), since B(t)^2 = -I.
template <typename Real>
TrigMatrixLoop<Real> exp_factor(Real c, const BasisElement<Real>& element, Real lambda) {
  const Real angle = lambda * c;
  auto out = std::sin(angle) * element.loop;
  out.coeff(0) += std::cos(angle) * MatrixC<Real>::Identity(2, 2);
  return out;
}

/// One generator of a splitting: c B_{r,k} placed in plane (i, j) of an N x N matrix.
template <typename Real>
struct BasisGenerator {
  PlanePair plane;
  int r = 1;
  Index k = 0;
  Real c = 0;
};

/**
 * su(N)-valued loop written as a sum of su(2) loops lifted into planes:
 * every off-diagonal plane (i, j), with the traceless diagonal spread over
 * the adjacent planes (p, p+1). For N = 2 this is the plain su(2) expansion.
 */
template <typename Real>
struct PairExpansion {
  Index size = 2;
  Index m = 0;
  std::vector<PlanePair> planes;
  std::vector<BasisCoeffs<Real>> coeffs;

  /// Generators in the fixed lexicographic order: plane, then r, then k.
  std::vector<BasisGenerator<Real>> generators() const {
    std::vector<BasisGenerator<Real>> gens;
    gens.reserve(planes.size() * (6 * m + 3));
    for (size_t p = 0; p < planes.size(); ++p) {
      for (int r = 1; r <= kBasisFamilies; ++r) {
        for (Index k = 0; k <= m; ++k) {
          if (is_fake_slot(r, k)) continue;
          gens.push_back({planes[p], r, k, coeffs[p](r, k)});
        }
      }
    }
    return gens;
  }
};

/// Number of non-fake basis slots per plane: 6m + 3.
inline Index basis_dimension(Index m) { return 6 * m + 3; }

/// Per-plane su(2) components whose lifts sum to the input.
template <typename Real>
std::vector<TrigMatrixLoop<Real>> split_into_planes(const TrigMatrixLoop<Real>& algebra_loop) {
  const Index n = algebra_loop.size();
  if (n < 2) throw std::invalid_argument("split_into_planes: size must be >= 2");
  std::vector<TrigMatrixLoop<Real>> parts;
  const Index d = algebra_loop.degree();
  for (const auto plane : all_pairs(n)) {
    const Index i = plane.i - 1, j = plane.j - 1;
    TrigMatrixLoop<Real> part(2, d);
    for (Index k = -d; k <= d; ++k) {
      const auto c = algebra_loop.coeff(k);
      auto out = part.coeff(k);
      out(0, 1) = c(i, j);
      out(1, 0) = c(j, i);
      if (j == i + 1) {
        std::complex<Real> diag = 0;
        for (Index q = 0; q <= i; ++q) diag += c(q, q);
        out(0, 0) = diag;
        out(1, 1) = -diag;
      }
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

template <typename Real>
PairExpansion<Real> expand_pairs(const TrigMatrixLoop<Real>& algebra_loop, Index m) {
  PairExpansion<Real> expansion;
  expansion.size = algebra_loop.size();
  expansion.m = m;
  expansion.planes = all_pairs(algebra_loop.size());
  for (const auto& part : split_into_planes(algebra_loop)) {
    expansion.coeffs.push_back(expand_in_basis(part, m));
  }
  return expansion;
}

template <typename Real>
PairExpansion<Real> as_pair_expansion(const BasisCoeffs<Real>& coeffs) {
  return {2, coeffs.m(), {PlanePair{1, 2}}, {coeffs}};
}

/// One exponential factor in a product: generator index and real multiplier.
struct ProductStep {
  Index generator = 0;
  double weight = 1.0;
};

/**
 * Ordered product of exp(lambda * w * c B) over the given steps, each factor
 * a closed-form polynomial loop embedded into its plane. Factors with zero
 * argument are the identity and are skipped.
 */
template <typename Real>
TrigMatrixLoop<Real> exp_product(const std::vector<BasisGenerator<Real>>& gens, Index size,
                                 std::span<const ProductStep> steps, Real lambda) {
  auto acc = TrigMatrixLoop<Real>::identity(size);
  std::vector<std::optional<BasisElement<Real>>> cache;
  Index max_k = 0;
  for (const auto& g : gens) max_k = std::max(max_k, g.k);
  cache.resize(kBasisFamilies * (max_k + 1));
  for (const auto& step : steps) {
    if (step.generator < 0 || step.generator >= Index(gens.size())) {
      throw std::out_of_range("exp_product: step refers to a missing generator");
    }
    const auto& g = gens[step.generator];
    const Real scale = lambda * Real(step.weight);
    if (g.c == 0 || scale == 0) continue;
    auto& slot = cache[(g.r - 1) * (max_k + 1) + g.k];
    if (!slot) slot = basis_element<Real>(g.r, g.k);
    auto factor = exp_factor(g.c, *slot, scale);
    if (size != 2) factor = embed_T(factor, g.plane, size);
    acc = detail::trim_roundoff(multiply(acc, factor));
  }
  return acc;
}

enum class ProductOrder { Lexicographic, Reversed };

/// prod_{r} prod_{k} e^{lambda c_{r,k} B_{r,k}} in lexicographic (or fully reversed) order.
template <typename Real>
TrigMatrixLoop<Real> ordered_product(const PairExpansion<Real>& expansion, Real lambda,
                                     ProductOrder order = ProductOrder::Lexicographic) {
  const auto gens = expansion.generators();
  std::vector<ProductStep> steps(gens.size());
  for (Index j = 0; j < Index(gens.size()); ++j) steps[j] = {j, 1.0};
  if (order == ProductOrder::Reversed) std::reverse(steps.begin(), steps.end());
  return exp_product(gens, expansion.size, std::span<const ProductStep>(steps), lambda);
}

template <typename Real>
TrigMatrixLoop<Real> ordered_product(const BasisCoeffs<Real>& coeffs, Real lambda,
                                     ProductOrder order = ProductOrder::Lexicographic) {
  return ordered_product(as_pair_expansion(coeffs), lambda, order);
}

}  // namespace loopforge
