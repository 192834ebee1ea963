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

#include <cstdint>
#include <random>

#include "loopforge/trig_loop.hpp"

namespace loopforge {

/// Smoothness dial for synthetic test loops.
struct SmoothnessSpec {
  double alpha = 2.0;
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  Index max_degree = 256;
};

/// Fourier partial sum S_j: truncation to frequencies |k| <= j.
template <typename Real>
TrigMatrixLoop<Real> partial_sum(const TrigMatrixLoop<Real>& loop, Index j) {
  if (j < 0) throw std::invalid_argument("partial_sum: degree must be non-negative");
  return loop.with_degree(j);
}

template <typename Real>
TrigMatrixLoop<Real> partial_sum(const GridLoop<Real>& grid, Index j) {
  return analyze(grid, j);
}

/// Lower end h = ceil(m/2) of the averaging window [h, m].
inline Index vp_window_start(Index m) { return (m + 1) / 2; }

/**
 * Multiplier of frequency k in V_m = (1/(m-h+1)) sum_{j=h}^{m} S_j: one for
 * |k| <= h, then a linear ramp down to 1/(m-h+1) at |k| = m.
 */
inline double vp_weight(Index k, Index m) {
  const Index a = k < 0 ? -k : k;
  const Index h = vp_window_start(m);
  if (a <= h) return 1.0;
  if (a > m) return 0.0;
  return double(m - a + 1) / double(m - h + 1);
}

/// de la Vallee Poussin mean of degree m, applied entrywise.
template <typename Real>
TrigMatrixLoop<Real> vp_mean(const TrigMatrixLoop<Real>& loop, Index m) {
  if (m < 0) throw std::invalid_argument("vp_mean: degree must be non-negative");
  auto out = loop.with_degree(m);
  for (Index k = -m; k <= m; ++k) out.coeff(k) *= Real(vp_weight(k, m));
  return out;
}

template <typename Real>
TrigMatrixLoop<Real> vp_mean(const GridLoop<Real>& grid, Index m) {
  return vp_mean(analyze(grid, m), m);
}

/**
 * Skew-Hermitian, traceless-valued loop with ||C_k|| = amplitude (1+|k|)^-(alpha+1)
 * and seeded random coefficient directions; C_{-k} = -C_k^H.
 */
template <typename Real = double>
TrigMatrixLoop<Real> synth_lip_su_loop(const SmoothnessSpec& spec, Index size) {
  using Scalar = std::complex<Real>;
  using Matrix = MatrixC<Real>;
  if (!(spec.alpha > 0)) throw std::invalid_argument("synth_lip_su_loop: alpha must be positive");
  if (spec.max_degree < 1) throw std::invalid_argument("synth_lip_su_loop: max_degree must be >= 1");
  if (size < 2) throw std::invalid_argument("synth_lip_su_loop: size must be >= 2");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<Real> normal(0, 1);
  auto gaussian = [&] {
    Matrix d(size, size);
    for (Index j = 0; j < size; ++j) {
      for (Index i = 0; i < size; ++i) d(i, j) = Scalar(normal(rng), normal(rng));
    }
    d -= (d.trace() / Real(size)) * Matrix::Identity(size, size);
    return d;
  };
  auto scaled = [](const Matrix& d, Real target) -> Matrix {
    const Real norm = operator_norm(d);
    return norm > 0 ? Matrix(d * (target / norm)) : Matrix(d);
  };

  TrigMatrixLoop<Real> loop(size, spec.max_degree);
  const Real amplitude = Real(spec.amplitude);
  loop.coeff(0) = scaled(skew_part(gaussian()), amplitude);
  for (Index k = 1; k <= spec.max_degree; ++k) {
    const Real target = amplitude * std::pow(Real(1 + k), -Real(spec.alpha + 1));
    const Matrix c = scaled(gaussian(), target);
    loop.coeff(k) = c;
    loop.coeff(-k) = -c.adjoint();
  }
  return loop;
}

}  // namespace loopforge
