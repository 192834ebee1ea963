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

#include "loopforge/trig_loop.hpp"

namespace loopforge {

/// Index pair (i, j) with 1 <= i < j <= N, one-based.
struct PlanePair {
  Index i = 1;
  Index j = 2;
  friend bool operator==(const PlanePair&, const PlanePair&) = default;
};

inline void check_pair(PlanePair p, Index n) {
  if (!(1 <= p.i && p.i < p.j && p.j <= n)) {
    throw std::invalid_argument("plane pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                                ") out of range for size " + std::to_string(n));
  }
}

/// All pairs (i, j), i < j, in lexicographic order.
inline std::vector<PlanePair> all_pairs(Index n) {
  std::vector<PlanePair> pairs;
  for (Index i = 1; i <= n; ++i) {
    for (Index j = i + 1; j <= n; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

namespace detail {

template <typename Src, typename Dst>
void place_block(const Src& a, PlanePair p, Dst&& out) {
  const Index i = p.i - 1, j = p.j - 1;
  out(i, i) = a(0, 0);
  out(i, j) = a(0, 1);
  out(j, i) = a(1, 0);
  out(j, j) = a(1, 1);
}

}  // namespace detail

/**
 * Group embedding of a 2x2 matrix into rows/columns (i, j) of the N x N
 * identity. This is a homomorphism SU(2) -> SU(N).
 */
template <typename Real>
MatrixC<Real> embed_T(const MatrixC<Real>& a, PlanePair p, Index n) {
  if (a.rows() != 2 || a.cols() != 2) throw std::invalid_argument("embed_T: expected a 2x2 matrix");
  check_pair(p, n);
  MatrixC<Real> out = MatrixC<Real>::Identity(n, n);
  detail::place_block(a, p, out);
  return out;
}

template <typename Real>
TrigMatrixLoop<Real> embed_T(const TrigMatrixLoop<Real>& a, PlanePair p, Index n) {
  if (a.size() != 2) throw std::invalid_argument("embed_T: expected a loop of size 2");
  check_pair(p, n);
  TrigMatrixLoop<Real> out(n, a.degree());
  for (Index k = -a.degree(); k <= a.degree(); ++k) {
    if (k == 0) out.coeff(0).setIdentity();
    detail::place_block(a.coeff(k), p, out.coeff(k));
  }
  return out;
}

/// Zero-padded (Lie algebra) counterpart of embed_T; linear in a.
template <typename Real>
MatrixC<Real> lift_pair(const MatrixC<Real>& a, PlanePair p, Index n) {
  if (a.rows() != 2 || a.cols() != 2) throw std::invalid_argument("lift_pair: expected a 2x2 matrix");
  check_pair(p, n);
  MatrixC<Real> out = MatrixC<Real>::Zero(n, n);
  detail::place_block(a, p, out);
  return out;
}

template <typename Real>
TrigMatrixLoop<Real> lift_pair(const TrigMatrixLoop<Real>& a, PlanePair p, Index n) {
  if (a.size() != 2) throw std::invalid_argument("lift_pair: expected a loop of size 2");
  check_pair(p, n);
  TrigMatrixLoop<Real> out(n, a.degree());
  for (Index k = -a.degree(); k <= a.degree(); ++k) detail::place_block(a.coeff(k), p, out.coeff(k));
  return out;
}

}  // namespace loopforge
