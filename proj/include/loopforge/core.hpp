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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopforge {

using Index = Eigen::Index;

template <typename Real>
using MatrixC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using MatrixXc = MatrixC<double>;

/// Raised when a principal logarithm would have to cross the branch cut at -1.
class BranchCutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation cannot deliver its numerical guarantee.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Real>
constexpr Real two_pi() {
  return Real(2) * std::numbers::pi_v<Real>;
}

/// Angle of the g-th point of a uniform grid of length G on the circle.
template <typename Real>
Real grid_angle(Index g, Index grid_length) {
  return two_pi<Real>() * Real(g) / Real(grid_length);
}

/// Spectral norm (largest singular value).
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Plain> svd(a.derived().eval());
  return svd.singularValues()(0);
}

template <typename Derived>
bool is_exactly_zero(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return (a.array() == Scalar(0)).all();
}

/// Skew-Hermitian part (X - X^H) / 2.
template <typename Derived>
typename Derived::PlainObject skew_part(const Eigen::MatrixBase<Derived>& x) {
  using Real = typename Derived::RealScalar;
  return (x - x.adjoint()) * Real(0.5);
}

inline Index next_pow2(Index v) {
  Index p = 1;
  while (p < v) p <<= 1;
  return p;
}

inline bool is_pow2(Index v) { return v > 0 && (v & (v - 1)) == 0; }

/// Ordinary least-squares fit y = intercept + slope * x.
struct LinearFit {
  double slope = 0;
  double intercept = 0;
  /// Standard error of the slope; zero when fewer than three points.
  double slope_stderr = 0;
};

inline LinearFit least_squares_line(std::span<const double> x,
                                    std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares_line: need >= 2 paired points");
  }
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("least_squares_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
  }
  return fit;
}

/// Slope of log(y) against log(x).
inline LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares_line(lx, ly);
}

}  // namespace loopforge
