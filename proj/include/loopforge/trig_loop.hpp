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

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <string>
#include <vector>

#include "loopforge/core.hpp"

namespace loopforge {

/// Relative tolerance used to report a tight degree.
inline constexpr double kDefaultTrimTolerance = 1e-10;

/// Relative tolerance for discarding roundoff tails inside long products.
inline constexpr double kRoundoffTrimTolerance = 1e-14;

/**
 * Matrix-valued trigonometric polynomial t -> sum_{k=-d}^{d} C_k e^{ikt}.
 *
 * The coefficient blocks are packed side by side in one N x N(2d+1) matrix;
 * block k sits at column offset N(k+d). Values are immutable once built
 * except through coeff(), which is how the free functions below assemble
 * their results.
 */
template <typename Real>
class TrigMatrixLoop {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = MatrixC<Real>;

  TrigMatrixLoop() : TrigMatrixLoop(1, 0) {}

  TrigMatrixLoop(Index size, Index degree)
      : size_(size), degree_(degree), coeffs_(Matrix::Zero(size, size * (2 * degree + 1))) {
    if (size < 1) throw std::invalid_argument("TrigMatrixLoop: size must be positive");
    if (degree < 0) throw std::invalid_argument("TrigMatrixLoop: degree must be non-negative");
  }

  static TrigMatrixLoop constant(const Matrix& value) {
    if (value.rows() != value.cols()) {
      throw std::invalid_argument("TrigMatrixLoop::constant: matrix must be square");
    }
    TrigMatrixLoop loop(value.rows(), 0);
    loop.coeff(0) = value;
    return loop;
  }

  static TrigMatrixLoop identity(Index size) { return constant(Matrix::Identity(size, size)); }

  Index size() const { return size_; }
  Index degree() const { return degree_; }

  auto coeff(Index k) {
    check_frequency(k);
    return coeffs_.middleCols(size_ * (k + degree_), size_);
  }
  auto coeff(Index k) const {
    check_frequency(k);
    return coeffs_.middleCols(size_ * (k + degree_), size_);
  }

  /// Coefficient k, or zero outside the stored range.
  Matrix coeff_or_zero(Index k) const {
    if (k < -degree_ || k > degree_) return Matrix::Zero(size_, size_);
    return coeff(k);
  }

  const Matrix& packed() const { return coeffs_; }

  Matrix operator()(Real t) const {
    Matrix value = Matrix::Zero(size_, size_);
    for (Index k = -degree_; k <= degree_; ++k) {
      value += coeff(k) * std::polar(Real(1), Real(k) * t);
    }
    return value;
  }

  /// Same loop stored with a different (larger or smaller) coefficient range.
  TrigMatrixLoop with_degree(Index degree) const {
    TrigMatrixLoop out(size_, degree);
    const Index d = std::min(degree, degree_);
    for (Index k = -d; k <= d; ++k) out.coeff(k) = coeff(k);
    return out;
  }

 private:
  void check_frequency(Index k) const {
    if (k < -degree_ || k > degree_) {
      throw std::out_of_range("TrigMatrixLoop: frequency " + std::to_string(k) +
                              " outside degree " + std::to_string(degree_));
    }
  }

  Index size_;
  Index degree_;
  Matrix coeffs_;
};

/// Loop sampled at t_g = 2*pi*g/G, g = 0..G-1.
template <typename Real>
class GridLoop {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = MatrixC<Real>;

  GridLoop() : GridLoop(1, 1) {}

  GridLoop(Index size, Index length)
      : size_(size), length_(length), samples_(Matrix::Zero(size, size * length)) {
    if (size < 1) throw std::invalid_argument("GridLoop: size must be positive");
    if (length < 1) throw std::invalid_argument("GridLoop: grid length must be positive");
  }

  Index size() const { return size_; }
  Index length() const { return length_; }
  Real angle(Index g) const { return grid_angle<Real>(g, length_); }

  auto at(Index g) { return samples_.middleCols(size_ * g, size_); }
  auto at(Index g) const { return samples_.middleCols(size_ * g, size_); }

  const Matrix& packed() const { return samples_; }

 private:
  Index size_;
  Index length_;
  Matrix samples_;
};

using TrigLoop = TrigMatrixLoop<double>;
using Grid = GridLoop<double>;

template <typename Real>
MatrixC<Real> eval(const TrigMatrixLoop<Real>& loop, Real t) {
  return loop(t);
}

/// Largest spectral norm among the coefficient blocks.
template <typename Real>
Real max_coeff_norm(const TrigMatrixLoop<Real>& loop) {
  Real best = 0;
  for (Index k = -loop.degree(); k <= loop.degree(); ++k) {
    best = std::max(best, operator_norm(loop.coeff(k)));
  }
  return best;
}

/**
 * Drops the outermost coefficient pairs C_{+-d} while both have spectral norm
 * <= rel_tol * (largest coefficient norm). The result has tight degree.
 */
template <typename Real>
TrigMatrixLoop<Real> degree_trim(const TrigMatrixLoop<Real>& loop,
                                 Real rel_tol = Real(kDefaultTrimTolerance)) {
  if (!(rel_tol > 0)) throw std::invalid_argument("degree_trim: rel_tol must be positive");
  const Real threshold = rel_tol * max_coeff_norm(loop);
  Index d = loop.degree();
  while (d > 0 && operator_norm(loop.coeff(d)) <= threshold &&
         operator_norm(loop.coeff(-d)) <= threshold) {
    --d;
  }
  return d == loop.degree() ? loop : loop.with_degree(d);
}

namespace detail {

// Frobenius-norm variant of degree_trim for intermediate products; it only
// removes what degree_trim at a looser tolerance would remove anyway.
template <typename Real>
TrigMatrixLoop<Real> trim_roundoff(const TrigMatrixLoop<Real>& loop,
                                   Real rel_tol = Real(kRoundoffTrimTolerance)) {
  Real max_sq = 0;
  for (Index k = -loop.degree(); k <= loop.degree(); ++k) {
    max_sq = std::max(max_sq, loop.coeff(k).squaredNorm());
  }
  const Real threshold_sq = rel_tol * rel_tol * max_sq;
  Index d = loop.degree();
  while (d > 0 && loop.coeff(d).squaredNorm() <= threshold_sq &&
         loop.coeff(-d).squaredNorm() <= threshold_sq) {
    --d;
  }
  return d == loop.degree() ? loop : loop.with_degree(d);
}

template <typename Real>
std::vector<Index> nonzero_frequencies(const TrigMatrixLoop<Real>& loop) {
  std::vector<Index> ks;
  for (Index k = -loop.degree(); k <= loop.degree(); ++k) {
    if (!is_exactly_zero(loop.coeff(k))) ks.push_back(k);
  }
  return ks;
}

}  // namespace detail

/// Pointwise product, computed exactly as the convolution of the coefficient sequences.
template <typename Real>
TrigMatrixLoop<Real> multiply(const TrigMatrixLoop<Real>& a, const TrigMatrixLoop<Real>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("multiply: size mismatch");
  TrigMatrixLoop<Real> out(a.size(), a.degree() + b.degree());
  const auto ka_list = detail::nonzero_frequencies(a);
  const auto kb_list = detail::nonzero_frequencies(b);
  for (Index kb : kb_list) {
    const auto bk = b.coeff(kb);
    for (Index ka : ka_list) {
      out.coeff(ka + kb).noalias() += a.coeff(ka).lazyProduct(bk);
    }
  }
  return out;
}

template <typename Real>
TrigMatrixLoop<Real> operator*(const TrigMatrixLoop<Real>& a, const TrigMatrixLoop<Real>& b) {
  return multiply(a, b);
}

template <typename Real>
TrigMatrixLoop<Real> operator*(const MatrixC<Real>& c, const TrigMatrixLoop<Real>& a) {
  TrigMatrixLoop<Real> out(a.size(), a.degree());
  for (Index k = -a.degree(); k <= a.degree(); ++k) out.coeff(k).noalias() = c * a.coeff(k);
  return out;
}

template <typename Real>
TrigMatrixLoop<Real> operator*(const TrigMatrixLoop<Real>& a, const MatrixC<Real>& c) {
  TrigMatrixLoop<Real> out(a.size(), a.degree());
  for (Index k = -a.degree(); k <= a.degree(); ++k) out.coeff(k).noalias() = a.coeff(k) * c;
  return out;
}

template <typename Real>
TrigMatrixLoop<Real> operator*(std::complex<Real> s, const TrigMatrixLoop<Real>& a) {
  TrigMatrixLoop<Real> out(a.size(), a.degree());
  for (Index k = -a.degree(); k <= a.degree(); ++k) out.coeff(k) = s * a.coeff(k);
  return out;
}

template <typename Real>
TrigMatrixLoop<Real> operator*(Real s, const TrigMatrixLoop<Real>& a) {
  return std::complex<Real>(s) * a;
}

template <typename Real>
TrigMatrixLoop<Real> operator+(const TrigMatrixLoop<Real>& a, const TrigMatrixLoop<Real>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("operator+: size mismatch");
  auto out = a.with_degree(std::max(a.degree(), b.degree()));
  for (Index k = -b.degree(); k <= b.degree(); ++k) out.coeff(k) += b.coeff(k);
  return out;
}

template <typename Real>
TrigMatrixLoop<Real> operator-(const TrigMatrixLoop<Real>& a, const TrigMatrixLoop<Real>& b) {
  return a + Real(-1) * b;
}

/// Pointwise conjugate transpose: t -> a(t)^H.
template <typename Real>
TrigMatrixLoop<Real> adjoint(const TrigMatrixLoop<Real>& a) {
  TrigMatrixLoop<Real> out(a.size(), a.degree());
  for (Index k = -a.degree(); k <= a.degree(); ++k) out.coeff(k) = a.coeff(-k).adjoint();
  return out;
}

/// a^power by repeated squaring, with roundoff tails trimmed after each product.
template <typename Real>
TrigMatrixLoop<Real> power(const TrigMatrixLoop<Real>& a, Index exponent) {
  if (exponent < 0) throw std::invalid_argument("power: negative exponent");
  auto result = TrigMatrixLoop<Real>::identity(a.size());
  auto base = a;
  while (exponent > 0) {
    if (exponent & 1) result = detail::trim_roundoff(multiply(result, base));
    exponent >>= 1;
    if (exponent > 0) base = detail::trim_roundoff(multiply(base, base));
  }
  return result;
}

/// Samples the loop on a uniform grid of the given length (exact aliasing fold + inverse DFT).
template <typename Real>
GridLoop<Real> sample(const TrigMatrixLoop<Real>& loop, Index grid_length) {
  using Scalar = std::complex<Real>;
  const Index n = loop.size();
  GridLoop<Real> grid(n, grid_length);
  Eigen::FFT<Real> fft;
  fft.SetFlag(Eigen::FFT<Real>::Unscaled);
  std::vector<Scalar> folded(grid_length), values(grid_length);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      std::fill(folded.begin(), folded.end(), Scalar(0));
      for (Index k = -loop.degree(); k <= loop.degree(); ++k) {
        const Index slot = ((k % grid_length) + grid_length) % grid_length;
        folded[slot] += loop.coeff(k)(i, j);
      }
      fft.inv(values, folded);
      for (Index g = 0; g < grid_length; ++g) grid.at(g)(i, j) = values[g];
    }
  }
  return grid;
}

/**
 * Discrete Fourier analysis: the degree-d loop whose coefficients are the
 * DFT coefficients of the samples. Exact for samples of a loop of degree <= d.
 */
template <typename Real>
TrigMatrixLoop<Real> analyze(const GridLoop<Real>& grid, Index degree) {
  using Scalar = std::complex<Real>;
  if (degree < 0) throw std::invalid_argument("analyze: degree must be non-negative");
  const Index G = grid.length();
  if (G < 2 * degree + 1) {
    throw std::invalid_argument("analyze: grid length " + std::to_string(G) +
                                " aliases degree " + std::to_string(degree));
  }
  const Index n = grid.size();
  TrigMatrixLoop<Real> loop(n, degree);
  Eigen::FFT<Real> fft;
  std::vector<Scalar> values(G), spectrum(G);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index g = 0; g < G; ++g) values[g] = grid.at(g)(i, j);
      fft.fwd(spectrum, values);
      for (Index k = -degree; k <= degree; ++k) {
        loop.coeff(k)(i, j) = spectrum[(k + G) % G] / Real(G);
      }
    }
  }
  return loop;
}

/// max_g || a(t_g) - b(t_g) ||_2 over a shared grid.
template <typename Real>
Real sup_distance(const GridLoop<Real>& a, const GridLoop<Real>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: size mismatch");
  if (a.length() != b.length()) throw std::invalid_argument("sup_distance: grid length mismatch");
  Real best = 0;
  for (Index g = 0; g < a.length(); ++g) {
    best = std::max(best, operator_norm(a.at(g) - b.at(g)));
  }
  return best;
}

template <typename Real>
Real sup_distance(const TrigMatrixLoop<Real>& a, const GridLoop<Real>& b) {
  return sup_distance(sample(a, b.length()), b);
}

template <typename Real>
Real sup_distance(const GridLoop<Real>& a, const TrigMatrixLoop<Real>& b) {
  return sup_distance(b, a);
}

template <typename Real>
Real sup_distance(const TrigMatrixLoop<Real>& a, const TrigMatrixLoop<Real>& b, Index grid_length) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: size mismatch");
  return sup_distance(sample(a - b, grid_length), GridLoop<Real>(a.size(), grid_length));
}

/// Smallest power-of-two grid with at least `factor * (degree + 1)` points.
inline Index measurement_grid(Index degree, Index factor = 8, Index minimum = 64) {
  return next_pow2(std::max(minimum, factor * (degree + 1)));
}

}  // namespace loopforge
