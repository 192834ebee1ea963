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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loopforge/classify.hpp"
#include "loopforge/matrix_functions.hpp"
#include "loopforge/splitting.hpp"
#include "test_support.hpp"

using namespace loopforge;
using namespace loopforge::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> logspace(double from, double to, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(std::pow(10.0, from + (to - from) * i / (count - 1)));
  return out;
}

std::vector<MatrixXc> random_generators(std::mt19937_64& rng, Index n, int count, double norm = 1.0) {
  std::vector<MatrixXc> gens;
  for (int j = 0; j < count; ++j) gens.push_back(random_skew(rng, n, norm));
  return gens;
}

// Product of taylor_exp factors following the steps; independent of apply_scheme_matrices.
MatrixXc oracle_apply(const SplittingScheme& scheme, const std::vector<MatrixXc>& gens, double lambda) {
  MatrixXc acc = MatrixXc::Identity(gens[0].rows(), gens[0].cols());
  for (const auto& step : scheme.steps) acc = (acc * taylor_exp(lambda * step.weight * gens[step.generator])).eval();
  return acc;
}

BasisCoeffs<double> random_coeffs(std::mt19937_64& rng, Index m, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  BasisCoeffs<double> c(m);
  for (int r = 1; r <= 6; ++r) {
    for (Index k = 0; k <= m; ++k) {
      if (!is_fake_slot(r, k)) c.set(r, k, u(rng));
    }
  }
  return c;
}

}  // namespace

TEST_CASE("yoshida_coeffs") {
  const auto [a1, b1] = yoshida_coeffs(1);
  CHECK(a1 == doctest::Approx(1.351207).epsilon(1e-6));
  CHECK(b1 == doctest::Approx(-1.702414).epsilon(1e-6));

  const auto [a2, b2] = yoshida_coeffs(2);
  const double root5 = std::pow(2.0, 0.2);
  CHECK(a2 == doctest::Approx(1.0 / (2.0 - root5)).epsilon(1e-15));
  CHECK(b2 == doctest::Approx(-root5 / (2.0 - root5)).epsilon(1e-15));

  for (int s = 1; s <= 8; ++s) {
    const auto [a, b] = yoshida_coeffs(s);
    CHECK(std::abs(2 * a + b - 1.0) <= 1e-14);
  }
  CHECK_THROWS_AS(yoshida_coeffs(0), std::invalid_argument);
}

TEST_CASE("build_scheme examples") {
  const auto phi2 = build_scheme(1, 2);
  REQUIRE(phi2.steps.size() == 3);
  CHECK(phi2.steps[0].generator == 0);
  CHECK(phi2.steps[0].weight == 0.5);
  CHECK(phi2.steps[1].generator == 1);
  CHECK(phi2.steps[1].weight == 1.0);
  CHECK(phi2.steps[2].generator == 0);
  CHECK(phi2.steps[2].weight == 0.5);
  CHECK(phi2.order() == 2);

  const auto phi1 = build_scheme(0, 3);
  REQUIRE(phi1.steps.size() == 3);
  for (Index j = 0; j < 3; ++j) {
    CHECK(phi1.steps[j].generator == j);
    CHECK(phi1.steps[j].weight == 1.0);
  }
  CHECK(phi1.order() == 1);

  const auto phi4 = build_scheme(2, 2);
  CHECK(phi4.steps.size() == 9);
  CHECK(phi4.order() == 4);
  for (double w : weight_totals(phi4)) CHECK(std::abs(w - 1.0) <= 1e-14);

  for (int s = 1; s <= 4; ++s) {
    for (Index j : {1, 2, 5}) {
      Index expected = 2 * j - 1;
      for (int l = 1; l < s; ++l) expected *= 3;
      CHECK(Index(build_scheme(s, j).steps.size()) == expected);
    }
  }

  CHECK(local_error_order(0) == 2);
  CHECK(local_error_order(1) == 3);
  CHECK(local_error_order(2) == 5);
  CHECK(scheme_degree_factor(0) == 6);
  CHECK(scheme_degree_factor(1) == 12);
  CHECK(scheme_degree_factor(3) == 108);

  CHECK_THROWS_AS(build_scheme(-1, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_scheme(1, 0), std::invalid_argument);
}

TEST_CASE("property: palindromic schemes with unit scale sums") {
  for (int s = 0; s <= 4; ++s) {
    for (Index j : {1, 2, 3, 7}) {
      const auto scheme = build_scheme(s, j);
      for (double w : weight_totals(scheme)) REQUIRE(std::abs(w - 1.0) <= 1e-13);
      if (s == 0) continue;
      const Index n = Index(scheme.steps.size());
      for (Index i = 0; i < n; ++i) {
        REQUIRE(scheme.steps[i].generator == scheme.steps[n - 1 - i].generator);
        REQUIRE(scheme.steps[i].weight == scheme.steps[n - 1 - i].weight);
      }
    }
  }
}

TEST_CASE("property: symmetric schemes are time reversible") {
  std::mt19937_64 rng(41);
  for (int s = 1; s <= 4; ++s) {
    for (int trial = 0; trial < 10; ++trial) {
      const Index n = 2 + trial % 3;
      const auto gens = random_generators(rng, n, 2 + trial % 3);
      const auto scheme = build_scheme(s, Index(gens.size()));
      const double lambda = 0.3;
      const MatrixXc forward = apply_scheme_matrices(scheme, gens, lambda);
      const MatrixXc backward = apply_scheme_matrices(scheme, gens, -lambda);
      REQUIRE(spectral(forward * backward - MatrixXc::Identity(n, n)) <= 1e-12);
    }
  }
}

TEST_CASE("apply_scheme_matrices examples") {
  std::mt19937_64 rng(42);
  const auto one = random_generators(rng, 3, 1);
  for (int s = 0; s <= 3; ++s) {
    const auto scheme = build_scheme(s, 1);
    CHECK(spectral(apply_scheme_matrices(scheme, one, 0.7) - taylor_exp(0.7 * one[0])) < 1e-12);
  }

  std::vector<MatrixXc> diag;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int j = 0; j < 4; ++j) {
    const double a = u(rng), b = u(rng);
    MatrixXc d = MatrixXc::Zero(3, 3);
    d(0, 0) = {0, a};
    d(1, 1) = {0, b};
    d(2, 2) = {0, -a - b};
    diag.push_back(d);
  }
  for (int s : {0, 1}) {
    const auto scheme = build_scheme(s, 4);
    CHECK(splitting_error(scheme, diag, 1.3) <= 1e-12);
  }

  const auto pair = random_generators(rng, 2, 2);
  for (int s = 0; s <= 2; ++s) {
    const auto scheme = build_scheme(s, 2);
    CHECK(spectral(apply_scheme_matrices(scheme, pair, 0.4) - oracle_apply(scheme, pair, 0.4)) < 1e-12);
  }
  const double err = splitting_error(build_scheme(1, 2), pair, 1e-2);
  CHECK(err < 1e-5);
  CHECK(err > 1e-8);
  CHECK_THROWS_AS(apply_scheme_matrices(build_scheme(1, 3), pair, 0.1), std::invalid_argument);
}

TEST_CASE("order_study examples") {
  std::mt19937_64 rng(43);
  struct Case {
    int s;
    std::vector<double> lambdas;
    double lo, hi;
  };
  const std::vector<Case> cases = {
      {0, logspace(-1, -3, 9), 1.8, 2.2},
      {1, logspace(-1, -3, 9), 2.7, 3.3},
      {2, logspace(-0.5, -2, 7), 4.6, 5.4},
  };
  for (const auto& c : cases) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto gens = random_generators(rng, 2, 2);
      const auto study = order_study(gens, c.s, c.lambdas);
      INFO("s = " << c.s << ", slope = " << study.slope);
      CHECK(study.slope >= c.lo);
      CHECK(study.slope <= c.hi);
      CHECK(study.rows.size() == c.lambdas.size());
    }
  }

  const auto gens = random_generators(rng, 2, 2);
  CHECK_THROWS_AS(order_study(gens, 1, {5.0, 1.0}), std::invalid_argument);
  std::vector<MatrixXc> commuting = {axis(3), 2.0 * axis(3)};
  CHECK_THROWS_AS(order_study(commuting, 1, {0.1, 0.01}), NumericalError);
}

TEST_CASE("property: order on loops at grid points") {
  std::mt19937_64 rng(44);
  const Index m = 2;
  const auto coeffs = random_coeffs(rng, m, 0.1);
  const auto expansion = as_pair_expansion(coeffs);
  const Index j = Index(expansion.generators().size());
  const auto sum = synthesize(coeffs);

  struct Case {
    int s;
    std::vector<double> lambdas;
    double lo, hi;
  };
  const std::vector<Case> cases = {
      {0, logspace(-1, -3, 9), 1.8, 2.2},
      {1, logspace(-1, -3, 9), 2.7, 3.3},
      {2, logspace(-0.5, -2, 7), 4.6, 5.4},
  };
  for (const auto& c : cases) {
    const auto scheme = build_scheme(c.s, j);
    std::vector<double> xs, ys;
    for (double lambda : c.lambdas) {
      const auto approx = apply_scheme_loops(scheme, expansion, lambda);
      double err = 0;
      for (Index g = 0; g < 16; ++g) {
        const double t = 2 * kPi * double(g) / 16.0;
        err = std::max(err, spectral(eval(approx, t) - taylor_exp(lambda * direct_eval(sum, t))));
      }
      if (err > kRoundoffFloor) {
        xs.push_back(lambda);
        ys.push_back(err);
      }
    }
    REQUIRE(xs.size() >= 4);
    const double slope = loglog_fit(xs, ys).slope;
    INFO("s = " << c.s << ", slope = " << slope);
    CHECK(slope >= c.lo);
    CHECK(slope <= c.hi);
  }
}

TEST_CASE("apply_scheme_loops examples") {
  const auto scheme_for = [](int s, Index m) { return build_scheme(s, basis_dimension(m)); };
  BasisCoeffs<double> zero(3);
  CHECK(sup_distance(apply_scheme_loops(scheme_for(1, 3), zero, 1.0), TrigLoop::identity(2), 32) == 0.0);

  BasisCoeffs<double> single(3);
  single.set(5, 2, 0.9);
  const auto one = apply_scheme_loops(scheme_for(1, 3), single, 1.0);
  CHECK(sup_distance(one, exp_factor(0.9, basis_element(5, 2), 1.0), 64) < 1e-14);

  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 5; ++trial) {
    const auto c = random_coeffs(rng, 4, 1.0);
    const auto q = apply_scheme_loops(scheme_for(1, 4), c, 1.0);
    CHECK(degree_trim(q).degree() <= 48);
    CHECK(classify(q, LoopClass::UnitaryGroup).max_defect() <= 1e-11);
  }
  for (int s : {0, 2, 3}) {
    const auto c = random_coeffs(rng, 2, 1.0);
    const auto q = apply_scheme_loops(scheme_for(s, 2), c, 0.5);
    INFO("s = " << s);
    CHECK(degree_trim(q).degree() <= scheme_degree_factor(s) * 2);
    CHECK(classify(q, LoopClass::UnitaryGroup).max_defect() <= 1e-11);
  }
  CHECK_THROWS_AS(apply_scheme_loops(build_scheme(1, 4), zero, 1.0), std::invalid_argument);
}

TEST_CASE("suzuki_bound") {
  std::mt19937_64 rng(46);
  CHECK(suzuki_bound(random_generators(rng, 2, 1)) == 0.0);

  std::vector<MatrixXc> commuting = {axis(3), -0.5 * axis(3), 2.0 * axis(3)};
  CHECK(suzuki_bound(commuting) < 1e-15);

  // Hand value: [[X1,X2],X2] = [2 X3, X2] = -4 X1 and [[X1,X2],X1] = 4 X2 (norm 4 each).
  std::vector<MatrixXc> pair = {axis(1), axis(2)};
  CHECK(suzuki_bound(pair) == doctest::Approx((4.0 + 2.0) / 12.0));

  const auto triple = random_generators(rng, 2, 3);
  const double lambda = 0.1;
  const double bound = std::pow(lambda, 3) * suzuki_bound(triple);
  CHECK(splitting_error(build_scheme(1, 3), triple, lambda) <= bound + 1e-12);
}

TEST_CASE("property: Suzuki domination") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> count(2, 4);
  std::uniform_real_distribution<double> scale(0.2, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto gens = random_generators(rng, 2, count(rng), scale(rng));
    const double delta = suzuki_bound(gens);
    const auto scheme = build_scheme(1, Index(gens.size()));
    for (double lambda : {0.05, 0.1, 0.2}) {
      const double err = splitting_error(scheme, gens, lambda);
      INFO("trial " << trial << " lambda " << lambda);
      REQUIRE(err <= std::pow(lambda, 3) * delta + 1e-12);
    }
  }
}
