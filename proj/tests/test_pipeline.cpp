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

#include "loopforge/pipeline.hpp"
#include "test_support.hpp"

using namespace loopforge;
using namespace loopforge::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;

FactoredLoop<double> single_factor(const TrigLoop& a) {
  FactoredLoop<double> f;
  f.size = a.size();
  f.factors.push_back({MatrixXc::Identity(a.size(), a.size()), a, std::nullopt});
  return f;
}

ApproxPlan manual_plan(int s, Index m, Index M) {
  ApproxPlan plan;
  plan.s = s;
  plan.m = m;
  plan.M = M;
  plan.n = plan.degree_bound();
  plan.feasible = true;
  return plan;
}

// Random SU(n) matrix via the exponential of a random traceless skew matrix.
MatrixXc random_su(std::mt19937_64& rng, Index n) { return taylor_exp(random_skew(rng, n, 2.0)); }

// Pieces needed so each homotopy step moves at most max_step.
Index expected_pieces(const Grid& exponent, double max_step) {
  double sup = 0;
  for (Index g = 0; g < exponent.length(); ++g) sup = std::max(sup, spectral(exponent.at(g)));
  return std::max<Index>(1, Index(std::ceil(sup / (2.0 * std::asin(max_step / 2.0)))));
}

double grid_sup(const Grid& a, const Grid& b) {
  double worst = 0;
  for (Index g = 0; g < a.length(); ++g) worst = std::max(worst, spectral(a.at(g) - b.at(g)));
  return worst;
}

}  // namespace

TEST_CASE("plan_parameters examples") {
  const auto small = plan_parameters(4, 2.0, 0.5, 1);
  CHECK_FALSE(small.feasible);
  CHECK(small.s == 3);

  const auto p = plan_parameters(1024, 2.0, 1.0, 1);
  CHECK(p.feasible);
  CHECK(p.s == 1);
  CHECK(p.M == 2);
  CHECK(p.m == 42);
  CHECK(p.degree_bound() == 1008);

  CHECK(splitting_level_for(2.0, 0.5) == 3);
  CHECK(splitting_level_for(2.0, 1.0) == 1);
  CHECK(splitting_level_for(3.0, 1.0) == 3);

  const auto forced = plan_parameters(1024, 2.0, 1.0, 1, 2);
  CHECK(forced.s == 2);
  CHECK(forced.degree_bound() <= 1024);

  CHECK_THROWS_AS(plan_parameters(100, 1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(plan_parameters(100, 2.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(plan_parameters(100, 2.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("property: plan invariants") {
  for (Index n = 0; n <= 5000; n += 37) {
    for (double alpha : {1.1, 2.0, 3.5}) {
      for (double eps : {0.25, 1.0, 2.0}) {
        for (Index l : {1, 3}) {
          const auto p = plan_parameters(n, alpha, eps, l);
          REQUIRE(alpha * alpha / (alpha + 2.0 * p.s) <= eps);
          if (p.s > 1) REQUIRE(alpha * alpha / (alpha + 2.0 * (p.s - 1)) > eps);
          if (p.feasible) {
            REQUIRE(p.M >= 1);
            REQUIRE(p.m >= 1);
            REQUIRE(p.degree_bound() <= n);
          }
        }
      }
    }
  }
}

TEST_CASE("homotopy_factorize examples") {
  std::mt19937_64 rng(51);
  const Index G = 256;

  SUBCASE("small exponent gives one factor") {
    auto a = random_algebra_loop(rng, 2, 3);
    a = (0.4 / sup_distance(a, TrigLoop(2, 0), 1024)) * a;
    const auto u = exp_samples(a, G);
    const auto f = homotopy_factorize(u, 0.5);
    REQUIRE(f.factors.size() == 1);
    const auto& a1 = std::get<Grid>(f.factors[0].exponent);
    CHECK(grid_sup(a1, sample(a, G)) < 1e-10);
  }
  SUBCASE("identity") {
    Grid u(2, G);
    for (Index g = 0; g < G; ++g) u.at(g).setIdentity();
    const auto f = homotopy_factorize(u);
    REQUIRE(f.factors.size() == 1);
    CHECK(grid_sup(std::get<Grid>(f.factors[0].exponent), Grid(2, G)) == 0.0);
  }
  SUBCASE("branch cut") {
    Grid u(2, 64);
    for (Index g = 0; g < 64; ++g) {
      const double t = u.angle(g);
      u.at(g) << std::polar(1.0, t), 0, 0, std::polar(1.0, -t);
    }
    CHECK_THROWS_AS(homotopy_factorize(u), BranchCutError);
  }
  SUBCASE("large exponent splits and reconstructs") {
    for (Index n : {2, 3}) {
      auto a = random_algebra_loop(rng, n, 4);
      a = (2.5 / sup_distance(a, TrigLoop(n, 0), 1024)) * a;
      const auto u = exp_samples(a, G);
      const auto f = homotopy_factorize(u, 0.5);
      CHECK(Index(f.factors.size()) == expected_pieces(sample(a, G), 0.5));
      CHECK(f.factors.size() >= 2);
      CHECK(grid_sup(reconstruct(f, G), u) <= 1e-9);
      for (const auto& factor : f.factors) {
        const auto& ak = std::get<Grid>(factor.exponent);
        double worst = 0;
        for (Index g = 0; g < G; ++g) worst = std::max(worst, spectral(taylor_exp(ak.at(g)) - MatrixXc::Identity(n, n)));
        CHECK(worst <= 0.5 + 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(homotopy_factorize(Grid(2, 8), 1.5), std::invalid_argument);
}

TEST_CASE("approximate_factor examples") {
  const auto zero = approximate_factor(ExponentLoop<double>(TrigLoop(2, 3)), manual_plan(1, 2, 3));
  CHECK(sup_distance(zero, TrigLoop::identity(2), 32) == 0.0);

  const auto constant = TrigLoop::constant(MatrixXc(0.3 * axis(3)));
  const auto p = approximate_factor(ExponentLoop<double>(constant), manual_plan(1, 1, 4));
  CHECK(sup_distance(p, TrigLoop::constant(taylor_exp(0.3 * axis(3))), 64) <= 1e-8);

  const auto a = synth_lip_su_loop(SmoothnessSpec{2.0, 1.0, 7, 256}, 2);
  const auto plan = plan_parameters(1024, 2.0, 1.0, 1);
  const auto q = approximate_factor(ExponentLoop<double>(a), plan);
  CHECK(q.degree() <= plan.degree_bound());
  CHECK(classify(q, LoopClass::UnitaryGroup).max_defect() <= 1e-10);
  const double err = sup_distance(q, exp_samples(a, 4096));
  CHECK(std::isfinite(err));
  CHECK(err < 0.1);

  const auto g = approximate_factor(ExponentLoop<double>(sample(a, 1024)), plan);
  CHECK(sup_distance(g, q, 4096) < 1e-9);

  ApproxPlan bad;
  CHECK_THROWS_AS(approximate_factor(ExponentLoop<double>(a), bad), NumericalError);
}

TEST_CASE("property: per-factor splitting rate in M") {
  const auto a = synth_lip_su_loop(SmoothnessSpec{2.0, 1.0, 8, 64}, 2);
  const Index m = 6;
  const auto exact = exp_samples(vp_mean(a, m), 1024);
  for (int s : {1, 2}) {
    std::vector<double> ms, errs;
    for (Index M : {2, 4, 8, 16, 32}) {
      const auto p = approximate_factor(ExponentLoop<double>(a), manual_plan(s, m, M));
      ms.push_back(double(M));
      errs.push_back(sup_distance(p, exact));
    }
    const double slope = loglog_fit(ms, errs).slope;
    INFO("s = " << s << ", slope = " << slope);
    CHECK(slope <= -2.0 * s + 0.3);
  }
}

TEST_CASE("assemble examples") {
  std::mt19937_64 rng(52);
  SUBCASE("single factor") {
    const MatrixXc u0 = random_su(rng, 2);
    const auto a = random_algebra_loop(rng, 2, 2, 0.3);
    FactoredLoop<double> f;
    f.size = 2;
    f.factors.push_back({u0, a, std::nullopt});
    const auto p1 = approximate_factor(ExponentLoop<double>(a), manual_plan(1, 2, 2));
    CHECK(sup_distance(assemble(f, {p1}), u0 * p1, 64) < 1e-13);
  }
  SUBCASE("exact factors reproduce the product") {
    const MatrixXc u0 = random_su(rng, 2);
    FactoredLoop<double> f;
    f.size = 2;
    const auto exact = TrigLoop::constant(taylor_exp(0.7 * axis(1)));
    f.factors.push_back({u0, TrigLoop::constant(MatrixXc(0.7 * axis(1))), std::nullopt});
    CHECK(grid_sup(sample(assemble(f, {exact}), 64), reconstruct(f, 64)) <= 1e-9);
  }
  SUBCASE("su(3) with three embedded factors") {
    FactoredLoop<double> f;
    f.size = 3;
    std::vector<TrigLoop> per;
    std::vector<double> errs;
    for (const auto plane : all_pairs(3)) {
      const auto a = random_algebra_loop(rng, 2, 3, 0.3);
      f.factors.push_back({random_su(rng, 3), a, plane});
      per.push_back(approximate_factor(ExponentLoop<double>(a), manual_plan(1, 2, 2)));
      errs.push_back(sup_distance(per.back(), exp_samples(a, 512)));
    }
    const auto p = assemble(f, per);
    const double total = sup_distance(p, reconstruct(f, 512));
    CHECK(total <= 3.0 * *std::max_element(errs.begin(), errs.end()) * (1 + 1e-9));
    CHECK(classify(p, LoopClass::UnitaryGroup).max_defect() <= 1e-10);
  }
  SUBCASE("errors") {
    FactoredLoop<double> f;
    f.size = 3;
    f.factors.push_back({MatrixXc::Identity(3, 3), TrigLoop(2, 0), PlanePair{1, 4}});
    CHECK_THROWS_AS(assemble(f, {TrigLoop::identity(2)}), std::invalid_argument);
    f.factors[0].plane = PlanePair{1, 2};
    CHECK_THROWS_AS(assemble(f, {TrigLoop::identity(3)}), std::invalid_argument);
    CHECK_THROWS_AS(assemble(f, {}), std::invalid_argument);
  }
}

TEST_CASE("approximate_loop examples") {
  std::mt19937_64 rng(53);
  SUBCASE("self approximation of a polynomial exponent") {
    const auto a = random_algebra_loop(rng, 2, 2, 0.2);
    ApproxOptions opt;
    opt.n = 2048;
    const auto r = approximate_loop(single_factor(a), opt);
    CHECK(r.report.plan.feasible);
    CHECK(r.report.degree <= 2048);
    // The mean reproduces a, so only the splitting error remains: at most Delta(t) / M^2.
    const auto gens = expand_pairs(a, r.report.plan.m).generators();
    const double M = double(r.report.plan.M);
    for (Index g = 0; g < 128; ++g) {
      const double t = 2 * kPi * double(g) / 128.0;
      std::vector<MatrixXc> at_t;
      for (const auto& gen : gens) {
        if (gen.c != 0) at_t.push_back(gen.c * eval(basis_element(gen.r, gen.k).loop, t));
      }
      const double err = spectral(eval(r.loop, t) - taylor_exp(direct_eval(a, t)));
      REQUIRE(err <= suzuki_bound(at_t) / (M * M) + 1e-12);
    }
    CHECK(r.report.unitarity_defect <= 1e-9);
    CHECK(r.report.det_defect <= 1e-9);
  }
  SUBCASE("fallback below the feasibility threshold") {
    const auto a = random_algebra_loop(rng, 2, 3, 1.0);
    ApproxOptions opt;
    opt.n = 8;
    const auto r = approximate_loop(single_factor(a), opt);
    CHECK_FALSE(r.report.plan.feasible);
    CHECK(r.report.degree == 0);
    CHECK(sup_distance(r.loop, TrigLoop::identity(2), 16) == 0.0);
    CHECK(r.report.sup_error <= 2.0);
    CHECK(r.report.factor_errors.empty());
  }
  SUBCASE("su(3) full-size factor and factor-error law") {
    const auto a = synth_lip_su_loop(SmoothnessSpec{2.0, 0.8, 9, 128}, 3);
    ApproxOptions opt;
    opt.n = 1024;
    const auto r = approximate_loop(single_factor(a), opt);
    CHECK(r.report.plan.factors == 3);
    CHECK(r.report.degree <= 1024);
    CHECK(r.report.unitarity_defect <= 1e-9);
    CHECK(r.report.det_defect <= 1e-9);
    CHECK(r.report.sup_error <= r.report.factor_errors[0] * (1 + 1e-9));
    CHECK(r.report.sup_error < 0.5);
  }
  SUBCASE("raw grid input") {
    auto a = random_algebra_loop(rng, 2, 3);
    a = (2.0 / sup_distance(a, TrigLoop(2, 0), 1024)) * a;
    const auto u = exp_samples(a, 4096);
    ApproxOptions opt;
    opt.n = 4096;
    const auto r = approximate_loop(u, opt);
    CHECK(r.report.plan.factors == expected_pieces(sample(a, 4096), 0.5));
    CHECK(r.report.degree <= 4096);
    CHECK(r.report.unitarity_defect <= 1e-9);
    const double bound = double(r.report.factor_errors.size()) *
                         *std::max_element(r.report.factor_errors.begin(), r.report.factor_errors.end());
    CHECK(r.report.sup_error <= bound * (1 + 1e-9));
    CHECK(r.report.sup_error < 1.0);
  }
  SUBCASE("grid branch cut propagates") {
    Grid u(2, 64);
    for (Index g = 0; g < 64; ++g) {
      const double t = u.angle(g);
      u.at(g) << std::polar(1.0, t), 0, 0, std::polar(1.0, -t);
    }
    ApproxOptions opt;
    opt.n = 256;
    opt.grid = 64;
    CHECK_THROWS_AS(approximate_loop(u, opt), BranchCutError);
  }
}

TEST_CASE("property: degree and group guarantees") {
  std::mt19937_64 rng(54);
  std::uniform_int_distribution<Index> ndist(16, 600);
  for (int trial = 0; trial < 12; ++trial) {
    const Index size = 2 + trial % 2;
    const auto a = random_algebra_loop(rng, size, 1 + trial % 5, 0.4);
    ApproxOptions opt;
    opt.n = ndist(rng);
    opt.epsilon = trial % 3 == 0 ? 0.7 : 1.0;
    const auto r = approximate_loop(single_factor(a), opt);
    INFO("trial " << trial << " n " << opt.n);
    REQUIRE(r.report.degree <= opt.n);
    REQUIRE(r.report.unitarity_defect <= 1e-9);
    REQUIRE(r.report.det_defect <= 1e-9);
    REQUIRE(r.report.sup_error <= 2.0);
  }
}
