// Copyright 2026 The wsee-opt Authors
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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "testutil.hpp"
#include "wsee/sca.hpp"

using namespace wsee;

namespace {

WseeProblem single_user(double theta, double sigma2, double w, double phi,
                        double pc, double pmax) {
  WseeProblem prob;
  prob.net.theta = {theta};
  prob.net.eta = {0.0};
  prob.net.sigma2 = {sigma2};
  prob.pm.phi = {phi};
  prob.pm.pc = {pc};
  prob.w = {w};
  prob.pmax = {pmax};
  return prob;
}

SurrogateCoeffs make_coeffs(double a, double b, double theta, double eta,
                            double d) {
  SurrogateCoeffs sc;
  sc.rate_coeff = a;
  sc.slope = b;
  sc.offset = 0.0;
  sc.noise = d;
  sc.theta = theta;
  sc.eta_self = eta;
  return sc;
}

}  // namespace

TEST_CASE("surrogate_coeffs: single-user closed form") {
  const WseeProblem prob = single_user(2.0, 0.5, 1.5, 2.5, 1.0, 4.0);
  const PowerVector pt{1.2};
  const SurrogateCoeffs sc = surrogate_coeffs(prob, pt, 0);
  const double consumed = 2.5 * 1.2 + 1.0;
  CHECK(std::abs(sc.rate_coeff - 1.5 / consumed) < 1e-15);
  CHECK(std::abs(sc.slope -
                 (-1.5 * 2.5 * rate(prob.net, pt, 0) / (consumed * consumed))) <
        1e-15);
  CHECK(sc.noise == 0.5);
  CHECK(std::abs(sc.offset + sc.slope * 1.2) < 1e-15);
}

TEST_CASE("surrogate_coeffs: zero expansion point") {
  std::mt19937_64 rng(201);
  const WseeProblem prob = testutil::random_problem(3, rng);
  const PowerVector zero(3, 0.0);
  for (std::size_t k = 0; k < 3; ++k) {
    const SurrogateCoeffs sc = surrogate_coeffs(prob, zero, k);
    CHECK(std::abs(sc.rate_coeff - prob.w[k] / prob.pm.pc[k]) < 1e-15);
    CHECK(sc.slope == 0.0);  // every cross derivative vanishes at p = 0
    CHECK(sc.noise == prob.net.sigma2[k]);
    CHECK(sc.offset == 0.0);
  }
}

TEST_CASE("surrogate: value and gradient consistency at the expansion point") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 30; ++trial) {
    const WseeProblem prob = testutil::random_problem(3, rng);
    const PowerVector pt = testutil::interior_point(prob, rng);
    const auto grad_f = grad_wsee(prob, pt);
    for (std::size_t k = 0; k < 3; ++k) {
      const SurrogateCoeffs sc = surrogate_coeffs(prob, pt, k);

      // Surrogate value at the expansion point equals the k-th objective term.
      const double term = prob.w[k] * rate(prob.net, pt, k) /
                          (prob.pm.phi[k] * pt[k] + prob.pm.pc[k]);
      CHECK(testutil::rel_err(sc.value(pt[k]), term) < 1e-12);

      // Finite-difference derivative of the surrogate equals the objective's
      // partial derivative.
      const double h = 1e-6 * (1.0 + pt[k]);
      const double fd = (sc.value(pt[k] + h) - sc.value(pt[k] - h)) / (2 * h);
      CHECK(testutil::rel_err(fd, grad_f[k]) < 1e-6);
      CHECK(testutil::rel_err(sc.deriv(pt[k]), grad_f[k]) < 1e-10);
    }
  }
}

TEST_CASE("surrogate: midpoint concavity") {
  std::mt19937_64 rng(203);
  for (int trial = 0; trial < 200; ++trial) {
    const SurrogateCoeffs sc = make_coeffs(
        testutil::log_uniform(rng, 1e-2, 1e2),
        (trial % 3 == 0 ? 1.0 : -1.0) * testutil::log_uniform(rng, 1e-3, 1e2),
        testutil::log_uniform(rng, 1e-2, 1e2),
        trial % 4 == 0 ? 0.0 : testutil::log_uniform(rng, 1e-3, 10.0),
        testutil::log_uniform(rng, 1e-3, 10.0));
    const double x = testutil::log_uniform(rng, 1e-3, 10.0);
    const double y = testutil::log_uniform(rng, 1e-3, 10.0);
    const double mid = 0.5 * (x + y);
    CHECK(sc.value(mid) >= 0.5 * (sc.value(x) + sc.value(y)) -
                               1e-12 * std::max(1.0, std::abs(sc.value(mid))));
  }
}

TEST_CASE("solve_scalar_subproblem: pinned cases") {
  // Linear-root case: eta = 0, theta = 1, d = 1, a = 2, b = -1.
  CHECK(solve_scalar_subproblem(make_coeffs(2.0, -1.0, 1.0, 0.0, 1.0), 10.0) ==
        Catch::Approx(1.0).margin(1e-12));
  // Boundary-touching case: the stationary point sits exactly at 0.
  CHECK(solve_scalar_subproblem(make_coeffs(1.0, -1.0, 1.0, 0.0, 1.0), 10.0) ==
        0.0);
  // Nonnegative slope: strictly increasing surrogate.
  CHECK(solve_scalar_subproblem(make_coeffs(1.0, 0.5, 1.0, 0.3, 1.0), 7.5) ==
        7.5);
  CHECK(solve_scalar_subproblem(make_coeffs(1.0, 0.0, 1.0, 0.0, 1.0), 2.0) ==
        2.0);
}

TEST_CASE("solve_scalar_subproblem: matches grid oracle") {
  std::mt19937_64 rng(204);
  for (int trial = 0; trial < 1000; ++trial) {
    const double b_sign = testutil::uniform(rng, 0.0, 1.0) < 0.3 ? 1.0 : -1.0;
    const SurrogateCoeffs sc = make_coeffs(
        testutil::log_uniform(rng, 1e-2, 1e2),
        b_sign * testutil::log_uniform(rng, 1e-4, 1e2),
        testutil::log_uniform(rng, 1e-2, 1e2),
        testutil::uniform(rng, 0.0, 1.0) < 0.3
            ? 0.0
            : testutil::log_uniform(rng, 1e-3, 10.0),
        testutil::log_uniform(rng, 1e-3, 10.0));
    const double pmax = testutil::log_uniform(rng, 1e-2, 1e2);

    const double p_star = solve_scalar_subproblem(sc, pmax);
    REQUIRE(p_star >= 0.0);
    REQUIRE(p_star <= pmax);

    const auto value = [&](double q) { return sc.value(q); };
    const auto coarse = testutil::grid_max_1d_fast(value, 0.0, pmax, 20001);
    const double cell = pmax / 20000.0;
    const auto refined = testutil::golden_refine(
        value, std::max(0.0, coarse.arg - cell),
        std::min(pmax, coarse.arg + cell));
    const double oracle = std::max(coarse.value, refined.value);
    CHECK(sc.value(p_star) >=
          oracle - 1e-9 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("best_response: single user reduces to the scalar subproblem") {
  const WseeProblem prob = single_user(1.0, 1.0, 1.0, 2.5, 1.0, 10.0);
  const PowerVector pt{2.0};
  const auto bp = best_response(prob, pt);
  const double direct =
      solve_scalar_subproblem(surrogate_coeffs(prob, pt, 0), 10.0);
  CHECK(bp[0] == direct);
}

TEST_CASE("best_response: componentwise grid check") {
  std::mt19937_64 rng(205);
  for (int trial = 0; trial < 10; ++trial) {
    const WseeProblem prob = testutil::random_problem(3, rng);
    const PowerVector pt = testutil::interior_point(prob, rng);
    const auto bp = best_response(prob, pt);
    REQUIRE(prob.feasible(bp));
    for (std::size_t k = 0; k < 3; ++k) {
      const SurrogateCoeffs sc = surrogate_coeffs(prob, pt, k);
      const auto value = [&](double q) { return sc.value(q); };
      const auto coarse =
          testutil::grid_max_1d_fast(value, 0.0, prob.pmax[k], 100001);
      CHECK(sc.value(bp[k]) >= coarse.value - 1e-9);
      CHECK(std::abs(sc.value(bp[k]) - coarse.value) <
            1e-6 * std::max(1.0, std::abs(coarse.value)));
    }
  }
}

TEST_CASE("best_response: fixed point at an interior stationary point") {
  // Single-user energy efficiency has an interior optimum once the budget is
  // large; locate it independently, then check it is a best-response fixed
  // point.
  const WseeProblem prob = single_user(2.0, 1.0, 1.0, 2.5, 1.0, 50.0);
  const auto objective = [&](double q) { return wsee_value(prob, PowerVector{q}); };
  const auto coarse = testutil::grid_max_1d(objective, 0.0, 50.0, 100001);
  const auto p_star = testutil::golden_refine(
      objective, coarse.arg - 50.0 / 100000.0, coarse.arg + 50.0 / 100000.0,
      200);
  REQUIRE(p_star.arg > 0.1);
  REQUIRE(p_star.arg < 49.0);

  const auto bp = best_response(prob, PowerVector{p_star.arg});
  CHECK(std::abs(bp[0] - p_star.arg) < 1e-5 * p_star.arg);
}

TEST_CASE("armijo_step: zero direction accepts the full step") {
  const WseeProblem prob = single_user(1.0, 1.0, 1.0, 2.5, 1.0, 4.0);
  const ArmijoResult ar =
      armijo_step(prob, PowerVector{1.0}, {0.0}, 0.3, 0.5);
  CHECK(ar.gamma == 1.0);
  CHECK(ar.backtracks == 0);
  CHECK(ar.ascent_ok);
}

TEST_CASE("armijo_step: full step on a gentle ascent") {
  // From p = 0 toward a point well inside the increasing region: the
  // objective is concave along the segment, so the full step satisfies the
  // sufficient-ascent inequality.
  const WseeProblem prob = single_user(1.0, 1.0, 1.0, 2.5, 1.0, 10.0);
  const PowerVector p0{0.0};
  const std::vector<double> dir{0.05};
  const ArmijoResult ar = armijo_step(prob, p0, dir, 0.3, 0.5);
  CHECK(ar.gamma == 1.0);
  CHECK(ar.backtracks == 0);
  // Direct verification of the inequality at the accepted step.
  const double f0 = wsee_value(prob, p0);
  const double slope = grad_wsee(prob, p0)[0] * dir[0];
  CHECK(wsee_value(prob, {0.05}) >= f0 + 0.3 * 1.0 * slope);
}

TEST_CASE("armijo_step: overshooting direction backtracks") {
  // A huge step past the optimum makes the full step fail the test; the
  // returned gamma satisfies the inequality while gamma/beta does not.
  const WseeProblem prob = single_user(5.0, 1.0, 1.0, 2.5, 1.0, 400.0);
  const PowerVector p0{0.1};

  const std::vector<double> dir{399.0};
  const double alpha = 0.3;
  const double beta = 0.5;
  const ArmijoResult ar = armijo_step(prob, p0, dir, alpha, beta);
  REQUIRE(ar.ascent_ok);
  REQUIRE(ar.backtracks >= 1);

  const double f0 = wsee_value(prob, p0);
  const double slope = grad_wsee(prob, p0)[0] * dir[0];
  REQUIRE(slope > 0.0);
  const auto value_at = [&](double gamma) {
    return wsee_value(prob, {std::clamp(p0[0] + gamma * dir[0], 0.0, 400.0)});
  };
  CHECK(value_at(ar.gamma) >= f0 + alpha * ar.gamma * slope);
  const double prev_gamma = ar.gamma / beta;
  CHECK(value_at(prev_gamma) < f0 + alpha * prev_gamma * slope);
}

TEST_CASE("armijo_step: non-ascent direction is flagged") {
  const WseeProblem prob = single_user(1.0, 1.0, 1.0, 2.5, 1.0, 10.0);
  // Pick the direction against the gradient sign at p = 1.
  const double g = grad_wsee(prob, {1.0})[0];
  REQUIRE(g != 0.0);
  const std::vector<double> against{g > 0 ? -1.0 : 1.0};
  const ArmijoResult ar = armijo_step(prob, PowerVector{1.0}, against, 0.3, 0.5);
  CHECK_FALSE(ar.ascent_ok);
  CHECK(ar.gamma == 0.0);
}

TEST_CASE("sca_solve: single-user instance matches dense grid") {
  std::mt19937_64 rng(206);
  for (int trial = 0; trial < 10; ++trial) {
    const WseeProblem prob = single_user(
        testutil::log_uniform(rng, 0.5, 5.0), testutil::log_uniform(rng, 0.1, 1.0),
        1.0, 2.5, testutil::log_uniform(rng, 0.5, 2.0),
        testutil::log_uniform(rng, 1.0, 20.0));
    ScaConfig cfg;
    const ScaResult res = sca_solve(prob, cfg);
    REQUIRE(res.status == ScaStatus::kConverged);

    const auto objective = [&](double q) { return wsee_value(prob, PowerVector{q}); };
    const auto grid =
        testutil::grid_max_1d_fast(objective, 0.0, prob.pmax[0], 1000001);
    CHECK(std::abs(res.f_star - grid.value) <=
          1e-6 * std::max(1.0, grid.value));
  }
}

TEST_CASE("sca_solve: restart at the optimum exits immediately") {
  const WseeProblem prob = single_user(2.0, 1.0, 1.0, 2.5, 1.0, 10.0);
  ScaConfig cfg;
  const ScaResult first = sca_solve(prob, cfg);
  REQUIRE(first.status == ScaStatus::kConverged);

  ScaConfig warm = cfg;
  warm.p0 = first.p_star;
  const ScaResult second = sca_solve(prob, warm);
  CHECK(second.status == ScaStatus::kConverged);
  CHECK(second.iters <= 2);
  CHECK(second.f_star >= first.f_star - 1e-12);
}

TEST_CASE("sca_solve: monotone feasible trace on relay instances") {
  for (int trial = 0; trial < 20; ++trial) {
    const WseeProblem prob = testutil::random_mwrc_problem(
        3, 300 + static_cast<std::uint64_t>(trial), -10.0 + trial);
    ScaConfig cfg;
    const ScaResult res = sca_solve(prob, cfg);
    REQUIRE(res.status == ScaStatus::kConverged);
    REQUIRE(res.trace.size() >= 1);
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      CHECK(res.trace[i].f >= res.trace[i - 1].f);
      CHECK(prob.feasible(res.trace[i].p));
      CHECK(res.trace[i].gamma > 0.0);
      CHECK(res.trace[i].gamma <= 1.0);
    }
    CHECK(res.stationarity <= 1e-5);
    CHECK(res.iters <= 100);
  }
}

TEST_CASE("sca_solve: best-response fixed point implies stationarity") {
  std::mt19937_64 rng(207);
  for (int trial = 0; trial < 10; ++trial) {
    const WseeProblem prob = testutil::random_problem(3, rng);
    ScaConfig cfg;
    cfg.tol_step = 1e-10;
    cfg.tol_obj = 1e-14;
    cfg.max_iters = 5000;
    const ScaResult res = sca_solve(prob, cfg);
    const auto bp = best_response(prob, res.p_star);
    double fixed_point_gap = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      fixed_point_gap = std::max(fixed_point_gap,
                                 std::abs(bp[k] - res.p_star[k]));
    }
    if (fixed_point_gap <= 1e-10) {
      CHECK(res.stationarity <= 1e-8);
    }
    CHECK(res.stationarity <= 1e-6);
  }
}
