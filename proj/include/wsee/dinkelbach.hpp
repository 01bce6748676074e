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

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "wsee/polyblock.hpp"
#include "wsee/problem.hpp"
#include "wsee/rates.hpp"

namespace wsee {

// Single-ratio reformulation: the WSEE objective equals N(p) / D(p) with
//   N(p) = sum_k w_k rate_k(p) prod_{i != k} (phi_i p_i + pc_i)
//   D(p) = prod_k (phi_k p_k + pc_k),
// which makes Dinkelbach's algorithm applicable, each parametric subproblem
// being solved globally by the polyblock routine after a lift to a monotonic
// problem.

struct RatioParts {
  double numerator;
  double denominator;
};

/// N(p) and D(p) of the single-ratio form; N/D equals wsee_value(prob, p).
inline RatioParts ratio_parts(const WseeProblem& prob, const PowerVector& p) {
  detail::check_dims(prob.net, p);
  const std::size_t n = prob.size();
  double dprod = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    dprod *= prob.pm.phi[k] * p[k] + prob.pm.pc[k];
  }
  double num = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double consumed_k = prob.pm.phi[k] * p[k] + prob.pm.pc[k];
    num += prob.w[k] * rate(prob.net, p, k) * (dprod / consumed_k);
  }
  return {num, dprod};
}

/// Dinkelbach's parametric objective F(p; lambda) = N(p) - lambda D(p).
inline double parametric_objective(const WseeProblem& prob,
                                   const PowerVector& p, double lambda) {
  const RatioParts parts = ratio_parts(prob, p);
  return parts.numerator - lambda * parts.denominator;
}

/// F(p; lambda) written as plus(p) - minus(p) with both parts coordinate-wise
/// nondecreasing and nonnegative on the box. Uses the sigma2-normalized rate
/// split so every factor in the products is nonnegative; the normalization
/// cancels in the difference, leaving F unchanged.
struct ParametricDcSplit {
  const WseeProblem* prob;
  double lambda;

  double plus(const PowerVector& p) const {
    const std::size_t n = prob->size();
    const double dprod = consumed_product(p);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double consumed_k = prob->pm.phi[k] * p[k] + prob->pm.pc[k];
      const double inr = interference_power(prob->net, p, k);
      const double r_plus =
          std::log((prob->net.theta[k] * p[k] + inr) / prob->net.sigma2[k]);
      acc += prob->w[k] * r_plus * (dprod / consumed_k);
    }
    return acc;
  }

  double minus(const PowerVector& p) const {
    const std::size_t n = prob->size();
    const double dprod = consumed_product(p);
    double acc = lambda * dprod;
    for (std::size_t k = 0; k < n; ++k) {
      const double consumed_k = prob->pm.phi[k] * p[k] + prob->pm.pc[k];
      const double inr = interference_power(prob->net, p, k);
      const double r_minus = std::log(inr / prob->net.sigma2[k]);
      acc += prob->w[k] * r_minus * (dprod / consumed_k);
    }
    return acc;
  }

 private:
  double consumed_product(const PowerVector& p) const {
    double dprod = 1.0;
    for (std::size_t k = 0; k < prob->size(); ++k) {
      dprod *= prob->pm.phi[k] * p[k] + prob->pm.pc[k];
    }
    return dprod;
  }
};

inline ParametricDcSplit dc_split(const WseeProblem& prob, double lambda) {
  detail::require(lambda >= 0.0, "dc_split: lambda must be >= 0");
  return {&prob, lambda};
}

/// A point of the lifted monotonic problem: the power vector plus the
/// auxiliary coordinate absorbing the decreasing part of F.
struct LiftedPoint {
  PowerVector p;
  double t = 0.0;
};

/// Membership in the lifted feasible set
///   {(p, t) : 0 <= p <= pmax, 0 <= t <= minus(pmax) - minus(p)},
/// which is normal (downward closed) because minus() is nondecreasing.
/// Maximizing plus(p) + t over it is equivalent to maximizing F: at the
/// optimum t = minus(pmax) - minus(p), so the lifted value exceeds F by the
/// constant minus(pmax).
inline bool lifted_feasible(const WseeProblem& prob, double lambda,
                            const LiftedPoint& z) {
  const ParametricDcSplit split = dc_split(prob, lambda);
  if (z.t < 0.0) return false;
  if (!prob.feasible(z.p)) return false;
  return z.t <= split.minus(prob.pmax) - split.minus(z.p);
}

struct DinkelbachConfig {
  double eps = 1e-5;    ///< stop when F(p^t; lambda^t) <= eps
  int max_outer = 100;  ///< outer-iteration cap
  PolyblockConfig inner;
  std::optional<PowerVector> p0;  ///< initial point; defaults to pmax
  double max_seconds = 0.0;       ///< wall-clock budget, 0 = unlimited

  void validate() const {
    detail::require(eps > 0.0, "DinkelbachConfig: eps must be > 0");
    detail::require(max_outer >= 1, "DinkelbachConfig: max_outer must be >= 1");
  }
};

enum class GlobalStatus { kConverged, kBudgetExhausted };

struct DinkelbachOuterRecord {
  double lambda;             ///< ratio value driving this subproblem
  double f_value;            ///< F(p^t; lambda) at the inner solution
  std::int64_t inner_iters;  ///< polyblock iterations spent
  double incumbent;          ///< best certified F lower bound,   = f_value
  double upper_bound;        ///< valid upper bound on max_p F(p; lambda)
};

struct GlobalResult {
  PowerVector p_star;
  double f_star = 0.0;
  int outer_iters = 0;
  std::int64_t inner_iters_total = 0;
  std::vector<DinkelbachOuterRecord> trace;
  GlobalStatus status = GlobalStatus::kBudgetExhausted;
};

/// Global WSEE maximization: Dinkelbach iterations on the single-ratio form,
/// each parametric problem solved by the polyblock routine on the lifted
/// monotonic program. Returns the global maximizer up to the compounded
/// tolerance (eps plus the inner optimality gap, both recorded in the trace).
/// Inner budget exhaustion is propagated as kBudgetExhausted together with
/// the best point found so far.
inline GlobalResult dinkelbach_solve(const WseeProblem& prob,
                                     const DinkelbachConfig& cfg) {
  prob.validate();
  cfg.validate();
  PowerVector p = cfg.p0.value_or(prob.pmax);
  detail::require(prob.feasible(p), "dinkelbach_solve: initial point infeasible");

  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (cfg.max_seconds > 0.0) {
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(cfg.max_seconds));
  }

  GlobalResult res;
  double lambda = wsee_value(prob, p);
  const std::size_t n = prob.size();

  for (int t = 0; t < cfg.max_outer; ++t) {
    ++res.outer_iters;
    const ParametricDcSplit split = dc_split(prob, lambda);
    const double minus_at_pmax = split.minus(prob.pmax);
    const double t_max = minus_at_pmax - split.minus(PowerVector(n, 0.0));

    std::vector<double> corner(n + 1);
    for (std::size_t i = 0; i < n; ++i) corner[i] = prob.pmax[i];
    corner[n] = t_max;

    PowerVector obj_buf(n);
    PowerVector feas_buf(n);
    PowerVector imp_buf(n);
    PowerVector prj_buf(n);
    const auto objective = [&, &buf = obj_buf](const std::vector<double>& z) {
      std::copy_n(z.begin(), n, buf.begin());
      return split.plus(buf) + z[n];
    };
    const auto feasible = [&, &buf = feas_buf](const std::vector<double>& z) {
      std::copy_n(z.begin(), n, buf.begin());
      return z[n] <= minus_at_pmax - split.minus(buf);
    };
    // Raise the auxiliary coordinate of a feasible point to the top of its
    // fiber; the incumbent then carries the true parametric value of its
    // power vector.
    const auto improve = [&, &buf = imp_buf](std::vector<double>& z) {
      std::copy_n(z.begin(), n, buf.begin());
      const double bound = minus_at_pmax - split.minus(buf);
      if (bound > z[n]) z[n] = bound;
    };
    // Boundary scale along the ray 0 -> z: root of the increasing function
    //   H(mu) = mu z_t - (minus(pmax) - minus(mu p)),
    // bracketed by safeguarded false position to the same tolerance the
    // boolean bisection would reach, in far fewer evaluations.
    const auto projector = [&, &buf = prj_buf](const std::vector<double>& z,
                                               double tol) {
      const auto h_at = [&](double mu) {
        for (std::size_t i = 0; i < n; ++i) buf[i] = mu * z[i];
        return mu * z[n] - (minus_at_pmax - split.minus(buf));
      };
      double lo = 0.0;
      double hi = 1.0;
      double h_lo = h_at(lo);
      double h_hi = h_at(hi);
      int side = 0;
      for (int iter = 0; hi - lo > tol; ++iter) {
        double mu = iter % 4 == 3 || h_hi == h_lo
                        ? 0.5 * (lo + hi)
                        : (lo * h_hi - hi * h_lo) / (h_hi - h_lo);
        if (!(mu > lo) || !(mu < hi)) mu = 0.5 * (lo + hi);
        const double h = h_at(mu);
        if (h <= 0.0) {
          lo = mu;
          h_lo = h;
          if (side == -1) h_hi *= 0.5;
          side = -1;
        } else {
          hi = mu;
          h_hi = h;
          if (side == 1) h_lo *= 0.5;
          side = 1;
        }
      }
      return std::pair<double, double>{lo, hi};
    };

    const PolyblockResult inner = polyblock_maximize(
        objective, feasible, corner, cfg.inner, deadline, improve, projector);
    res.inner_iters_total += inner.iters;

    PowerVector p_new(inner.best_point.begin(), inner.best_point.begin() + n);
    double f_val = parametric_objective(prob, p_new, lambda);
    if (f_val < 0.0) {
      // Inner tolerance returned a point below the current ratio; the
      // previous iterate (where F = 0) is at least as good.
      p_new = p;
      f_val = 0.0;
    }
    res.trace.push_back({lambda, f_val, inner.iters, f_val,
                         inner.upper_bound - minus_at_pmax});

    if (inner.status != PolyblockStatus::kConverged) {
      if (wsee_value(prob, p_new) > wsee_value(prob, p)) p = p_new;
      res.status = GlobalStatus::kBudgetExhausted;
      res.p_star = p;
      res.f_star = wsee_value(prob, p);
      return res;
    }

    p = p_new;
    if (f_val <= cfg.eps) {
      res.status = GlobalStatus::kConverged;
      res.p_star = p;
      res.f_star = wsee_value(prob, p);
      return res;
    }
    lambda = wsee_value(prob, p);
  }

  res.status = GlobalStatus::kBudgetExhausted;
  res.p_star = p;
  res.f_star = wsee_value(prob, p);
  return res;
}

}  // namespace wsee
