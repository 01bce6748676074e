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
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "wsee/problem.hpp"
#include "wsee/rates.hpp"

namespace wsee {

struct ScaConfig {
  double alpha = 0.3;      ///< Armijo sufficient-ascent constant, in (0,1)
  double beta = 0.5;       ///< Armijo backtracking factor, in (0,1)
  int max_iters = 2000;    ///< outer iteration cap
  double tol_obj = 1e-8;   ///< stop on |f(p^{t+1}) - f(p^t)| <= tol_obj
  double tol_step = 1e-7;  ///< stop on ||Bp^t - p^t||_inf <= tol_step
  std::optional<PowerVector> p0;  ///< initial point; defaults to pmax

  void validate() const {
    detail::require(alpha > 0.0 && alpha < 1.0, "ScaConfig: alpha not in (0,1)");
    detail::require(beta > 0.0 && beta < 1.0, "ScaConfig: beta not in (0,1)");
    detail::require(max_iters >= 1, "ScaConfig: max_iters must be >= 1");
    detail::require(tol_obj >= 0.0 && tol_step >= 0.0,
                    "ScaConfig: tolerances must be >= 0");
  }
};

/// Coefficients of the per-user concave surrogate around the current iterate:
///
///   value(q) = rate_coeff * log(1 + theta q / (eta_self q + noise))
///              + slope * q + offset
///
/// The rate term keeps user k's own concavity; every cross term of the
/// objective is linearized into `slope`. `offset` makes value(p_k^t) equal
/// the k-th objective term at the expansion point; it drops out of the argmax.
struct SurrogateCoeffs {
  double rate_coeff;  ///< > 0
  double slope;       ///< may have either sign
  double offset;
  double noise;       ///< effective noise: sigma2 + cross interference, > 0
  double theta;
  double eta_self;

  double value(double q) const {
    return rate_coeff * std::log1p(theta * q / (eta_self * q + noise)) +
           slope * q + offset;
  }

  /// d/dq value(q) = rate_coeff * theta * noise /
  ///                 ((eta_self q + noise)((theta + eta_self) q + noise))
  ///                 + slope; strictly decreasing in q, so value is strictly
  ///                 concave on q >= 0.
  double deriv(double q) const {
    const double lo = eta_self * q + noise;
    const double hi = (theta + eta_self) * q + noise;
    return rate_coeff * theta * noise / (lo * hi) + slope;
  }
};

/// Builds the surrogate for user k at expansion point p_t.
inline SurrogateCoeffs surrogate_coeffs(const WseeProblem& prob,
                                        const PowerVector& p_t,
                                        std::size_t k) {
  detail::check_dims(prob.net, p_t);
  const std::size_t n = prob.size();
  const double consumed_k = prob.pm.phi[k] * p_t[k] + prob.pm.pc[k];

  SurrogateCoeffs sc;
  sc.rate_coeff = prob.w[k] / consumed_k;
  sc.theta = prob.net.theta[k];
  sc.eta_self = prob.net.eta_at(k, k);

  sc.noise = prob.net.sigma2[k];
  for (std::size_t j = 0; j < n; ++j) {
    if (j != k) sc.noise += prob.net.eta_at(k, j) * p_t[j];
  }

  // Linearized part: the k-th ratio's denominator variation plus the effect
  // of p_k on every other user's rate.
  double slope = -prob.w[k] * prob.pm.phi[k] * rate(prob.net, p_t, k) /
                 (consumed_k * consumed_k);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == k) continue;
    const std::vector<double> gi = grad_rate(prob.net, p_t, i);
    slope += prob.w[i] * gi[k] / (prob.pm.phi[i] * p_t[i] + prob.pm.pc[i]);
  }
  sc.slope = slope;
  sc.offset = -slope * p_t[k];
  return sc;
}

/// Global maximizer of the surrogate over [0, pmax_k], in closed form.
///
/// With slope >= 0 the surrogate is strictly increasing, so pmax_k wins.
/// Otherwise stationary points solve
///   rate_coeff * theta * noise = -slope (eta_self q + noise)
///                                       ((theta + eta_self) q + noise),
/// a quadratic in q. All real roots inside the box plus both endpoints are
/// evaluated; ties prefer the smallest power.
inline double solve_scalar_subproblem(const SurrogateCoeffs& sc,
                                      double pmax_k) {
  detail::require(pmax_k > 0.0, "solve_scalar_subproblem: pmax must be > 0");
  if (sc.slope >= 0.0) return pmax_k;

  double candidates[4];
  std::size_t n_cand = 0;
  candidates[n_cand++] = 0.0;
  candidates[n_cand++] = pmax_k;

  // -slope * (eta (theta+eta) q^2 + noise (theta+2 eta) q + noise^2)
  //   = rate_coeff theta noise
  const double c2 = -sc.slope * sc.eta_self * (sc.theta + sc.eta_self);
  const double c1 = -sc.slope * sc.noise * (sc.theta + 2.0 * sc.eta_self);
  const double c0 =
      -sc.slope * sc.noise * sc.noise - sc.rate_coeff * sc.theta * sc.noise;
  if (c2 == 0.0) {
    if (c1 != 0.0) candidates[n_cand++] = -c0 / c1;
  } else {
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0.0) {
      // c1 > 0 here, so q = -(c1 + sqrt(disc))/2 avoids cancellation.
      const double q = -0.5 * (c1 + std::sqrt(disc));
      candidates[n_cand++] = q / c2;
      if (q != 0.0) candidates[n_cand++] = c0 / q;
    }
  }

  std::sort(candidates, candidates + n_cand);
  double best_q = 0.0;
  double best_val = sc.value(0.0);
  for (std::size_t i = 0; i < n_cand; ++i) {
    const double q = candidates[i];
    if (q <= 0.0 || q > pmax_k || !std::isfinite(q)) continue;
    const double v = sc.value(q);
    if (v > best_val) {
      best_val = v;
      best_q = q;
    }
  }
  return best_q;
}

/// Componentwise surrogate maximizer: the best response map applied to p_t.
inline PowerVector best_response(const WseeProblem& prob,
                                 const PowerVector& p_t) {
  const std::size_t n = prob.size();
  PowerVector out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = solve_scalar_subproblem(surrogate_coeffs(prob, p_t, k),
                                     prob.pmax[k]);
  }
  return out;
}

struct ArmijoResult {
  double gamma = 0.0;      ///< accepted step size, beta^m
  int backtracks = 0;      ///< m
  double f_candidate = 0;  ///< objective at the accepted point
  PowerVector p_candidate;
  bool ascent_ok = true;   ///< false when grad f . dir < 0 (numerical)
  bool cap_hit = false;    ///< true when the backtrack cap was reached
};

namespace detail {

// Candidate points are clamped to the box so the accepted objective value is
// evaluated exactly where the iterate will land; with grad.dir >= 0 the
// accepted value then can never fall below f(p_t), making the trace
// nondecreasing as doubles, not just in exact arithmetic.
inline PowerVector step_clamped(const WseeProblem& prob, const PowerVector& p,
                                const std::vector<double>& dir, double gamma) {
  PowerVector q(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    q[k] = std::clamp(p[k] + gamma * dir[k], 0.0, prob.pmax[k]);
  }
  return q;
}

}  // namespace detail

/// Backtracking line search along `dir` from `p_t`: returns the largest
/// gamma = beta^m, m = 0, 1, ..., satisfying
///   f(p_t + gamma dir) >= f(p_t) + alpha gamma grad f(p_t) . dir.
/// A numerically non-ascent direction is flagged and gets a zero step; the
/// backtrack cap (m <= 60) is flagged and returns the last tried step.
inline ArmijoResult armijo_step(const WseeProblem& prob, const PowerVector& p_t,
                                const std::vector<double>& dir, double alpha,
                                double beta) {
  constexpr int kMaxBacktracks = 60;
  const double f_t = wsee_value(prob, p_t);
  const std::vector<double> g = grad_wsee(prob, p_t);
  double slope = 0.0;
  for (std::size_t k = 0; k < dir.size(); ++k) slope += g[k] * dir[k];

  ArmijoResult res;
  if (slope < 0.0) {
    res.gamma = 0.0;
    res.ascent_ok = false;
    res.f_candidate = f_t;
    res.p_candidate = p_t;
    return res;
  }

  double gamma = 1.0;
  for (int m = 0; m <= kMaxBacktracks; ++m) {
    PowerVector cand = detail::step_clamped(prob, p_t, dir, gamma);
    const double f_cand = wsee_value(prob, cand);
    if (f_cand >= f_t + alpha * gamma * slope) {
      res.gamma = gamma;
      res.backtracks = m;
      res.f_candidate = f_cand;
      res.p_candidate = std::move(cand);
      return res;
    }
    if (m == kMaxBacktracks) {
      res.gamma = gamma;
      res.backtracks = m;
      res.f_candidate = f_cand;
      res.p_candidate = std::move(cand);
      res.cap_hit = true;
      return res;
    }
    gamma *= beta;
  }
  return res;  // unreachable
}

enum class ScaStatus { kConverged, kMaxIters };

struct ScaIterRecord {
  double f;          ///< objective after this iteration's update
  double gamma;      ///< accepted Armijo step
  double step_norm;  ///< ||Bp^t - p^t||_inf before the update
  PowerVector p;     ///< iterate after the update
};

struct ScaResult {
  PowerVector p_star;
  double f_star = 0.0;
  int iters = 0;  ///< best-response computations performed
  std::vector<ScaIterRecord> trace;  ///< trace[0] is the initial point
  ScaStatus status = ScaStatus::kMaxIters;
  double stationarity = 0.0;  ///< projected-gradient residual at p_star
  bool line_search_stalled = false;
};

/// Successive convex approximation ascent: repeatedly maximize the separable
/// concave surrogate, move along the best-response direction with an Armijo
/// step, stop when the step or the objective improvement falls below
/// tolerance. Every iterate is feasible and the objective trace is
/// nondecreasing.
inline ScaResult sca_solve(const WseeProblem& prob, const ScaConfig& cfg) {
  prob.validate();
  cfg.validate();
  PowerVector p = cfg.p0.value_or(prob.pmax);
  detail::require(prob.feasible(p), "sca_solve: initial point infeasible");

  ScaResult res;
  double f = wsee_value(prob, p);
  res.trace.push_back({f, 0.0, 0.0, p});

  for (int t = 0; t < cfg.max_iters; ++t) {
    ++res.iters;
    const PowerVector bp = best_response(prob, p);
    std::vector<double> dir(p.size());
    double step_norm = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      dir[k] = bp[k] - p[k];
      step_norm = std::max(step_norm, std::abs(dir[k]));
    }

    const ArmijoResult ar = armijo_step(prob, p, dir, cfg.alpha, cfg.beta);
    if (!ar.ascent_ok) {
      // Numerical stationarity: the best-response direction no longer has
      // positive correlation with the gradient.
      res.status = ScaStatus::kConverged;
      res.line_search_stalled = true;
      break;
    }
    if (ar.cap_hit && ar.f_candidate < f) {
      // The capped step did not improve; keep the current iterate.
      res.status = ScaStatus::kConverged;
      res.line_search_stalled = true;
      break;
    }
    const double f_next = ar.f_candidate;
    p = ar.p_candidate;
    res.trace.push_back({f_next, ar.gamma, step_norm, p});
    const double delta = f_next - f;
    f = f_next;
    if (ar.cap_hit) {
      res.status = ScaStatus::kConverged;
      res.line_search_stalled = true;
      break;
    }
    // Dual stopping rule: both the best-response displacement and the
    // objective improvement must be below tolerance.
    if (step_norm <= cfg.tol_step && delta <= cfg.tol_obj) {
      res.status = ScaStatus::kConverged;
      break;
    }
  }

  res.p_star = p;
  res.f_star = f;
  res.stationarity = projected_gradient_residual(prob, p);
  return res;
}

}  // namespace wsee
