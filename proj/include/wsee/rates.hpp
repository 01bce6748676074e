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
#include <vector>

#include "wsee/problem.hpp"

namespace wsee {

// All rates are in nats. Callers wanting bits divide by log(2) at the edge.

/// Interference-plus-noise power at the receiver of user k's stream,
/// sigma2[k] + sum_j eta(k,j) p_j. The single source of this denominator:
/// rate, gradients and the DC split all share it so they stay bit-consistent.
inline double interference_power(const InterferenceNetwork& net,
                                 const PowerVector& p, std::size_t k) {
  const std::size_t n = net.size();
  double acc = net.sigma2[k];
  for (std::size_t j = 0; j < n; ++j) acc += net.eta_at(k, j) * p[j];
  return acc;
}

/// Achievable rate of user k, log(1 + theta_k p_k / I_k(p)).
inline double rate(const InterferenceNetwork& net, const PowerVector& p,
                   std::size_t k) {
  detail::check_dims(net, p);
  return std::log1p(net.theta[k] * p[k] / interference_power(net, p, k));
}

/// Gradient of rate k with respect to every user's power. Entry k is
/// nonnegative, entries i != k are nonpositive. Finite on the whole
/// nonnegative orthant, including the boundary p_k = 0.
inline std::vector<double> grad_rate(const InterferenceNetwork& net,
                                     const PowerVector& p, std::size_t k) {
  detail::check_dims(net, p);
  const std::size_t n = net.size();
  const double inr = interference_power(net, p, k);
  const double total = net.theta[k] * p[k] + inr;
  const double common = net.theta[k] / total;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cross = net.eta_at(k, i) * p[k] / inr;
    g[i] = common * ((i == k ? 1.0 : 0.0) - cross);
  }
  return g;
}

/// Weighted sum energy efficiency, sum_k w_k rate_k(p) / (phi_k p_k + pc_k),
/// in nats per Joule.
inline double wsee_value(const WseeProblem& prob, const PowerVector& p) {
  detail::check_dims(prob.net, p);
  double acc = 0.0;
  for (std::size_t k = 0; k < prob.size(); ++k) {
    acc += prob.w[k] * rate(prob.net, p, k) /
           (prob.pm.phi[k] * p[k] + prob.pm.pc[k]);
  }
  return acc;
}

/// Gradient of the WSEE objective.
inline std::vector<double> grad_wsee(const WseeProblem& prob,
                                     const PowerVector& p) {
  detail::check_dims(prob.net, p);
  const std::size_t n = prob.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double consumed = prob.pm.phi[k] * p[k] + prob.pm.pc[k];
    const double inr = interference_power(prob.net, p, k);
    const double total = prob.net.theta[k] * p[k] + inr;
    const double common = prob.net.theta[k] / total;
    const double rk = std::log1p(prob.net.theta[k] * p[k] / inr);
    for (std::size_t i = 0; i < n; ++i) {
      const double cross = prob.net.eta_at(k, i) * p[k] / inr;
      g[i] += prob.w[k] * common * ((i == k ? 1.0 : 0.0) - cross) / consumed;
    }
    g[k] -= prob.w[k] * prob.pm.phi[k] * rk / (consumed * consumed);
  }
  return g;
}

/// A rate written as the difference of two coordinate-wise nondecreasing
/// functions: rate_k = plus - minus.
struct RateSplit {
  double plus;
  double minus;
};

/// Raw split: plus = log(sigma2 + theta_k p_k + sum_j eta_kj p_j),
/// minus = log(sigma2 + sum_j eta_kj p_j). Either part may be negative when
/// sigma2 < 1.
inline RateSplit rate_dc_split(const InterferenceNetwork& net,
                               const PowerVector& p, std::size_t k) {
  detail::check_dims(net, p);
  const double inr = interference_power(net, p, k);
  return {std::log(net.theta[k] * p[k] + inr), std::log(inr)};
}

/// Normalized split: both parts shifted by -log(sigma2[k]) so they are
/// nonnegative everywhere on p >= 0 and exactly zero at p = 0. The shift
/// cancels in plus - minus.
inline RateSplit rate_dc_split_normalized(const InterferenceNetwork& net,
                                          const PowerVector& p,
                                          std::size_t k) {
  detail::check_dims(net, p);
  const double s2 = net.sigma2[k];
  const double inr = interference_power(net, p, k);
  return {std::log((net.theta[k] * p[k] + inr) / s2), std::log(inr / s2)};
}

/// Residual of the projected-gradient stationarity condition,
/// ||p - clamp(p + grad f(p))||_inf over the box [0, pmax]. Zero exactly at
/// first-order optimal points.
inline double projected_gradient_residual(const WseeProblem& prob,
                                          const PowerVector& p) {
  const std::vector<double> g = grad_wsee(prob, p);
  double res = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    double moved = p[k] + g[k];
    if (moved < 0.0) moved = 0.0;
    if (moved > prob.pmax[k]) moved = prob.pmax[k];
    res = std::max(res, std::abs(p[k] - moved));
  }
  return res;
}

}  // namespace wsee
