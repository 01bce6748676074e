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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsee {

/// Transmit power vector, one entry per user, in Watts (linear scale).
using PowerVector = std::vector<double>;

/// Coefficients of the SINR rate model
///   rate_k(p) = log(1 + theta[k] p_k / (sigma2[k] + sum_j eta(k,j) p_j)).
///
/// Row k of eta collects the interference coefficients seen by the receiver
/// of user k's stream; eta(k,k) is self-interference and may be zero, as may
/// any off-diagonal entry (the no-interference limit).
struct InterferenceNetwork {
  std::vector<double> theta;   ///< direct-channel power gains, > 0
  std::vector<double> eta;     ///< K*K interference gains, row-major, >= 0
  std::vector<double> sigma2;  ///< noise powers, > 0

  std::size_t size() const noexcept { return theta.size(); }

  double eta_at(std::size_t k, std::size_t j) const {
    return eta[k * theta.size() + j];
  }
  double& eta_at(std::size_t k, std::size_t j) {
    return eta[k * theta.size() + j];
  }

  void validate() const;
};

/// Per-user power consumption model: consumed power at radiated power p_k is
/// phi[k] * p_k + pc[k], strictly positive on p_k >= 0.
struct PowerModel {
  std::vector<double> phi;  ///< amplifier inefficiency, > 0
  std::vector<double> pc;   ///< static circuit power [W], > 0

  std::size_t size() const noexcept { return phi.size(); }
  void validate() const;
};

/// A complete weighted sum energy efficiency instance: rate model, power
/// model, priority weights and per-user power budgets. The feasible set is
/// the box [0, pmax[0]] x ... x [0, pmax[K-1]].
struct WseeProblem {
  InterferenceNetwork net;
  PowerModel pm;
  std::vector<double> w;     ///< weights, > 0
  std::vector<double> pmax;  ///< per-user power budgets [W], > 0

  std::size_t size() const noexcept { return net.size(); }

  void validate() const;

  /// Componentwise box check, with optional absolute slack.
  bool feasible(const PowerVector& p, double slack = 0.0) const {
    if (p.size() != pmax.size()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] < -slack || p[k] > pmax[k] + slack) return false;
    }
    return true;
  }
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void check_dims(const InterferenceNetwork& net, const PowerVector& p) {
  require(p.size() == net.size(), "power vector dimension mismatch");
}

}  // namespace detail

inline void InterferenceNetwork::validate() const {
  const std::size_t k = theta.size();
  detail::require(k >= 1, "InterferenceNetwork: need at least one user");
  detail::require(sigma2.size() == k, "InterferenceNetwork: sigma2 size != K");
  detail::require(eta.size() == k * k, "InterferenceNetwork: eta size != K*K");
  for (std::size_t i = 0; i < k; ++i) {
    detail::require(theta[i] > 0.0, "InterferenceNetwork: theta must be > 0");
    detail::require(sigma2[i] > 0.0, "InterferenceNetwork: sigma2 must be > 0");
  }
  for (double e : eta) {
    detail::require(e >= 0.0, "InterferenceNetwork: eta must be >= 0");
  }
}

inline void PowerModel::validate() const {
  detail::require(phi.size() == pc.size(), "PowerModel: phi/pc size mismatch");
  detail::require(!phi.empty(), "PowerModel: empty");
  for (std::size_t i = 0; i < phi.size(); ++i) {
    detail::require(phi[i] > 0.0, "PowerModel: phi must be > 0");
    detail::require(pc[i] > 0.0, "PowerModel: pc must be > 0");
  }
}

inline void WseeProblem::validate() const {
  net.validate();
  pm.validate();
  const std::size_t k = net.size();
  detail::require(pm.size() == k, "WseeProblem: power model size != K");
  detail::require(w.size() == k, "WseeProblem: weights size != K");
  detail::require(pmax.size() == k, "WseeProblem: pmax size != K");
  for (std::size_t i = 0; i < k; ++i) {
    detail::require(w[i] > 0.0, "WseeProblem: weights must be > 0");
    detail::require(pmax[i] > 0.0, "WseeProblem: pmax must be > 0");
  }
}

}  // namespace wsee
