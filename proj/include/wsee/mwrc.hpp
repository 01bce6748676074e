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

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "wsee/problem.hpp"
#include "wsee/random.hpp"

namespace wsee {

/// Physical channels of a K-user amplify-and-forward multi-way relay channel
/// with circular message exchange: user k transmits the stream decoded by
/// user k+1, indices wrapping K+1 -> 1. The relay retransmits a scaled
/// version of its receive signal at fixed power P0; every receiver treats
/// all other streams as noise.
struct MwrcChannel {
  std::vector<std::complex<double>> h;  ///< uplink channels user k -> relay
  std::vector<std::complex<double>> g;  ///< downlink channels relay -> user k
  double N0 = 0.0;                      ///< relay noise power
  std::vector<double> Nk;               ///< per-user noise powers
  double P0 = 0.0;                      ///< relay transmit power

  std::size_t size() const noexcept { return h.size(); }

  void validate() const {
    const std::size_t k = h.size();
    detail::require(k >= 1, "MwrcChannel: need at least one user");
    detail::require(g.size() == k, "MwrcChannel: g size != K");
    detail::require(Nk.size() == k, "MwrcChannel: Nk size != K");
    detail::require(N0 > 0.0, "MwrcChannel: N0 must be > 0");
    detail::require(P0 > 0.0, "MwrcChannel: P0 must be > 0");
    for (double n : Nk) detail::require(n > 0.0, "MwrcChannel: Nk must be > 0");
  }
};

struct ChannelGenConfig {
  std::uint64_t seed = 0;
  std::size_t K = 3;
  bool reciprocal = true;  ///< g_k = conj(h_k) when set
};

/// Scenario constants shared by all nodes of one benchmark point.
struct MwrcScenario {
  double P0;  ///< relay transmit power [W]
  double N0;  ///< relay noise power [W]
  double Nk;  ///< user noise power [W], identical for every user
};

/// Effective relay-to-user gain |g_k|^2 P0 / N_k.
inline double effective_gain(const MwrcChannel& chan, std::size_t k) {
  return std::norm(chan.g[k]) * chan.P0 / chan.Nk[k];
}

/// Maps the AF relay channel onto SINR rate-model coefficients. For stream k
/// (decoded at user k+1) with gain = effective_gain(k+1):
///
///   theta_k      = |h_k|^2
///   sigma2_k     = N0 (1 + 1/gain)
///   eta(k,k)     = |h_k|^2 / gain          (self-interference via the relay)
///   eta(k,k+1)   = |h_{k+1}|^2 / gain
///   eta(k,i)     = |h_i|^2 (1 + 1/gain)    otherwise
///
/// The resulting rate(net, p, k) reproduces the AF relay SINR identically.
inline InterferenceNetwork to_interference_network(const MwrcChannel& chan) {
  chan.validate();
  const std::size_t n = chan.size();
  InterferenceNetwork net;
  net.theta.resize(n);
  net.sigma2.resize(n);
  net.eta.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t rx = (k + 1) % n;
    const double ginv = 1.0 / effective_gain(chan, rx);
    net.theta[k] = std::norm(chan.h[k]);
    net.sigma2[k] = chan.N0 * (1.0 + ginv);
    for (std::size_t i = 0; i < n; ++i) {
      const double hi2 = std::norm(chan.h[i]);
      if (i == k) {
        net.eta_at(k, i) = hi2 * ginv;
      } else if (i == rx) {
        net.eta_at(k, i) = hi2 * ginv;
      } else {
        net.eta_at(k, i) = hi2 * (1.0 + ginv);
      }
    }
  }
  net.validate();
  return net;
}

/// Draws one channel realization: h_k i.i.d. circularly symmetric complex
/// Gaussian with unit variance (real and imaginary parts N(0, 1/2)), and
/// g_k = conj(h_k) under reciprocity, otherwise an independent draw.
/// Deterministic for a fixed (seed, K, reciprocal).
inline MwrcChannel generate_channels(const ChannelGenConfig& cfg,
                                     const MwrcScenario& scenario) {
  detail::require(cfg.K >= 1, "ChannelGenConfig: K must be >= 1");
  detail::require(scenario.P0 > 0.0 && scenario.N0 > 0.0 && scenario.Nk > 0.0,
                  "MwrcScenario: powers must be > 0");
  std::mt19937_64 rng(cfg.seed);
  const double inv_sqrt2 = 0.70710678118654752440;
  MwrcChannel chan;
  chan.h.resize(cfg.K);
  chan.g.resize(cfg.K);
  chan.N0 = scenario.N0;
  chan.Nk.assign(cfg.K, scenario.Nk);
  chan.P0 = scenario.P0;
  for (std::size_t k = 0; k < cfg.K; ++k) {
    const GaussianPair z = gaussian_pair(rng);
    chan.h[k] = std::complex<double>(z.z0 * inv_sqrt2, z.z1 * inv_sqrt2);
  }
  if (cfg.reciprocal) {
    for (std::size_t k = 0; k < cfg.K; ++k) chan.g[k] = std::conj(chan.h[k]);
  } else {
    for (std::size_t k = 0; k < cfg.K; ++k) {
      const GaussianPair z = gaussian_pair(rng);
      chan.g[k] = std::complex<double>(z.z0 * inv_sqrt2, z.z1 * inv_sqrt2);
    }
  }
  return chan;
}

}  // namespace wsee
