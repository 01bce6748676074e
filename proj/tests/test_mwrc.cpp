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
#include <complex>

#include "testutil.hpp"
#include "wsee/io.hpp"
#include "wsee/mwrc.hpp"
#include "wsee/rates.hpp"

using namespace wsee;

using testutil::relay_rate_reference;

TEST_CASE("effective_gain closed forms") {
  MwrcChannel chan;
  chan.h = {{1.0, 0.0}};
  chan.g = {{1.0, 0.0}};
  chan.N0 = 1.0;
  chan.Nk = {1.0};
  chan.P0 = 1.0;
  CHECK(effective_gain(chan, 0) == 1.0);

  chan.g = {{2.0, 0.0}};
  chan.P0 = 2.0;
  chan.Nk = {0.5};
  CHECK(effective_gain(chan, 0) == 16.0);

  std::mt19937_64 rng(7);
  chan.g = {{testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1)}};
  chan.P0 = testutil::log_uniform(rng, 0.1, 10);
  chan.Nk = {testutil::log_uniform(rng, 0.1, 10)};
  CHECK(effective_gain(chan, 0) ==
        std::norm(chan.g[0]) * chan.P0 / chan.Nk[0]);
}

TEST_CASE("mapping: symmetric three-user example") {
  MwrcChannel chan;
  chan.h = {{1, 0}, {1, 0}, {1, 0}};
  chan.g = {{1, 0}, {1, 0}, {1, 0}};
  chan.N0 = 1.0;
  chan.Nk = {1.0, 1.0, 1.0};
  chan.P0 = 1.0;

  const InterferenceNetwork net = to_interference_network(chan);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(net.theta[k] == 1.0);
    CHECK(net.sigma2[k] == 2.0);
    CHECK(net.eta_at(k, k) == 1.0);
    CHECK(net.eta_at(k, (k + 1) % 3) == 1.0);
    CHECK(net.eta_at(k, (k + 2) % 3) == 2.0);
  }

  const PowerVector p{1.0, 1.0, 1.0};
  CHECK(std::abs(rate(net, p, 0) - std::log(1.0 + 1.0 / 6.0)) < 1e-15);
  CHECK(std::abs(relay_rate_reference(chan, p, 0) - rate(net, p, 0)) < 1e-15);
}

TEST_CASE("mapping: cyclic index wraps K to 1") {
  MwrcChannel chan;
  chan.h = {{2, 0}, {1, 1}, {0.5, -0.5}};
  chan.g = {std::conj(chan.h[0]), std::conj(chan.h[1]), std::conj(chan.h[2])};
  chan.N0 = 0.01;
  chan.Nk = {0.01, 0.01, 0.01};
  chan.P0 = 0.5;

  const InterferenceNetwork net = to_interference_network(chan);
  // Stream K-1 is decoded at user 0, so its row uses effective gain 0.
  const double ginv = 1.0 / effective_gain(chan, 0);
  CHECK(std::abs(net.eta_at(2, 2) - std::norm(chan.h[2]) * ginv) < 1e-15);
  CHECK(std::abs(net.eta_at(2, 0) - std::norm(chan.h[0]) * ginv) < 1e-15);
  CHECK(std::abs(net.eta_at(2, 1) - std::norm(chan.h[1]) * (1.0 + ginv)) <
        1e-15);
}

TEST_CASE("mapping: rate identity over random channels") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(
                                  testutil::uniform(rng, 0.0, 3.0));
    const ChannelGenConfig gen{rng(), k, trial % 2 == 0};
    const MwrcScenario scenario{testutil::log_uniform(rng, 1e-3, 1e2),
                                testutil::log_uniform(rng, 1e-3, 1.0),
                                testutil::log_uniform(rng, 1e-3, 1.0)};
    const MwrcChannel chan = generate_channels(gen, scenario);
    const InterferenceNetwork net = to_interference_network(chan);
    net.validate();

    PowerVector p(k);
    for (auto& pi : p) pi = testutil::log_uniform(rng, 1e-3, 10.0);
    for (std::size_t s = 0; s < k; ++s) {
      const double got = rate(net, p, s);
      const double want = relay_rate_reference(chan, p, s);
      CHECK(testutil::rel_err(got, want) < 1e-12);
    }
  }
}

TEST_CASE("generate_channels: reciprocity and determinism") {
  const ChannelGenConfig gen{42, 3, true};
  const MwrcScenario scenario{1.0, 1e-2, 1e-2};
  const MwrcChannel a = generate_channels(gen, scenario);
  const MwrcChannel b = generate_channels(gen, scenario);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.h[k] == b.h[k]);
    CHECK(a.g[k] == std::conj(a.h[k]));
    CHECK(std::norm(a.g[k]) == std::norm(a.h[k]));
  }
  const MwrcChannel c = generate_channels({43, 3, true}, scenario);
  CHECK(a.h[0] != c.h[0]);

  const MwrcChannel d = generate_channels({42, 3, false}, scenario);
  CHECK(d.g[0] != std::conj(d.h[0]));
}

TEST_CASE("generate_channels: sample statistics") {
  const MwrcScenario scenario{1.0, 1e-2, 1e-2};
  const long n = 100000;
  double sum_mag2 = 0.0;
  double sum_re = 0.0;
  double sum_im = 0.0;
  double sum_reim = 0.0;
  for (long i = 0; i < n; ++i) {
    const ChannelGenConfig gen{substream_seed(2024, static_cast<std::uint64_t>(i)),
                               1, true};
    const MwrcChannel chan = generate_channels(gen, scenario);
    sum_mag2 += std::norm(chan.h[0]);
    sum_re += chan.h[0].real();
    sum_im += chan.h[0].imag();
    sum_reim += chan.h[0].real() * chan.h[0].imag();
  }
  // |h|^2 is Exp(1): mean 1, std 1 -> standard error 1/sqrt(n).
  const double se_mag2 = 1.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum_mag2 / n - 1.0) < 3.0 * se_mag2);
  // Re and Im are N(0, 1/2); their product has std 1/2.
  const double se_mean = std::sqrt(0.5) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum_re / n) < 3.0 * se_mean);
  CHECK(std::abs(sum_im / n) < 3.0 * se_mean);
  const double se_corr = 0.5 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum_reim / n) < 3.0 * se_corr);
}

TEST_CASE("channel JSON export round-trip") {
  const ChannelGenConfig gen{7, 3, true};
  const MwrcChannel chan = generate_channels(gen, {2.0, 1e-2, 1e-2});
  const nlohmann::json j = channel_to_json(chan);
  CHECK(j.contains("network"));
  CHECK(j.at("network").at("K").get<std::size_t>() == 3);
  const MwrcChannel back = channel_from_json(j);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.h[k] == chan.h[k]);
    CHECK(back.g[k] == chan.g[k]);
  }
  CHECK(back.P0 == chan.P0);

  const auto net_back = j.at("network").get<InterferenceNetwork>();
  const auto net = to_interference_network(chan);
  CHECK(net_back.theta == net.theta);
  CHECK(net_back.eta == net.eta);
}
