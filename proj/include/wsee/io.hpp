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
#include <cstddef>
#include <vector>

#include <json.hpp>

#include "wsee/mwrc.hpp"
#include "wsee/problem.hpp"

namespace wsee {

// JSON schemas are flat and linear-scale throughout. A problem instance is
//   { "K", "theta", "eta", "sigma2", "w", "phi", "pc", "pmax" }
// with "eta" nested row by row. A channel dump carries the mapped network
// plus the raw complex channels as [re, im] pairs for audit.

namespace detail {

inline std::vector<std::vector<double>> to_nested(
    const std::vector<double>& flat, std::size_t n) {
  std::vector<std::vector<double>> rows(n);
  for (std::size_t k = 0; k < n; ++k) {
    rows[k].assign(flat.begin() + static_cast<std::ptrdiff_t>(k * n),
                   flat.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  }
  return rows;
}

inline std::vector<double> from_nested(
    const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.size());
  for (const auto& row : rows) {
    require(row.size() == rows.size(), "eta matrix is not square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const InterferenceNetwork& net) {
  j = nlohmann::json{{"K", net.size()},
                     {"theta", net.theta},
                     {"eta", detail::to_nested(net.eta, net.size())},
                     {"sigma2", net.sigma2}};
}

inline void from_json(const nlohmann::json& j, InterferenceNetwork& net) {
  const auto k = j.at("K").get<std::size_t>();
  net.theta = j.at("theta").get<std::vector<double>>();
  net.sigma2 = j.at("sigma2").get<std::vector<double>>();
  net.eta = detail::from_nested(
      j.at("eta").get<std::vector<std::vector<double>>>());
  detail::require(net.theta.size() == k, "K does not match theta size");
  net.validate();
}

inline void to_json(nlohmann::json& j, const WseeProblem& prob) {
  j = nlohmann::json{{"K", prob.size()},
                     {"theta", prob.net.theta},
                     {"eta", detail::to_nested(prob.net.eta, prob.size())},
                     {"sigma2", prob.net.sigma2},
                     {"w", prob.w},
                     {"phi", prob.pm.phi},
                     {"pc", prob.pm.pc},
                     {"pmax", prob.pmax}};
}

inline void from_json(const nlohmann::json& j, WseeProblem& prob) {
  const auto k = j.at("K").get<std::size_t>();
  prob.net.theta = j.at("theta").get<std::vector<double>>();
  prob.net.sigma2 = j.at("sigma2").get<std::vector<double>>();
  prob.net.eta = detail::from_nested(
      j.at("eta").get<std::vector<std::vector<double>>>());
  prob.pm.phi = j.at("phi").get<std::vector<double>>();
  prob.pm.pc = j.at("pc").get<std::vector<double>>();
  prob.w = j.at("w").get<std::vector<double>>();
  prob.pmax = j.at("pmax").get<std::vector<double>>();
  detail::require(prob.net.theta.size() == k, "K does not match theta size");
  prob.validate();
}

inline nlohmann::json channel_to_json(const MwrcChannel& chan) {
  auto pairs = [](const std::vector<std::complex<double>>& v) {
    std::vector<std::vector<double>> out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back({c.real(), c.imag()});
    return out;
  };
  return nlohmann::json{{"network", to_interference_network(chan)},
                        {"h", pairs(chan.h)},
                        {"g", pairs(chan.g)},
                        {"N0", chan.N0},
                        {"Nk", chan.Nk},
                        {"P0", chan.P0}};
}

inline MwrcChannel channel_from_json(const nlohmann::json& j) {
  auto unpairs = [](const std::vector<std::vector<double>>& v) {
    std::vector<std::complex<double>> out;
    out.reserve(v.size());
    for (const auto& c : v) {
      detail::require(c.size() == 2, "complex entry must be [re, im]");
      out.emplace_back(c[0], c[1]);
    }
    return out;
  };
  MwrcChannel chan;
  chan.h = unpairs(j.at("h").get<std::vector<std::vector<double>>>());
  chan.g = unpairs(j.at("g").get<std::vector<std::vector<double>>>());
  chan.N0 = j.at("N0").get<double>();
  chan.Nk = j.at("Nk").get<std::vector<double>>();
  chan.P0 = j.at("P0").get<double>();
  chan.validate();
  return chan;
}

}  // namespace wsee
