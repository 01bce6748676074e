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
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <unordered_map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "wsee/problem.hpp"

namespace wsee {

struct PolyblockConfig {
  double tol = 1e-4;          ///< relative optimality gap at termination
  std::int64_t max_iters = 5'000'000;  ///< vertex-selection cap
  std::size_t max_vertices = 1'000'000;  ///< live vertex-set memory cap
  double bisect_tol = 1e-9;   ///< projection bisection tolerance along the ray
  /// Cuts below snap_tol * corner_i collapse to the face exactly. Without the
  /// snap, vertex families approach a face geometrically without ever reaching
  /// it, re-splitting forever at essentially constant objective value. The
  /// objective mass in the discarded sliver is of the same order as the
  /// projection tolerance's.
  double snap_tol = 1e-9;
  /// Cuts are rounded up onto a per-coordinate geometric lattice with this
  /// ratio (rounding up only enlarges child boxes, so coverage is kept).
  /// Repeated near-identical splits then produce bitwise-equal coordinates,
  /// which lets the redundancy filter collapse them.
  double cut_lattice_ratio = 0.98;
  bool record_trace = false;  ///< keep the (upper bound, incumbent) series
};

enum class PolyblockStatus {
  kConverged,
  kIterBudget,
  kVertexBudget,
  kDeadline,
};

struct PolyblockResult {
  std::vector<double> best_point;  ///< feasible incumbent
  double best_value = 0.0;
  double upper_bound = 0.0;  ///< valid bound on the true maximum
  std::int64_t iters = 0;
  PolyblockStatus status = PolyblockStatus::kConverged;
  /// Per-iteration (upper bound, incumbent) when record_trace is on.
  std::vector<std::pair<double, double>> trace;
};

namespace detail {

// Vertices are stored inline to keep the set compact: runs of this algorithm
// routinely hold millions of live vertices (the vertex count grows linearly
// with the iteration count), so per-vertex heap allocations would dominate
// memory. Dimensions above the inline capacity are rejected up front; the
// lifted problems this library builds have dimension K + 1.
inline constexpr std::size_t kPolyblockMaxDim = 8;

struct PolyVertex {
  double value;
  std::array<double, kPolyblockMaxDim> z;
};

struct PolyVertexLess {
  bool operator()(const PolyVertex& a, const PolyVertex& b) const {
    return a.value < b.value;
  }
};

// Boundary of a normal set along the ray 0 -> v, by bisection on the scale
// factor. Returns (lo, hi) with lo feasible, hi infeasible, hi - lo <= tol.
// Pre: origin feasible, v infeasible.
template <class Feasible>
std::pair<double, double> ray_boundary(Feasible&& feasible,
                                       const std::vector<double>& v,
                                       double tol) {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> probe(v.size());
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < v.size(); ++i) probe[i] = mid * v[i];
    if (feasible(probe)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

// Default hooks: no incumbent improvement, projection by boolean bisection.
struct IdentityImprove {
  void operator()(std::vector<double>&) const {}
};
struct DefaultProjector {};

// Redundancy filter over everything ever pushed. A candidate equal to some
// earlier vertex in all coordinates but one, with the remaining coordinate not
// larger, sits inside that vertex's box: the region is already covered by the
// earlier vertex or its descendants (or was accounted when pruned), so the
// candidate can be dropped. Keys are 128-bit hashes of the "all but one
// coordinate" bit patterns; the map keeps the largest spare coordinate seen.
class RedundancyFilter {
 public:
  explicit RedundancyFilter(std::size_t n) : n_(n), maps_(n) {}

  bool redundant(const std::array<double, kPolyblockMaxDim>& z) const {
    for (std::size_t d = 0; d < n_; ++d) {
      const auto it = maps_[d].find(key_except(z, d));
      if (it != maps_[d].end() && it->second >= z[d]) return true;
    }
    return false;
  }

  void insert(const std::array<double, kPolyblockMaxDim>& z) {
    if (entries_ >= kMaxEntries) return;  // filter becomes advisory
    for (std::size_t d = 0; d < n_; ++d) {
      double& slot = maps_[d][key_except(z, d)];
      slot = std::max(slot, z[d]);
      ++entries_;
    }
  }

 private:
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return k.first ^ (k.second * 0x9e3779b97f4a7c15ULL);
    }
  };
  static constexpr std::size_t kMaxEntries = 20'000'000;

  Key key_except(const std::array<double, kPolyblockMaxDim>& z,
                 std::size_t skip) const {
    std::uint64_t a = 0x243f6a8885a308d3ULL;
    std::uint64_t b = 0x13198a2e03707344ULL;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == skip) continue;
      std::uint64_t bits;
      std::memcpy(&bits, &z[i], sizeof(bits));
      a = (a ^ bits) * 0xff51afd7ed558ccdULL;
      a ^= a >> 33;
      b = (b ^ bits) * 0xc4ceb9fe1a85ec53ULL;
      b ^= b >> 29;
    }
    return {a, b};
  }

  std::size_t n_;
  std::size_t entries_ = 0;
  std::vector<std::unordered_map<Key, double, KeyHash>> maps_;
};

}  // namespace detail

/// Maximizes a coordinate-wise nondecreasing `objective` over a normal
/// (downward-closed) subset of the box [0, upper_corner] described by the
/// `feasible` predicate. The feasible set must contain the origin.
///
/// Outer approximation by a shrinking union of boxes: the vertex with the
/// best objective is popped (its value is the current upper bound), projected
/// onto the feasible boundary along the ray from the origin, and replaced by
/// one child per coordinate. The projection's feasible end updates the
/// incumbent; children are cut at the infeasible end so the union of boxes
/// always covers the feasible set.
///
/// Vertices that cannot beat the incumbent by more than the termination band
///   band = tol * max(1, |incumbent|)
/// are dropped; the running `prune_ceiling` keeps the reported upper bound
/// valid for the discarded regions. Terminates when the best vertex value is
/// inside the band, or on an iteration/vertex/deadline budget, in which case
/// the incumbent and the still-valid upper bound are returned with the
/// corresponding status.
///
/// Optional hooks:
///  - `improve` maps a feasible point to another feasible point (typically
///    raising coordinates to the boundary of their fiber); it is applied to
///    every projection before the incumbent update.
///  - `projector` replaces the boolean-bisection boundary search: it must
///    return (lo, hi) with lo * v feasible, hi * v infeasible and
///    hi - lo <= cfg.bisect_tol.
template <class Objective, class Feasible,
          class Improve = detail::IdentityImprove,
          class Projector = detail::DefaultProjector>
PolyblockResult polyblock_maximize(
    Objective&& objective, Feasible&& feasible,
    const std::vector<double>& upper_corner, const PolyblockConfig& cfg,
    std::optional<std::chrono::steady_clock::time_point> deadline = {},
    Improve&& improve = {}, Projector&& projector = {}) {
  detail::require(!upper_corner.empty(), "polyblock: empty upper corner");
  detail::require(upper_corner.size() <= detail::kPolyblockMaxDim,
                  "polyblock: dimension above inline vertex capacity");
  detail::require(cfg.tol > 0.0, "polyblock: tol must be > 0");
  const std::size_t n = upper_corner.size();

  const std::vector<double> origin(n, 0.0);
  detail::require(feasible(origin), "polyblock: origin must be feasible");

  PolyblockResult res;
  res.best_point = origin;
  res.best_value = objective(origin);

  std::vector<detail::PolyVertex> heap;
  detail::RedundancyFilter filter(n);
  {
    detail::PolyVertex top{objective(upper_corner), {}};
    std::copy_n(upper_corner.begin(), n, top.z.begin());
    heap.push_back(top);
    filter.insert(top.z);
  }
  const detail::PolyVertexLess less{};

  const double lattice_log = std::log(cfg.cut_lattice_ratio);
  // Rounds a cut up onto the geometric lattice of its coordinate; falls back
  // to the raw cut when the lattice point would not shrink the coordinate.
  const auto lattice_up = [&](double cut, double corner, double current) {
    const double k = std::floor(std::log(cut / corner) / lattice_log);
    double pt = corner * std::exp(k * lattice_log);
    if (pt < cut) pt = corner * std::exp((k - 1.0) * lattice_log);
    return pt < current && pt >= cut ? pt : cut;
  };

  const auto band = [&] {
    return cfg.tol * std::max(1.0, std::abs(res.best_value));
  };
  // Highest threshold any vertex has ever been pruned at; the true maximum
  // over all discarded boxes is below this.
  double prune_ceiling = res.best_value;

  std::vector<double> vertex(n);
  std::vector<double> proj(n);
  std::vector<double> child(n);
  std::size_t compact_trigger = 4096;
  while (!heap.empty()) {
    if (res.iters >= cfg.max_iters) {
      res.status = PolyblockStatus::kIterBudget;
      res.upper_bound = std::max(heap.front().value, prune_ceiling);
      return res;
    }
    if (deadline && std::chrono::steady_clock::now() >= *deadline) {
      res.status = PolyblockStatus::kDeadline;
      res.upper_bound = std::max(heap.front().value, prune_ceiling);
      return res;
    }

    std::pop_heap(heap.begin(), heap.end(), less);
    const detail::PolyVertex v = heap.back();
    heap.pop_back();
    ++res.iters;
    std::copy_n(v.z.begin(), n, vertex.begin());

    const double ub = v.value;
    if (cfg.record_trace) res.trace.emplace_back(ub, res.best_value);
    if (ub <= res.best_value + band()) {
      res.status = PolyblockStatus::kConverged;
      res.upper_bound = std::max(ub, prune_ceiling);
      return res;
    }

    if (feasible(vertex)) {
      // The best vertex itself is feasible: it attains the bound.
      res.best_point = vertex;
      res.best_value = ub;
      res.status = PolyblockStatus::kConverged;
      res.upper_bound = std::max(ub, prune_ceiling);
      return res;
    }

    double mu_lo = 0.0;
    double mu_hi = 1.0;
    if constexpr (std::is_same_v<std::decay_t<Projector>,
                                 detail::DefaultProjector>) {
      std::tie(mu_lo, mu_hi) =
          detail::ray_boundary(feasible, vertex, cfg.bisect_tol);
    } else {
      std::tie(mu_lo, mu_hi) = projector(vertex, cfg.bisect_tol);
    }
    for (std::size_t i = 0; i < n; ++i) proj[i] = mu_lo * vertex[i];
    improve(proj);
    const double proj_val = objective(proj);
    if (proj_val > res.best_value) {
      res.best_value = proj_val;
      res.best_point = proj;
    }

    // Children cut at the just-infeasible point mu_hi * v: every feasible
    // point outside all child boxes would dominate an infeasible point,
    // contradicting normality, so coverage is preserved.
    const double threshold = res.best_value + band();
    for (std::size_t i = 0; i < n; ++i) {
      double cut = mu_hi * vertex[i];
      if (cut < cfg.snap_tol * upper_corner[i]) {
        cut = 0.0;
      } else {
        cut = lattice_up(cut, upper_corner[i], vertex[i]);
      }
      if (!(cut < vertex[i])) continue;  // degenerate coordinate, child == parent

      detail::PolyVertex stored = v;
      stored.z[i] = cut;
      if (filter.redundant(stored.z)) continue;

      child = vertex;
      child[i] = cut;
      const double child_value = objective(child);
      child[i] = vertex[i];
      if (child_value <= threshold) {
        prune_ceiling = std::max(prune_ceiling, threshold);
        continue;  // cannot improve beyond the termination band
      }
      if (heap.size() >= cfg.max_vertices) {
        res.status = PolyblockStatus::kVertexBudget;
        res.upper_bound = std::max(ub, prune_ceiling);
        return res;
      }
      stored.value = child_value;
      filter.insert(stored.z);
      heap.push_back(stored);
      std::push_heap(heap.begin(), heap.end(), less);
    }

    // Periodic compaction: drop vertices that fell inside the band as the
    // incumbent rose.
    if (heap.size() >= compact_trigger) {
      const double cutoff = res.best_value + band();
      auto keep_end = std::remove_if(
          heap.begin(), heap.end(),
          [&](const detail::PolyVertex& w) { return w.value <= cutoff; });
      if (keep_end != heap.end()) {
        prune_ceiling = std::max(prune_ceiling, cutoff);
        heap.erase(keep_end, heap.end());
        std::make_heap(heap.begin(), heap.end(), less);
      }
      compact_trigger = std::max<std::size_t>(4096, 2 * heap.size());
    }
  }

  // Vertex set exhausted: nothing above the termination band remains.
  res.status = PolyblockStatus::kConverged;
  res.upper_bound = std::max(res.best_value, prune_ceiling);
  return res;
}

}  // namespace wsee
