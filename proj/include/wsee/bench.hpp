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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wsee/dinkelbach.hpp"
#include "wsee/io.hpp"
#include "wsee/mwrc.hpp"
#include "wsee/random.hpp"
#include "wsee/sca.hpp"

namespace wsee {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Node constants shared across a sweep: every user has the same circuit
/// power, amplifier inefficiency and noise level; the relay power and every
/// power budget equal the sweep's current P_max.
struct SweepScenario {
  double pc = 1.0;
  double phi = 2.5;
  double noise = 1e-2;  ///< N0 = Nk
};

struct SweepConfig {
  std::vector<double> pmax_db = {-30, -25, -20, -15, -10, -5, 0,
                                 5,   10,  15,  20,  25,  30};
  std::size_t K = 3;
  int realizations = 100;
  std::uint64_t seed = 1;
  SweepScenario scenario;
  std::vector<double> weights;  ///< empty = all ones
  bool run_sca = true;
  bool run_global = false;
  bool warm_start = true;        ///< SCA starts from the previous P_max optimum
  bool cold_start_audit = false; ///< additionally record cold-started SCA rows
  bool force_global = false;     ///< run global even for P_max > 0 dB or K > 3
  int workers = 0;               ///< 0 = hardware concurrency
  ScaConfig sca;
  DinkelbachConfig global;

  SweepConfig() { global.max_seconds = 300.0; }

  void validate() const {
    detail::require(!pmax_db.empty(), "SweepConfig: empty pmax_db sweep");
    detail::require(K >= 1, "SweepConfig: K must be >= 1");
    detail::require(realizations >= 1, "SweepConfig: realizations must be >= 1");
    detail::require(scenario.pc > 0 && scenario.phi > 0 && scenario.noise > 0,
                    "SweepConfig: scenario constants must be > 0");
    detail::require(weights.empty() || weights.size() == K,
                    "SweepConfig: weights size must equal K");
    detail::require(run_sca || run_global, "SweepConfig: no solver selected");
    sca.validate();
    global.validate();
  }
};

/// One benchmark row: a single solver applied to one (P_max, realization).
struct SweepRecord {
  double pmax_db = 0.0;
  int realization = 0;
  std::string solver;  ///< "sca", "sca_cold" or "global"
  double wsee = 0.0;
  std::vector<double> p;
  double iters_outer = 0.0;
  double iters_inner = 0.0;  ///< inner iterations per outer, 0 for SCA
  double iters_total = 0.0;
  double wall_ms = 0.0;
  std::string status;  ///< "converged", "max-iters", "budget-exhausted", "error"
};

struct SweepAggregateRow {
  double pmax_db = 0.0;
  std::string solver;
  int n_rows = 0;
  int n_converged = 0;
  double converged_fraction = 0.0;
  // Means over the converged subset only.
  double mean_wsee = 0.0;
  double mean_iters_outer = 0.0;
  double mean_iters_inner = 0.0;
  double mean_iters_total = 0.0;
};

struct SweepOutput {
  std::vector<SweepRecord> records;  ///< sorted by (pmax_db, realization, solver)
  std::vector<SweepAggregateRow> aggregate;
};

namespace detail {

inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline bool record_order(const SweepRecord& a, const SweepRecord& b) {
  if (a.pmax_db != b.pmax_db) return a.pmax_db < b.pmax_db;
  if (a.realization != b.realization) return a.realization < b.realization;
  return a.solver < b.solver;
}

inline std::vector<SweepAggregateRow> aggregate_records(
    const std::vector<SweepRecord>& records) {
  std::map<std::pair<double, std::string>, SweepAggregateRow> rows;
  for (const SweepRecord& r : records) {
    SweepAggregateRow& row = rows[{r.pmax_db, r.solver}];
    row.pmax_db = r.pmax_db;
    row.solver = r.solver;
    ++row.n_rows;
    if (r.status == "converged") {
      ++row.n_converged;
      row.mean_wsee += r.wsee;
      row.mean_iters_outer += r.iters_outer;
      row.mean_iters_inner += r.iters_inner;
      row.mean_iters_total += r.iters_total;
    }
  }
  std::vector<SweepAggregateRow> out;
  out.reserve(rows.size());
  for (auto& [key, row] : rows) {
    if (row.n_converged > 0) {
      row.mean_wsee /= row.n_converged;
      row.mean_iters_outer /= row.n_converged;
      row.mean_iters_inner /= row.n_converged;
      row.mean_iters_total /= row.n_converged;
    }
    row.converged_fraction = static_cast<double>(row.n_converged) / row.n_rows;
    out.push_back(std::move(row));
  }
  return out;
}

inline SweepRecord error_record(double pmax_db, int realization,
                                const std::string& solver, std::size_t k,
                                const std::string&) {
  SweepRecord rec;
  rec.pmax_db = pmax_db;
  rec.realization = realization;
  rec.solver = solver;
  rec.wsee = std::nan("");
  rec.p.assign(k, 0.0);
  rec.status = "error";
  return rec;
}

}  // namespace detail

namespace detail {

struct RealizationRunner {
  const SweepConfig* cfg;
  std::vector<double> pmax_sorted;

  WseeProblem build_problem(const MwrcChannel& chan, double plin) const {
    WseeProblem prob;
    prob.net = to_interference_network(chan);
    prob.pm.phi.assign(cfg->K, cfg->scenario.phi);
    prob.pm.pc.assign(cfg->K, cfg->scenario.pc);
    prob.w = cfg->weights.empty() ? std::vector<double>(cfg->K, 1.0)
                                  : cfg->weights;
    prob.pmax.assign(cfg->K, plin);
    return prob;
  }

  SweepRecord run_sca_point(const WseeProblem& prob, double pmax_db,
                            int realization, const std::string& solver_id,
                            const std::optional<PowerVector>& p0) const {
    SweepRecord rec;
    rec.pmax_db = pmax_db;
    rec.realization = realization;
    rec.solver = solver_id;
    ScaConfig sc = cfg->sca;
    sc.p0 = p0;
    const auto t0 = std::chrono::steady_clock::now();
    const ScaResult r = sca_solve(prob, sc);
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    rec.wsee = r.f_star;
    rec.p = r.p_star;
    rec.iters_outer = r.iters;
    rec.iters_inner = 0.0;
    rec.iters_total = r.iters;
    rec.status = r.status == ScaStatus::kConverged ? "converged" : "max-iters";
    return rec;
  }

  SweepRecord run_global_point(const WseeProblem& prob, double pmax_db,
                               int realization) const {
    SweepRecord rec;
    rec.pmax_db = pmax_db;
    rec.realization = realization;
    rec.solver = "global";
    const auto t0 = std::chrono::steady_clock::now();
    const GlobalResult r = dinkelbach_solve(prob, cfg->global);
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    rec.wsee = r.f_star;
    rec.p = r.p_star;
    rec.iters_outer = r.outer_iters;
    rec.iters_total = static_cast<double>(r.inner_iters_total);
    rec.iters_inner = r.outer_iters > 0
                          ? rec.iters_total / r.outer_iters
                          : 0.0;
    rec.status = r.status == GlobalStatus::kConverged ? "converged"
                                                      : "budget-exhausted";
    return rec;
  }

  std::vector<SweepRecord> operator()(int realization) const {
    std::vector<SweepRecord> out;
    const ChannelGenConfig gen{substream_seed(cfg->seed, realization), cfg->K,
                               true};
    // Fading is drawn once per realization; only the relay power and the
    // power budgets change along the sweep.
    MwrcChannel chan = generate_channels(
        gen, MwrcScenario{1.0, cfg->scenario.noise, cfg->scenario.noise});

    std::optional<PowerVector> warm;
    for (const double pdb : pmax_sorted) {
      const double plin = db_to_linear(pdb);
      chan.P0 = plin;
      const WseeProblem prob = build_problem(chan, plin);

      if (cfg->run_sca) {
        try {
          const auto p0 =
              cfg->warm_start && warm ? std::optional<PowerVector>(*warm)
                                      : std::nullopt;
          SweepRecord rec = run_sca_point(prob, pdb, realization, "sca", p0);
          if (cfg->warm_start) warm = rec.p;
          out.push_back(std::move(rec));
        } catch (const std::exception& e) {
          out.push_back(
              detail::error_record(pdb, realization, "sca", cfg->K, e.what()));
        }
        if (cfg->warm_start && cfg->cold_start_audit) {
          try {
            out.push_back(run_sca_point(prob, pdb, realization, "sca_cold",
                                        std::nullopt));
          } catch (const std::exception& e) {
            out.push_back(detail::error_record(pdb, realization, "sca_cold",
                                               cfg->K, e.what()));
          }
        }
      }

      if (cfg->run_global &&
          (cfg->force_global || (pdb <= 0.0 && cfg->K <= 3))) {
        try {
          out.push_back(run_global_point(prob, pdb, realization));
        } catch (const std::exception& e) {
          out.push_back(detail::error_record(pdb, realization, "global",
                                             cfg->K, e.what()));
        }
      }
    }
    return out;
  }
};

}  // namespace detail

/// Runs the full Monte-Carlo sweep. Realizations fan out to a worker pool;
/// channel draws are keyed by (seed, realization) so the record set is
/// identical for any worker count. Records are sorted canonically before
/// return. Solver failures become per-row "error" records and never abort
/// the sweep.
inline SweepOutput run_sweep(
    const SweepConfig& cfg,
    const std::function<void(int, int)>& progress = nullptr) {
  cfg.validate();
  detail::RealizationRunner runner{&cfg, cfg.pmax_db};
  std::sort(runner.pmax_sorted.begin(), runner.pmax_sorted.end());

  const int total = cfg.realizations;
  std::vector<std::vector<SweepRecord>> per_realization(total);
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;

  const auto work = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= total) break;
      per_realization[r] = runner(r);
      const int d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(d, total);
      }
    }
  };

  int n_workers = cfg.workers > 0
                      ? cfg.workers
                      : static_cast<int>(
                            std::max(1u, std::thread::hardware_concurrency()));
  n_workers = std::min(n_workers, total);
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  SweepOutput out;
  for (auto& batch : per_realization) {
    out.records.insert(out.records.end(),
                       std::make_move_iterator(batch.begin()),
                       std::make_move_iterator(batch.end()));
  }
  std::sort(out.records.begin(), out.records.end(), detail::record_order);
  out.aggregate = detail::aggregate_records(out.records);
  return out;
}

/// Writes records as CSV: header plus one row per record, floating point with
/// 12 significant digits. Refuses an empty record set before touching the
/// file; I/O failures carry the path.
inline void emit_csv(const std::vector<SweepRecord>& records,
                     const std::string& path) {
  detail::require(!records.empty(), "emit_csv: no records");
  const std::size_t k = records.front().p.size();
  for (const SweepRecord& r : records) {
    detail::require(r.p.size() == k, "emit_csv: inconsistent user counts");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out << "pmax_db,realization,solver,wsee_nats_per_joule";
  for (std::size_t i = 1; i <= k; ++i) out << ",p_" << i;
  out << ",iters_outer,iters_inner,iters_total,wall_ms,status\n";
  for (const SweepRecord& r : records) {
    out << detail::format_g12(r.pmax_db) << ',' << r.realization << ','
        << r.solver << ',' << detail::format_g12(r.wsee);
    for (double pi : r.p) out << ',' << detail::format_g12(pi);
    out << ',' << detail::format_g12(r.iters_outer) << ','
        << detail::format_g12(r.iters_inner) << ','
        << detail::format_g12(r.iters_total) << ','
        << detail::format_g12(r.wall_ms) << ',' << r.status << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

/// Parses a CSV produced by emit_csv.
inline std::vector<SweepRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("parse_csv: empty file " + path);

  const auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = s.find(',', start);
      if (pos == std::string::npos) {
        fields.push_back(s.substr(start));
        break;
      }
      fields.push_back(s.substr(start, pos - start));
      start = pos + 1;
    }
    return fields;
  };

  const std::vector<std::string> header = split(line);
  detail::require(header.size() >= 10, "parse_csv: malformed header");
  const std::size_t k = header.size() - 9;
  std::vector<SweepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line);
    detail::require(f.size() == header.size(), "parse_csv: malformed row");
    SweepRecord r;
    r.pmax_db = std::stod(f[0]);
    r.realization = std::stoi(f[1]);
    r.solver = f[2];
    r.wsee = std::stod(f[3]);
    r.p.resize(k);
    for (std::size_t i = 0; i < k; ++i) r.p[i] = std::stod(f[4 + i]);
    r.iters_outer = std::stod(f[4 + k]);
    r.iters_inner = std::stod(f[5 + k]);
    r.iters_total = std::stod(f[6 + k]);
    r.wall_ms = std::stod(f[7 + k]);
    r.status = f[8 + k];
    records.push_back(std::move(r));
  }
  return records;
}

/// Iteration-count table: one row per P_max with the mean SCA iteration
/// count and, when global rows exist for that P_max, the mean outer / per-
/// outer inner / total inner counts. Missing solver cells print an em-dash.
/// Means are over converged rows only.
inline std::string summarize(const std::vector<SweepRecord>& records) {
  detail::require(!records.empty(), "summarize: no records");
  const std::vector<SweepAggregateRow> agg = detail::aggregate_records(records);

  std::vector<double> pmaxes;
  for (const auto& row : agg) pmaxes.push_back(row.pmax_db);
  std::sort(pmaxes.begin(), pmaxes.end());
  pmaxes.erase(std::unique(pmaxes.begin(), pmaxes.end()), pmaxes.end());

  const auto find_row = [&](double pdb,
                            const std::string& solver) -> const SweepAggregateRow* {
    for (const auto& row : agg) {
      if (row.pmax_db == pdb && row.solver == solver && row.n_converged > 0)
        return &row;
    }
    return nullptr;
  };

  const char* kDash = "—";
  std::ostringstream os;
  char buf[64];
  os << "Pmax [dB]    SCA iters    Global outer    Global inner    Global total\n";
  for (const double pdb : pmaxes) {
    const SweepAggregateRow* sca_row = find_row(pdb, "sca");
    const SweepAggregateRow* glob_row = find_row(pdb, "global");
    const auto cell = [&](const SweepAggregateRow* row, double value,
                          int width) {
      if (row == nullptr) {
        // The em-dash is three bytes but one display column.
        std::string s = kDash;
        s.insert(s.begin(), static_cast<std::size_t>(width - 1), ' ');
        return s;
      }
      std::snprintf(buf, sizeof(buf), "%*.2f", width, value);
      return std::string(buf);
    };
    std::snprintf(buf, sizeof(buf), "%9.1f", pdb);
    os << buf;
    os << cell(sca_row, sca_row ? sca_row->mean_iters_outer : 0.0, 13);
    os << cell(glob_row, glob_row ? glob_row->mean_iters_outer : 0.0, 16);
    os << cell(glob_row, glob_row ? glob_row->mean_iters_inner : 0.0, 16);
    os << cell(glob_row, glob_row ? glob_row->mean_iters_total : 0.0, 16);
    os << '\n';
  }
  return os.str();
}

// SweepConfig JSON mirror. Unknown keys are rejected so config typos fail
// loudly instead of silently falling back to defaults.
inline void from_json(const nlohmann::json& j, SweepConfig& cfg) {
  static const char* known[] = {
      "pmax_db", "K",          "realizations",     "seed",
      "scenario", "weights",   "solvers",          "warm_start",
      "cold_start_audit",      "force_global",     "workers",
      "sca",      "global"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : known) ok = ok || it.key() == key;
    detail::require(ok, "unknown config key: " + it.key());
  }
  if (j.contains("pmax_db")) cfg.pmax_db = j["pmax_db"].get<std::vector<double>>();
  if (j.contains("K")) cfg.K = j["K"].get<std::size_t>();
  if (j.contains("realizations")) cfg.realizations = j["realizations"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("scenario")) {
    const auto& s = j["scenario"];
    if (s.contains("pc")) cfg.scenario.pc = s["pc"].get<double>();
    if (s.contains("phi")) cfg.scenario.phi = s["phi"].get<double>();
    if (s.contains("noise")) cfg.scenario.noise = s["noise"].get<double>();
  }
  if (j.contains("weights")) cfg.weights = j["weights"].get<std::vector<double>>();
  if (j.contains("solvers")) {
    cfg.run_sca = false;
    cfg.run_global = false;
    for (const auto& s : j["solvers"]) {
      const auto name = s.get<std::string>();
      if (name == "sca") {
        cfg.run_sca = true;
      } else if (name == "global") {
        cfg.run_global = true;
      } else {
        throw std::invalid_argument("unknown solver: " + name);
      }
    }
  }
  if (j.contains("warm_start")) cfg.warm_start = j["warm_start"].get<bool>();
  if (j.contains("cold_start_audit"))
    cfg.cold_start_audit = j["cold_start_audit"].get<bool>();
  if (j.contains("force_global")) cfg.force_global = j["force_global"].get<bool>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("sca")) {
    const auto& s = j["sca"];
    if (s.contains("alpha")) cfg.sca.alpha = s["alpha"].get<double>();
    if (s.contains("beta")) cfg.sca.beta = s["beta"].get<double>();
    if (s.contains("max_iters")) cfg.sca.max_iters = s["max_iters"].get<int>();
    if (s.contains("tol_obj")) cfg.sca.tol_obj = s["tol_obj"].get<double>();
    if (s.contains("tol_step")) cfg.sca.tol_step = s["tol_step"].get<double>();
  }
  if (j.contains("global")) {
    const auto& g = j["global"];
    if (g.contains("eps")) cfg.global.eps = g["eps"].get<double>();
    if (g.contains("max_outer")) cfg.global.max_outer = g["max_outer"].get<int>();
    if (g.contains("max_seconds"))
      cfg.global.max_seconds = g["max_seconds"].get<double>();
    if (g.contains("polyblock")) {
      const auto& pb = g["polyblock"];
      if (pb.contains("tol")) cfg.global.inner.tol = pb["tol"].get<double>();
      if (pb.contains("max_iters"))
        cfg.global.inner.max_iters = pb["max_iters"].get<std::int64_t>();
      if (pb.contains("max_vertices"))
        cfg.global.inner.max_vertices = pb["max_vertices"].get<std::size_t>();
    }
  }
}

inline void to_json(nlohmann::json& j, const SweepConfig& cfg) {
  std::vector<std::string> solvers;
  if (cfg.run_sca) solvers.push_back("sca");
  if (cfg.run_global) solvers.push_back("global");
  j = nlohmann::json{
      {"pmax_db", cfg.pmax_db},
      {"K", cfg.K},
      {"realizations", cfg.realizations},
      {"seed", cfg.seed},
      {"scenario",
       {{"pc", cfg.scenario.pc},
        {"phi", cfg.scenario.phi},
        {"noise", cfg.scenario.noise}}},
      {"weights", cfg.weights},
      {"solvers", solvers},
      {"warm_start", cfg.warm_start},
      {"cold_start_audit", cfg.cold_start_audit},
      {"force_global", cfg.force_global},
      {"workers", cfg.workers},
      {"sca",
       {{"alpha", cfg.sca.alpha},
        {"beta", cfg.sca.beta},
        {"max_iters", cfg.sca.max_iters},
        {"tol_obj", cfg.sca.tol_obj},
        {"tol_step", cfg.sca.tol_step}}},
      {"global",
       {{"eps", cfg.global.eps},
        {"max_outer", cfg.global.max_outer},
        {"max_seconds", cfg.global.max_seconds},
        {"polyblock",
         {{"tol", cfg.global.inner.tol},
          {"max_iters", cfg.global.inner.max_iters},
          {"max_vertices", cfg.global.inner.max_vertices}}}}}};
}

/// Per-outer-iteration diagnostic dump of a global solve, CSV.
inline void write_dinkelbach_trace_csv(const GlobalResult& result,
                                       std::ostream& out) {
  out << "outer,lambda,F_value,inner_iters,incumbent,upper_bound\n";
  int i = 1;
  for (const DinkelbachOuterRecord& row : result.trace) {
    out << i++ << ',' << detail::format_g12(row.lambda) << ','
        << detail::format_g12(row.f_value) << ',' << row.inner_iters << ','
        << detail::format_g12(row.incumbent) << ','
        << detail::format_g12(row.upper_bound) << '\n';
  }
}

}  // namespace wsee
