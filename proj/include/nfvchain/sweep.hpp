#pragma once

// Parameter sweeps over seeded snapshots.  Snapshot s uses seed
// base_seed + s at every axis value, so curves compare the same scenarios.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "nfvchain/ara.hpp"
#include "nfvchain/hura.hpp"
#include "nfvchain/milp_exact.hpp"
#include "nfvchain/mining.hpp"
#include "nfvchain/model.hpp"
#include "nfvchain/scenario.hpp"
#include "nfvchain/stats.hpp"

namespace nfvchain {

enum class SolverKind { exact, ara, hura };

inline std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::exact: return "exact";
    case SolverKind::ara: return "ara";
    case SolverKind::hura: return "hura";
  }
  return "unknown";
}

inline SolverKind parse_solver(const std::string& s) {
  if (s == "exact") return SolverKind::exact;
  if (s == "ara") return SolverKind::ara;
  if (s == "hura") return SolverKind::hura;
  throw std::invalid_argument("unknown solver '" + s + "'");
}

inline const std::vector<std::string>& nfv_axes() {
  static const std::vector<std::string> axes{"n_servers",  "n_sfcs",     "vnf_count",     "server_capacity_scale",
                                             "link_bandwidth_scale", "t_th", "demand_scale", "link_density",
                                             "alpha"};
  return axes;
}

inline const std::vector<std::string>& mining_axes() {
  static const std::vector<std::string> axes{"n_miners",         "n_participants", "mining_max_delay",
                                             "participant_capacity_scale", "mining_demand_scale", "gamma"};
  return axes;
}

inline bool is_mining_axis(const std::string& axis) {
  for (const auto& a : mining_axes())
    if (a == axis) return true;
  return false;
}

inline void apply_axis(NfvScenarioParams& p, const std::string& axis, double v) {
  auto count = [&] {
    if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument(axis + " needs integer values");
    return static_cast<int>(v);
  };
  if (axis == "n_servers") p.n_servers = count();
  else if (axis == "n_sfcs") p.n_sfcs = count();
  else if (axis == "vnf_count") p.vnf_count_min = p.vnf_count_max = count();
  else if (axis == "server_capacity_scale") p.capacity_unit *= v;
  else if (axis == "link_bandwidth_scale") p.bandwidth_unit *= v;
  else if (axis == "t_th") p.t_th = v;
  else if (axis == "demand_scale") p.demand_scale = v;
  else if (axis == "link_density") p.link_density = v;
  else if (axis == "alpha") p.alpha = v;
  else throw std::invalid_argument("unknown scenario axis '" + axis + "'");
}

inline void apply_axis(MiningScenarioParams& p, const std::string& axis, double v) {
  auto count = [&] {
    if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument(axis + " needs integer values");
    return static_cast<int>(v);
  };
  if (axis == "n_miners") p.n_miners = count();
  else if (axis == "n_participants") p.n_participants = count();
  else if (axis == "mining_max_delay") p.max_delay = v;
  else if (axis == "participant_capacity_scale") p.capacity = {p.capacity.lo * v, p.capacity.hi * v};
  else if (axis == "mining_demand_scale") p.size_bits = {p.size_bits.lo * v, p.size_bits.hi * v};
  else if (axis == "gamma") p.gamma = v;
  else throw std::invalid_argument("unknown mining axis '" + axis + "'");
}

struct SweepSpec {
  std::string axis;
  std::vector<double> values;
  std::vector<SolverKind> solvers{SolverKind::hura};
  int snapshots = 100;
  std::uint64_t base_seed = 1;
  NfvScenarioParams nfv;
  MiningScenarioParams mining;
  double timeout_s = 600.0;
  bool record_runtime = false;
};

struct SweepRow {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  std::string solver;
  double objective = 0.0;
  double energy = 0.0;
  double cost = 0.0;
  double mean_delay = 0.0;
  int active_servers = 0;  // participants with positive weight for mining rows
  double runtime_ms = 0.0;
  std::string feasible;    // "1", "0" or "timeout"
  double routing_cost = 0.0;
};

namespace detail {

inline SweepRow evaluate_nfv(const NfvInstance& inst, SolverKind solver, double timeout_s) {
  SweepRow row;
  row.solver = to_string(solver);
  PlacementSolution sol;
  std::vector<int> users;
  bool ok = false, timed_out = false;
  switch (solver) {
    case SolverKind::hura: {
      HuraResult h = hura_solve(inst);
      sol = std::move(h.solution);
      users = h.accepted;
      ok = h.all_accepted();
      break;
    }
    case SolverKind::ara: {
      AraResult a = ara_solve(inst);
      ok = a.ok();
      if (ok) {
        sol = std::move(a.solution);
        for (const SfcRequest& s : inst.sfcs) users.push_back(s.user_id);
      }
      break;
    }
    case SolverKind::exact: {
      ExactLimits lim;
      lim.time_cap_s = timeout_s;
      ExactResult e = solve_exact(inst, lim);
      timed_out = e.status == ExactStatus::limit_reached;
      ok = e.has_solution;
      if (ok) {
        sol = std::move(e.solution);
        for (const SfcRequest& s : inst.sfcs) users.push_back(s.user_id);
      }
      break;
    }
  }
  if (!sol.beta.empty()) {
    ok = ok && check_feasibility(inst, sol, kFeasibilityTolerance, users).empty();
    row.objective = objective_f(inst, sol);
    row.energy = compute_energy(inst, sol);
    row.cost = compute_cost(inst, sol);
    row.routing_cost = compute_routing_cost(inst, sol);
    row.active_servers = static_cast<int>(active_server_count(sol));
    double d = 0.0;
    for (int u : users) d += compute_delay(inst, sol, u);
    row.mean_delay = users.empty() ? 0.0 : d / static_cast<double>(users.size());
  }
  row.feasible = timed_out ? "timeout" : ok ? "1" : "0";
  return row;
}

inline SweepRow evaluate_mining(const MiningScenarioParams& p) {
  const auto tasks = generate_mining_scenario(p);
  const mining::OffloadSolution sol = mining::mo_solve(tasks, p.gamma, p.reward);
  SweepRow row;
  row.solver = "mo";
  row.feasible = sol.ok() ? "1" : "0";
  if (!sol.ok()) return row;
  row.objective = sol.objective_value;
  row.energy = sol.energy;
  row.cost = sol.cost;
  double d = 0.0;
  std::set<int> active;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    double worst = 0.0;
    for (std::size_t k = 0; k < tasks[i].participants.size(); ++k) {
      const double f = sol.f[i][k];
      if (f <= 1e-9) continue;
      active.insert(tasks[i].participants[k].id);
      const auto& q = tasks[i].participants[k];
      worst = std::max(worst, f * tasks[i].size_bits / mining::rate(tasks[i], k) +
                                  f * tasks[i].demand() / q.cpu_capacity);
    }
    d += worst;
  }
  row.mean_delay = tasks.empty() ? 0.0 : d / static_cast<double>(tasks.size());
  row.active_servers = static_cast<int>(active.size());
  return row;
}

}  // namespace detail

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.snapshots < 1) throw std::invalid_argument("sweep: snapshots must be >= 1");
  if (spec.values.empty()) throw std::invalid_argument("sweep: no axis values");
  const bool mining_axis = is_mining_axis(spec.axis);
  std::vector<SweepRow> rows;
  for (double value : spec.values) {
    for (int s = 0; s < spec.snapshots; ++s) {
      const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(s);
      if (mining_axis) {
        MiningScenarioParams p = spec.mining;
        apply_axis(p, spec.axis, value);
        p.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        SweepRow row = detail::evaluate_mining(p);
        row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        row.axis_value = value;
        row.seed = seed;
        rows.push_back(row);
        continue;
      }
      NfvScenarioParams p = spec.nfv;
      apply_axis(p, spec.axis, value);
      p.seed = seed;
      const NfvInstance inst = generate_nfv_scenario(p);
      for (SolverKind solver : spec.solvers) {
        const auto t0 = std::chrono::steady_clock::now();
        SweepRow row = detail::evaluate_nfv(inst, solver, spec.timeout_s);
        row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (row.feasible != "timeout" && row.runtime_ms > spec.timeout_s * 1e3) row.feasible = "timeout";
        row.axis_value = value;
        row.seed = seed;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline const char* kSweepHeader =
    "axis_value,seed,solver,objective,energy,cost,mean_delay,active_servers,runtime_ms,feasible";

inline void write_sweep_csv(const std::vector<SweepRow>& rows, bool record_runtime, std::ostream& os) {
  os << kSweepHeader << '\n';
  for (const SweepRow& r : rows)
    os << format_number(r.axis_value) << ',' << r.seed << ',' << r.solver << ',' << format_number(r.objective)
       << ',' << format_number(r.energy) << ',' << format_number(r.cost) << ',' << format_number(r.mean_delay)
       << ',' << r.active_servers << ',' << (record_runtime ? format_number(r.runtime_ms) : "NA") << ','
       << r.feasible << '\n';
}

// Means over feasible rows per (axis value, solver), keyed in sorted order.
inline void write_aggregate_csv(const std::vector<SweepRow>& rows, bool record_runtime, std::ostream& os) {
  struct Acc {
    int rows = 0, feasible = 0;
    double objective = 0, energy = 0, cost = 0, delay = 0, active = 0, runtime = 0;
  };
  std::map<std::pair<double, std::string>, Acc> acc;
  for (const SweepRow& r : rows) {
    Acc& a = acc[{r.axis_value, r.solver}];
    ++a.rows;
    if (r.feasible != "1") continue;
    ++a.feasible;
    a.objective += r.objective;
    a.energy += r.energy;
    a.cost += r.cost;
    a.delay += r.mean_delay;
    a.active += r.active_servers;
    a.runtime += r.runtime_ms;
  }
  os << "axis_value,solver,snapshots,feasible_snapshots,objective,energy,cost,mean_delay,active_servers,"
        "runtime_ms\n";
  for (const auto& [key, a] : acc) {
    const double n = a.feasible > 0 ? a.feasible : std::nan("");
    os << format_number(key.first) << ',' << key.second << ',' << a.rows << ',' << a.feasible << ','
       << format_number(a.objective / n) << ',' << format_number(a.energy / n) << ',' << format_number(a.cost / n)
       << ',' << format_number(a.delay / n) << ',' << format_number(a.active / n) << ','
       << (record_runtime ? format_number(a.runtime / n) : "NA") << '\n';
  }
}

// Mean of `metric` per axis value over snapshots that are feasible at every
// axis value for the given solver.
template <typename Metric>
std::vector<double> paired_means(const std::vector<SweepRow>& rows, const std::vector<double>& values,
                                 const std::string& solver, Metric metric, int* kept = nullptr) {
  std::map<std::uint64_t, int> feasible_count;
  for (const SweepRow& r : rows)
    if (r.solver == solver && r.feasible == "1") ++feasible_count[r.seed];
  std::vector<double> sums(values.size(), 0.0);
  std::set<std::uint64_t> seeds;
  for (const SweepRow& r : rows) {
    if (r.solver != solver || feasible_count[r.seed] != static_cast<int>(values.size())) continue;
    for (std::size_t k = 0; k < values.size(); ++k)
      if (values[k] == r.axis_value) sums[k] += metric(r);
    seeds.insert(r.seed);
  }
  if (kept) *kept = static_cast<int>(seeds.size());
  for (double& s : sums) s /= seeds.empty() ? std::nan("") : static_cast<double>(seeds.size());
  return sums;
}

}  // namespace nfvchain
