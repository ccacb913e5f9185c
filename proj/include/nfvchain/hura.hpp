#pragma once

// HuRA: SFCs in increasing order of max delay; each one is placed by a
// Hungarian assignment over servers and then routed with a min-cost LP
// against the bandwidth left by earlier SFCs.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "nfvchain/hungarian.hpp"
#include "nfvchain/lp.hpp"
#include "nfvchain/model.hpp"

namespace nfvchain {

struct HuraState {
  std::vector<double> remain_cpu;        // per server
  std::vector<double> remain_bandwidth;  // per arc
  std::vector<bool> active;              // per server
  double objective = 0.0;                // F over committed SFCs

  static HuraState fresh(const NfvInstance& inst) {
    HuraState s;
    for (const Server& sv : inst.graph.servers()) s.remain_cpu.push_back(sv.cpu_capacity);
    for (const Arc& a : inst.graph.arcs()) s.remain_bandwidth.push_back(a.bandwidth);
    s.active.assign(inst.graph.server_count(), false);
    return s;
  }
};

enum class MatrixMode { objective, delay };

inline std::string to_string(MatrixMode m) { return m == MatrixMode::objective ? "objective" : "delay"; }

// Rows 0..J-1 are the VNFs of user index i, remaining rows are zero padding.
// Inadmissible pairs hold kInadmissible.
inline CostMatrix build_placement_matrix(const NfvInstance& inst, std::size_t i,
                                         const HuraState& state, MatrixMode mode) {
  const SfcRequest& sfc = inst.sfcs.at(i);
  const auto& servers = inst.graph.servers();
  const std::size_t N = servers.size();
  if (N < sfc.vnf_count())
    throw std::invalid_argument("user " + std::to_string(sfc.user_id) + " has more VNFs than servers");
  const double a = inst.alpha;
  CostMatrix m(N, std::vector<double>(N, 0.0));
  for (std::size_t j = 0; j < sfc.vnf_count(); ++j) {
    const double c = sfc.vnf_cpu[j];
    for (std::size_t n = 0; n < N; ++n) {
      if (state.remain_cpu[n] < c) {
        m[j][n] = kInadmissible;
        continue;
      }
      const double util = c / servers[n].cpu_capacity;
      if (mode == MatrixMode::delay) {
        m[j][n] = util;
      } else {
        const double wake = state.active[n] ? 0.0 : servers[n].static_power;
        m[j][n] = state.objective + a * (wake + servers[n].proc_power * util) +
                  (1.0 - a) * sfc.server_unit_price[n] * c;
      }
    }
  }
  return m;
}

struct RoutingResult {
  lp::Status status = lp::Status::infeasible;
  std::vector<std::vector<std::vector<double>>> y;  // [k][s][a] for users[k]
  double cost = 0.0;                                // (1 - alpha) * link cost

  bool feasible() const { return status == lp::Status::optimal; }
};

// Min-cost routing for the listed user indices with their placements fixed in
// `placement.x`, subject to flow conservation, the given arc capacities and
// the delay cap left after processing delay.
inline RoutingResult solve_routing(const NfvInstance& inst, const PlacementSolution& placement,
                                   const std::vector<std::size_t>& users,
                                   const std::vector<double>& arc_capacity) {
  const auto& g = inst.graph;
  const auto& arcs = g.arcs();
  const std::size_t A = arcs.size();
  const double a = inst.alpha;
  lp::Problem p;
  std::vector<std::vector<std::vector<std::size_t>>> var(users.size());
  std::vector<double> load(A, 0.0);

  for (std::size_t k = 0; k < users.size(); ++k) {
    const SfcRequest& sfc = inst.sfcs.at(users[k]);
    var[k].assign(sfc.segment_count(), std::vector<std::size_t>(A));
    for (std::size_t s = 0; s < sfc.segment_count(); ++s)
      for (std::size_t e = 0; e < A; ++e) {
        // With alpha = 1 link prices carry no weight; route by delay instead
        // so the flow stays acyclic.
        const double w = a < 1.0 ? (1.0 - a) * sfc.link_unit_price[arcs[e].link]
                                 : 1.0 / arcs[e].bandwidth;
        const double ub = std::max(0.0, std::min(sfc.segment_bandwidth[s], arc_capacity[e]));
        var[k][s][e] = p.add_variable(w, 0.0, ub);
        load[e] += ub;
      }
  }
  for (std::size_t k = 0; k < users.size(); ++k) {
    const std::size_t i = users[k];
    const SfcRequest& sfc = inst.sfcs[i];
    for (std::size_t s = 0; s < sfc.segment_count(); ++s) {
      for (std::size_t v = 0; v < g.node_count(); ++v) {
        std::vector<lp::Term> row;
        for (std::size_t e : g.out_arcs(v)) row.push_back({var[k][s][e], 1.0});
        for (std::size_t e : g.in_arcs(v)) row.push_back({var[k][s][e], -1.0});
        const double rhs = sfc.segment_bandwidth[s] * (chain_position(inst, placement, i, s, v) -
                                                       chain_position(inst, placement, i, s + 1, v));
        p.add_constraint(std::move(row), lp::Relation::equal, rhs, "C5");
      }
    }
    std::vector<lp::Term> delay;
    for (std::size_t s = 0; s < sfc.segment_count(); ++s)
      for (std::size_t e = 0; e < A; ++e) delay.push_back({var[k][s][e], 1.0 / arcs[e].bandwidth});
    p.add_constraint(std::move(delay), lp::Relation::less_equal,
                     sfc.max_delay - processing_delay(inst, placement, i), "C7");
  }
  for (std::size_t e = 0; e < A; ++e) {
    if (load[e] <= arc_capacity[e]) continue;
    std::vector<lp::Term> row;
    for (std::size_t k = 0; k < users.size(); ++k)
      for (const auto& seg : var[k]) row.push_back({seg[e], 1.0});
    p.add_constraint(std::move(row), lp::Relation::less_equal, arc_capacity[e], "C6");
  }

  RoutingResult out;
  const lp::Solution sol = lp::solve(p);
  out.status = sol.status;
  if (!out.feasible()) return out;
  out.y.resize(users.size());
  for (std::size_t k = 0; k < users.size(); ++k) {
    const SfcRequest& sfc = inst.sfcs[users[k]];
    out.y[k].assign(sfc.segment_count(), std::vector<double>(A, 0.0));
    for (std::size_t s = 0; s < sfc.segment_count(); ++s)
      for (std::size_t e = 0; e < A; ++e) {
        const double v = std::max(0.0, sol.x[var[k][s][e]]);
        out.y[k][s][e] = v;
        out.cost += (1.0 - a) * sfc.link_unit_price[arcs[e].link] * v;
      }
  }
  return out;
}

struct HuraDecision {
  int user_id = 0;
  std::string outcome;  // "objective", "delay" or "rejected"
  std::vector<NodeId> servers;
  double routing_cost = 0.0;
};

struct HuraResult {
  PlacementSolution solution;
  double objective = 0.0;
  std::vector<int> accepted;
  std::vector<int> rejected;
  std::vector<HuraDecision> log;

  bool all_accepted() const { return rejected.empty(); }
};

inline void write_decision_log(const std::vector<HuraDecision>& log, std::ostream& os) {
  os << "user_id,outcome,servers,routing_cost\n";
  for (const HuraDecision& d : log) {
    os << d.user_id << ',' << d.outcome << ',';
    for (std::size_t k = 0; k < d.servers.size(); ++k) os << (k ? ";" : "") << d.servers[k];
    os << ',' << d.routing_cost << '\n';
  }
}

inline HuraResult hura_solve(const NfvInstance& inst) {
  inst.validate();
  const auto& servers = inst.graph.servers();
  HuraResult res;
  res.solution = PlacementSolution::zeros(inst);
  PlacementSolution& sol = res.solution;
  HuraState state = HuraState::fresh(inst);

  std::vector<std::size_t> order(inst.sfcs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return inst.sfcs[l].max_delay < inst.sfcs[r].max_delay;
  });

  for (std::size_t i : order) {
    const SfcRequest& sfc = inst.sfcs[i];
    const std::size_t J = sfc.vnf_count();
    HuraDecision decision{sfc.user_id, "rejected", {}, 0.0};
    bool placed = false;
    for (MatrixMode mode : {MatrixMode::objective, MatrixMode::delay}) {
      Assignment asg;
      try {
        asg = hungarian(build_placement_matrix(inst, i, state, mode));
      } catch (const NoAssignmentError&) {
        break;
      }
      for (std::size_t j = 0; j < J; ++j) {
        std::fill(sol.x[i][j].begin(), sol.x[i][j].end(), 0.0);
        sol.x[i][j][asg.column[j]] = 1.0;
      }
      RoutingResult route = solve_routing(inst, sol, {i}, state.remain_bandwidth);
      if (!route.feasible()) continue;

      sol.y[i] = std::move(route.y[0]);
      for (std::size_t j = 0; j < J; ++j) {
        const std::size_t n = asg.column[j];
        state.remain_cpu[n] = std::max(0.0, state.remain_cpu[n] - sfc.vnf_cpu[j]);
        state.active[n] = true;
        sol.beta[n] = 1.0;
        decision.servers.push_back(servers[n].id);
      }
      for (std::size_t e = 0; e < state.remain_bandwidth.size(); ++e) {
        double used = 0.0;
        for (const auto& seg : sol.y[i]) used += seg[e];
        state.remain_bandwidth[e] = std::max(0.0, state.remain_bandwidth[e] - used);
      }
      state.objective = objective_f(inst, sol);
      decision.outcome = to_string(mode);
      decision.routing_cost = route.cost;
      placed = true;
      break;
    }
    if (placed) {
      res.accepted.push_back(sfc.user_id);
    } else {
      for (auto& row : sol.x[i]) std::fill(row.begin(), row.end(), 0.0);
      res.rejected.push_back(sfc.user_id);
    }
    res.log.push_back(std::move(decision));
  }
  res.objective = objective_f(inst, sol);
  return res;
}

}  // namespace nfvchain
