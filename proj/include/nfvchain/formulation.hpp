#pragma once

// Linear relaxation of the placement problem (C8/C9 relaxed to boxes).
// Shared by the exact solver (bounds fixed per node) and ARA (objective
// rewritten per iteration).

#include <algorithm>
#include <cstddef>
#include <vector>

#include "nfvchain/lp.hpp"
#include "nfvchain/model.hpp"

namespace nfvchain {

struct VariableIndex {
  std::vector<std::size_t> beta;                             // [n]
  std::vector<std::vector<std::vector<std::size_t>>> x;      // [i][j][n]
  std::vector<std::vector<std::vector<std::size_t>>> y;      // [i][s][a]
};

struct Formulation {
  lp::Problem problem;
  VariableIndex index;
  std::vector<double> base_objective;  // coefficients of F
};

inline Formulation build_relaxation(const NfvInstance& inst) {
  inst.validate();
  const auto& g = inst.graph;
  const auto& servers = g.servers();
  const auto& arcs = g.arcs();
  const std::size_t N = servers.size(), A = arcs.size();
  const double a = inst.alpha;

  Formulation f;
  lp::Problem& p = f.problem;
  VariableIndex& idx = f.index;

  for (std::size_t n = 0; n < N; ++n)
    idx.beta.push_back(p.add_variable(a * servers[n].static_power, 0.0, 1.0));

  // Acyclic optimal flows never put more than min(B_s, B_a) on one arc.
  std::vector<double> arc_demand(A, 0.0);
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i) {
    const SfcRequest& sfc = inst.sfcs[i];
    idx.x.emplace_back(sfc.vnf_count(), std::vector<std::size_t>(N));
    idx.y.emplace_back(sfc.segment_count(), std::vector<std::size_t>(A));
    for (std::size_t j = 0; j < sfc.vnf_count(); ++j)
      for (std::size_t n = 0; n < N; ++n) {
        const double c = sfc.vnf_cpu[j];
        idx.x[i][j][n] = p.add_variable(
            a * servers[n].proc_power * c / servers[n].cpu_capacity +
                (1.0 - a) * sfc.server_unit_price[n] * c,
            0.0, 1.0);
      }
    for (std::size_t s = 0; s < sfc.segment_count(); ++s)
      for (std::size_t k = 0; k < A; ++k) {
        const double ub = std::min(sfc.segment_bandwidth[s], arcs[k].bandwidth);
        idx.y[i][s][k] = p.add_variable((1.0 - a) * sfc.link_unit_price[arcs[k].link], 0.0, ub);
        arc_demand[k] += ub;
      }
  }

  using lp::Relation;
  using lp::Term;
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i) {
    const SfcRequest& sfc = inst.sfcs[i];
    const std::size_t J = sfc.vnf_count();
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<Term> row;
      for (std::size_t n = 0; n < N; ++n) row.push_back({idx.x[i][j][n], 1.0});
      p.add_constraint(std::move(row), Relation::equal, 1.0, "C1");
    }
    if (inst.enforce_distinct_servers && J > 1)
      for (std::size_t n = 0; n < N; ++n) {
        std::vector<Term> row;
        for (std::size_t j = 0; j < J; ++j) row.push_back({idx.x[i][j][n], 1.0});
        p.add_constraint(std::move(row), Relation::less_equal, 1.0, "C2");
      }
    const std::size_t src = g.node_index(sfc.source), dst = g.node_index(sfc.destination);
    for (std::size_t s = 0; s < sfc.segment_count(); ++s) {
      const double b = sfc.segment_bandwidth[s];
      for (std::size_t v = 0; v < g.node_count(); ++v) {
        std::vector<Term> row;
        for (std::size_t k : g.out_arcs(v)) row.push_back({idx.y[i][s][k], 1.0});
        for (std::size_t k : g.in_arcs(v)) row.push_back({idx.y[i][s][k], -1.0});
        double rhs = 0.0;
        const std::size_t n = g.server_at(v);
        if (n != npos) {
          if (s > 0) row.push_back({idx.x[i][s - 1][n], -b});
          if (s < J) row.push_back({idx.x[i][s][n], b});
        } else {
          if (s == 0 && v == src) rhs += b;
          if (s == J && v == dst) rhs -= b;
        }
        p.add_constraint(std::move(row), Relation::equal, rhs, "C5");
      }
    }
    std::vector<Term> delay;
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t n = 0; n < N; ++n)
        delay.push_back({idx.x[i][j][n], sfc.vnf_cpu[j] / servers[n].cpu_capacity});
    for (std::size_t s = 0; s < sfc.segment_count(); ++s)
      for (std::size_t k = 0; k < A; ++k) delay.push_back({idx.y[i][s][k], 1.0 / arcs[k].bandwidth});
    p.add_constraint(std::move(delay), Relation::less_equal, sfc.max_delay, "C7");
  }

  for (std::size_t n = 0; n < N; ++n) {
    std::vector<Term> load;
    for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
      for (std::size_t j = 0; j < inst.sfcs[i].vnf_count(); ++j) {
        load.push_back({idx.x[i][j][n], inst.sfcs[i].vnf_cpu[j]});
        p.add_constraint({{idx.x[i][j][n], 1.0}, {idx.beta[n], -1.0}}, Relation::less_equal, 0.0,
                         "C4");
      }
    load.push_back({idx.beta[n], -servers[n].cpu_capacity});
    p.add_constraint(std::move(load), Relation::less_equal, 0.0, "C3");
  }
  for (std::size_t k = 0; k < A; ++k) {
    if (arc_demand[k] <= arcs[k].bandwidth) continue;  // implied by the y bounds
    std::vector<Term> row;
    for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
      for (std::size_t s = 0; s < inst.sfcs[i].segment_count(); ++s)
        row.push_back({idx.y[i][s][k], 1.0});
    p.add_constraint(std::move(row), Relation::less_equal, arcs[k].bandwidth, "C6");
  }
  f.base_objective = p.objective;
  return f;
}

inline PlacementSolution extract_solution(const NfvInstance& inst, const VariableIndex& idx,
                                          const std::vector<double>& values, bool binary) {
  PlacementSolution sol = PlacementSolution::zeros(inst);
  sol.binary = binary;
  for (std::size_t n = 0; n < idx.beta.size(); ++n) sol.beta[n] = values[idx.beta[n]];
  for (std::size_t i = 0; i < idx.x.size(); ++i) {
    for (std::size_t j = 0; j < idx.x[i].size(); ++j)
      for (std::size_t n = 0; n < idx.x[i][j].size(); ++n) sol.x[i][j][n] = values[idx.x[i][j][n]];
    for (std::size_t s = 0; s < idx.y[i].size(); ++s)
      for (std::size_t k = 0; k < idx.y[i][s].size(); ++k)
        sol.y[i][s][k] = std::max(0.0, values[idx.y[i][s][k]]);
  }
  return sol;
}

inline std::vector<double> flatten_solution(const VariableIndex& idx, std::size_t num_variables,
                                            const PlacementSolution& sol) {
  std::vector<double> v(num_variables, 0.0);
  for (std::size_t n = 0; n < idx.beta.size(); ++n) v[idx.beta[n]] = sol.beta[n];
  for (std::size_t i = 0; i < idx.x.size(); ++i) {
    for (std::size_t j = 0; j < idx.x[i].size(); ++j)
      for (std::size_t n = 0; n < idx.x[i][j].size(); ++n) v[idx.x[i][j][n]] = sol.x[i][j][n];
    for (std::size_t s = 0; s < idx.y[i].size(); ++s)
      for (std::size_t k = 0; k < idx.y[i][s].size(); ++k) v[idx.y[i][s][k]] = sol.y[i][s][k];
  }
  return v;
}

}  // namespace nfvchain
