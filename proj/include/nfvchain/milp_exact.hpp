#pragma once

// Best-first branch and bound over the placement variables x; beta follows
// from x and y comes from the relaxation (re-routed at integral nodes).

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "nfvchain/ara.hpp"
#include "nfvchain/formulation.hpp"
#include "nfvchain/hura.hpp"
#include "nfvchain/lp.hpp"
#include "nfvchain/model.hpp"

namespace nfvchain {

struct ExactLimits {
  std::size_t node_cap = 200000;
  double time_cap_s = 600.0;
  double integrality_tolerance = 1e-6;
  bool rounding_heuristic = true;
  std::ostream* node_log = nullptr;  // CSV: node,depth,bound,incumbent
};

enum class ExactStatus { optimal, infeasible, limit_reached };

inline std::string to_string(ExactStatus s) {
  switch (s) {
    case ExactStatus::optimal: return "optimal";
    case ExactStatus::infeasible: return "infeasible";
    case ExactStatus::limit_reached: return "limit-reached";
  }
  return "unknown";
}

struct ExactResult {
  ExactStatus status = ExactStatus::infeasible;
  bool optimal = false;       // proven optimal
  bool has_solution = false;
  PlacementSolution solution;
  double objective = std::numeric_limits<double>::infinity();
  double root_bound = -std::numeric_limits<double>::infinity();
  std::size_t nodes = 0;
};

struct BnbNode {
  std::vector<std::pair<std::size_t, bool>> fixed;  // (x variable, value)
  double lp_bound = 0.0;                            // parent's relaxation value
  std::size_t depth = 0;
  std::size_t id = 0;
};

inline ExactResult solve_exact(const NfvInstance& inst, const ExactLimits& limits = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Formulation f = build_relaxation(inst);
  lp::Problem& p = f.problem;
  const std::vector<double> base_lower = p.lower, base_upper = p.upper;
  const std::size_t N = inst.graph.server_count();

  // Owner of every x variable, for bound propagation.
  struct Owner {
    std::size_t i, j, n;
  };
  std::vector<Owner> owner(p.num_variables(), Owner{npos, npos, npos});
  std::vector<std::size_t> x_vars;
  for (std::size_t i = 0; i < f.index.x.size(); ++i)
    for (std::size_t j = 0; j < f.index.x[i].size(); ++j)
      for (std::size_t n = 0; n < N; ++n) {
        owner[f.index.x[i][j][n]] = {i, j, n};
        x_vars.push_back(f.index.x[i][j][n]);
      }

  auto apply = [&](const BnbNode& node) {
    p.lower = base_lower;
    p.upper = base_upper;
    for (auto [v, one] : node.fixed) {
      const Owner o = owner[v];
      if (!one) {
        p.upper[v] = 0.0;
        continue;
      }
      p.lower[v] = 1.0;
      for (std::size_t n = 0; n < N; ++n)
        if (n != o.n) p.upper[f.index.x[o.i][o.j][n]] = 0.0;
      if (inst.enforce_distinct_servers)
        for (std::size_t j = 0; j < f.index.x[o.i].size(); ++j)
          if (j != o.j) p.upper[f.index.x[o.i][j][o.n]] = 0.0;
      p.lower[f.index.beta[o.n]] = 1.0;
    }
    for (std::size_t v = 0; v < p.num_variables(); ++v)
      if (p.lower[v] > p.upper[v]) return false;
    return true;
  };

  ExactResult res;
  auto offer = [&](PlacementSolution sol) {
    const double obj = objective_f(inst, sol);
    if (obj < res.objective) {
      res.objective = obj;
      res.solution = std::move(sol);
      res.has_solution = true;
    }
  };
  auto prunable = [&](double bound) {
    return res.has_solution && bound >= res.objective - 1e-9 * std::max(1.0, std::abs(res.objective));
  };

  auto cmp = [](const BnbNode& l, const BnbNode& r) {
    if (l.lp_bound != r.lp_bound) return l.lp_bound > r.lp_bound;
    return l.id > r.id;
  };
  std::priority_queue<BnbNode, std::vector<BnbNode>, decltype(cmp)> open(cmp);
  std::size_t next_id = 0;
  open.push(BnbNode{{}, -std::numeric_limits<double>::infinity(), 0, next_id++});
  bool exhausted = true;

  while (!open.empty()) {
    if (res.nodes >= limits.node_cap ||
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
            limits.time_cap_s) {
      exhausted = false;
      break;
    }
    BnbNode node = open.top();
    open.pop();
    if (prunable(node.lp_bound)) continue;
    ++res.nodes;
    if (!apply(node)) continue;
    const lp::Solution lps = lp::solve(p);
    if (lps.status == lp::Status::iteration_limit) {
      exhausted = false;
      continue;
    }
    if (lps.status != lp::Status::optimal) continue;
    const double bound = lps.objective_value;
    if (node.id == 0) res.root_bound = bound;
    if (limits.node_log)
      *limits.node_log << node.id << ',' << node.depth << ',' << bound << ','
                       << (res.has_solution ? res.objective : std::numeric_limits<double>::infinity())
                       << '\n';
    if (prunable(bound)) continue;

    // Most fractional x, lowest index on ties.
    std::size_t branch = npos;
    double best = limits.integrality_tolerance;
    for (std::size_t v : x_vars) {
      const double frac = std::min(lps.x[v], 1.0 - lps.x[v]);
      if (frac > best) {
        best = frac;
        branch = v;
      }
    }

    PlacementSolution relaxed = extract_solution(inst, f.index, lps.x, false);
    if (branch == npos) {
      PlacementSolution placement = PlacementSolution::zeros(inst);
      for (std::size_t v : x_vars) {
        const Owner o = owner[v];
        if (lps.x[v] > 0.5) {
          placement.x[o.i][o.j][o.n] = 1.0;
          placement.beta[o.n] = 1.0;
        }
      }
      std::vector<std::size_t> all(inst.sfcs.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      std::vector<double> capacity;
      for (const Arc& a : inst.graph.arcs()) capacity.push_back(a.bandwidth);
      RoutingResult route = solve_routing(inst, placement, all, capacity);
      if (route.feasible()) {
        for (std::size_t i = 0; i < all.size(); ++i) placement.y[i] = std::move(route.y[i]);
        offer(std::move(placement));
        continue;
      }
      // Integral only within tolerance: branch on the first unfixed x.
      std::vector<bool> is_fixed(p.num_variables(), false);
      for (std::size_t v : x_vars) is_fixed[v] = p.lower[v] == p.upper[v];
      for (std::size_t v : x_vars)
        if (!is_fixed[v]) {
          branch = v;
          break;
        }
      if (branch == npos) continue;
    } else if (limits.rounding_heuristic) {
      RoundingResult r = round_to_binary(inst, relaxed);
      if (r.ok()) offer(std::move(r.solution));
    }

    for (bool one : {true, false}) {
      BnbNode child{node.fixed, bound, node.depth + 1, next_id++};
      child.fixed.emplace_back(branch, one);
      open.push(std::move(child));
    }
  }

  if (res.has_solution) {
    res.optimal = exhausted;
    res.status = exhausted ? ExactStatus::optimal : ExactStatus::limit_reached;
  } else {
    res.status = exhausted ? ExactStatus::infeasible : ExactStatus::limit_reached;
  }
  return res;
}

}  // namespace nfvchain
