#pragma once

// ARA: binary constraints relaxed to boxes with a quadratic penalty
// lambda * sum(v - v^2); the concave penalty is linearized around the
// previous iterate and the resulting LP is solved repeatedly (MM).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nfvchain/formulation.hpp"
#include "nfvchain/hura.hpp"
#include "nfvchain/lp.hpp"
#include "nfvchain/model.hpp"

namespace nfvchain {

struct AraConfig {
  enum class Schedule { continuation, fixed };

  // Penalty weights for beta and x.  build_surrogate uses them as given; in
  // the fixed schedule a zero weight means 1e3 * F(initial point).
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Schedule schedule = Schedule::continuation;
  std::size_t t_max = 50;
  double eps_converge = 1e-4;  // relative change of the penalized objective
  double eps_binary = 1e-3;
  // Continuation: lambda starts at lambda_start * F(init) / (number of VNFs)
  // and is multiplied by lambda_growth per stage up to lambda_cap * F(init).
  double lambda_start = 0.01;
  double lambda_growth = 4.0;
  double lambda_cap = 1e3;
  // Fixed schedule: lambda is doubled and the run repeated this many times.
  std::size_t fixed_restarts = 3;
  double descent_slack = 1e-9;
  // At a stage boundary a non-binary iterate is blended this far toward its
  // rounding, which moves it off stationary points such as v = 0.5.
  double nudge = 0.05;

  void validate() const {
    if (t_max < 1) throw std::invalid_argument("ara: t_max must be >= 1");
    if (!(eps_converge > 0.0) || !(eps_binary > 0.0))
      throw std::invalid_argument("ara: thresholds must be > 0");
    if (lambda1 < 0.0 || lambda2 < 0.0) throw std::invalid_argument("ara: lambda must be >= 0");
    if (!(nudge >= 0.0 && nudge < 1.0)) throw std::invalid_argument("ara: nudge must lie in [0,1)");
    if (!(lambda_start > 0.0) || !(lambda_growth > 1.0) || !(lambda_cap > 0.0))
      throw std::invalid_argument("ara: invalid lambda schedule");
  }
};

struct PenaltyResidual {
  double beta = 0.0;
  double x = 0.0;
};

inline PenaltyResidual penalty_residual(const PlacementSolution& sol) {
  constexpr double slack = 1e-9;
  auto term = [&](double v) {
    if (v < -slack || v > 1.0 + slack) throw std::domain_error("penalty_residual: value outside [0,1]");
    v = std::clamp(v, 0.0, 1.0);
    return v - v * v;
  };
  PenaltyResidual r;
  for (double b : sol.beta) r.beta += term(b);
  for (const auto& user : sol.x)
    for (const auto& row : user)
      for (double v : row) r.x += term(v);
  return r;
}

inline double penalized_objective(const NfvInstance& inst, const PlacementSolution& sol,
                                  double lambda1, double lambda2) {
  const PenaltyResidual r = penalty_residual(sol);
  return objective_f(inst, sol) + lambda1 * r.beta + lambda2 * r.x;
}

// Rewrites the objective of `f` into the linearized penalized objective
// around `prev`.
inline void set_surrogate_objective(Formulation& f, double lambda1, double lambda2,
                                    const PlacementSolution& prev) {
  lp::Problem& p = f.problem;
  p.objective = f.base_objective;
  p.offset = 0.0;
  for (std::size_t n = 0; n < f.index.beta.size(); ++n) {
    const double b = prev.beta[n];
    p.objective[f.index.beta[n]] += lambda1 * (1.0 - 2.0 * b);
    p.offset += lambda1 * b * b;
  }
  for (std::size_t i = 0; i < f.index.x.size(); ++i)
    for (std::size_t j = 0; j < f.index.x[i].size(); ++j)
      for (std::size_t n = 0; n < f.index.x[i][j].size(); ++n) {
        const double v = prev.x[i][j][n];
        p.objective[f.index.x[i][j][n]] += lambda2 * (1.0 - 2.0 * v);
        p.offset += lambda2 * v * v;
      }
}

inline Formulation build_surrogate(const NfvInstance& inst, const AraConfig& cfg,
                                   const PlacementSolution& prev) {
  check_dimensions(inst, prev);
  Formulation f = build_relaxation(inst);
  set_surrogate_objective(f, cfg.lambda1, cfg.lambda2, prev);
  return f;
}

// Value of an LP objective (with offset) at a placement.
inline double lp_objective_at(const Formulation& f, const PlacementSolution& sol) {
  const std::vector<double> v = flatten_solution(f.index, f.problem.num_variables(), sol);
  double total = f.problem.offset;
  for (std::size_t k = 0; k < v.size(); ++k) total += f.problem.objective[k] * v[k];
  return total;
}

enum class RoundingStatus { ok, no_capacity, routing_infeasible };

struct RoundingResult {
  RoundingStatus status = RoundingStatus::no_capacity;
  PlacementSolution solution;

  bool ok() const { return status == RoundingStatus::ok; }
};

// Greedy rounding in descending x order (ties by lowest user, VNF, server),
// respecting C2 and server capacity, followed by joint re-routing.
inline RoundingResult round_to_binary(const NfvInstance& inst, const PlacementSolution& relaxed) {
  check_dimensions(inst, relaxed);
  const auto& servers = inst.graph.servers();
  const std::size_t N = servers.size();
  struct Triple {
    double value;
    std::size_t i, j, n;
  };
  std::vector<Triple> triples;
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
    for (std::size_t j = 0; j < inst.sfcs[i].vnf_count(); ++j)
      for (std::size_t n = 0; n < N; ++n) triples.push_back({relaxed.x[i][j][n], i, j, n});
  std::stable_sort(triples.begin(), triples.end(),
                   [](const Triple& l, const Triple& r) { return l.value > r.value; });

  RoundingResult out;
  out.solution = PlacementSolution::zeros(inst);
  PlacementSolution& sol = out.solution;
  std::vector<double> remain;
  for (const Server& s : servers) remain.push_back(s.cpu_capacity);
  std::vector<std::vector<bool>> placed(inst.sfcs.size());
  std::vector<std::vector<bool>> used(inst.sfcs.size(), std::vector<bool>(N, false));
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i) placed[i].assign(inst.sfcs[i].vnf_count(), false);

  for (const Triple& t : triples) {
    if (placed[t.i][t.j]) continue;
    const double c = inst.sfcs[t.i].vnf_cpu[t.j];
    if (remain[t.n] < c) continue;
    if (inst.enforce_distinct_servers && used[t.i][t.n]) continue;
    placed[t.i][t.j] = true;
    used[t.i][t.n] = true;
    remain[t.n] -= c;
    sol.x[t.i][t.j][t.n] = 1.0;
    sol.beta[t.n] = 1.0;
  }
  for (const auto& row : placed)
    if (std::find(row.begin(), row.end(), false) != row.end()) return out;

  std::vector<std::size_t> all(inst.sfcs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> capacity;
  for (const Arc& a : inst.graph.arcs()) capacity.push_back(a.bandwidth);
  RoutingResult route = solve_routing(inst, sol, all, capacity);
  if (!route.feasible()) {
    out.status = RoundingStatus::routing_infeasible;
    return out;
  }
  for (std::size_t i = 0; i < all.size(); ++i) sol.y[i] = std::move(route.y[i]);
  out.status = RoundingStatus::ok;
  return out;
}

// Fallback when greedy rounding fails: depth-first search over VNF slots, each
// trying servers in descending x (ties by index) under C2 and capacity, with
// a joint routing solve at every complete placement.  Stops after
// `max_routings` routing solves.
inline RoundingResult repair_rounding(const NfvInstance& inst, const PlacementSolution& relaxed,
                                      std::size_t max_routings = 256) {
  check_dimensions(inst, relaxed);
  const auto& servers = inst.graph.servers();
  const std::size_t N = servers.size();
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  std::vector<std::vector<std::size_t>> order;
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
    for (std::size_t j = 0; j < inst.sfcs[i].vnf_count(); ++j) {
      slots.emplace_back(i, j);
      std::vector<std::size_t> o(N);
      std::iota(o.begin(), o.end(), std::size_t{0});
      std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) {
        return relaxed.x[i][j][a] > relaxed.x[i][j][b];
      });
      order.push_back(std::move(o));
    }

  RoundingResult out;
  out.status = RoundingStatus::no_capacity;
  PlacementSolution sol = PlacementSolution::zeros(inst);
  std::vector<double> remain;
  for (const Server& s : servers) remain.push_back(s.cpu_capacity);
  std::vector<std::size_t> all(inst.sfcs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> capacity;
  for (const Arc& a : inst.graph.arcs()) capacity.push_back(a.bandwidth);
  std::size_t routings = 0;

  auto search = [&](auto&& self, std::size_t k) -> bool {
    if (k == slots.size()) {
      if (routings++ >= max_routings) return false;
      RoutingResult route = solve_routing(inst, sol, all, capacity);
      if (!route.feasible()) {
        out.status = RoundingStatus::routing_infeasible;
        return false;
      }
      for (std::size_t i = 0; i < all.size(); ++i) sol.y[i] = std::move(route.y[i]);
      return true;
    }
    const auto [i, j] = slots[k];
    const double c = inst.sfcs[i].vnf_cpu[j];
    for (std::size_t n : order[k]) {
      if (routings >= max_routings) return false;
      if (remain[n] < c) continue;
      if (inst.enforce_distinct_servers &&
          std::any_of(sol.x[i].begin(), sol.x[i].begin() + static_cast<std::ptrdiff_t>(j),
                      [&](const std::vector<double>& row) { return row[n] > 0.5; }))
        continue;
      sol.x[i][j][n] = 1.0;
      remain[n] -= c;
      if (self(self, k + 1)) return true;
      sol.x[i][j][n] = 0.0;
      remain[n] += c;
    }
    return false;
  };
  if (!search(search, 0)) return out;
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t i = 0; i < sol.x.size() && sol.beta[n] == 0.0; ++i)
      for (const auto& row : sol.x[i])
        if (row[n] > 0.5) sol.beta[n] = 1.0;
  out.solution = std::move(sol);
  out.status = RoundingStatus::ok;
  return out;
}

// Greedy rounding, then the repair search if the greedy pass fails.
inline RoundingResult round_with_repair(const NfvInstance& inst, const PlacementSolution& relaxed) {
  RoundingResult r = round_to_binary(inst, relaxed);
  if (r.ok()) return r;
  RoundingResult repaired = repair_rounding(inst, relaxed);
  return repaired.ok() ? repaired : r;
}

// Re-routes a binary placement jointly; returns the input unchanged when the
// joint routing LP fails.
inline PlacementSolution reroute(const NfvInstance& inst, const PlacementSolution& sol) {
  std::vector<std::size_t> all(inst.sfcs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> capacity;
  for (const Arc& a : inst.graph.arcs()) capacity.push_back(a.bandwidth);
  RoutingResult route = solve_routing(inst, sol, all, capacity);
  if (!route.feasible()) return sol;
  PlacementSolution out = sol;
  for (std::size_t i = 0; i < all.size(); ++i) out.y[i] = std::move(route.y[i]);
  return objective_f(inst, out) <= objective_f(inst, sol) ? out : sol;
}

// Capacity-respecting round-robin placement, routed jointly.
inline std::optional<PlacementSolution> round_robin_start(const NfvInstance& inst) {
  const auto& servers = inst.graph.servers();
  const std::size_t N = servers.size();
  PlacementSolution sol = PlacementSolution::zeros(inst);
  std::vector<double> remain;
  for (const Server& s : servers) remain.push_back(s.cpu_capacity);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i) {
    std::vector<bool> used(N, false);
    for (std::size_t j = 0; j < inst.sfcs[i].vnf_count(); ++j) {
      const double c = inst.sfcs[i].vnf_cpu[j];
      bool ok = false;
      for (std::size_t step = 0; step < N && !ok; ++step) {
        const std::size_t n = (cursor + step) % N;
        if (remain[n] < c || (inst.enforce_distinct_servers && used[n])) continue;
        remain[n] -= c;
        used[n] = true;
        sol.x[i][j][n] = 1.0;
        sol.beta[n] = 1.0;
        cursor = n + 1;
        ok = true;
      }
      if (!ok) return std::nullopt;
    }
  }
  std::vector<std::size_t> all(inst.sfcs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> capacity;
  for (const Arc& a : inst.graph.arcs()) capacity.push_back(a.bandwidth);
  RoutingResult route = solve_routing(inst, sol, all, capacity);
  if (!route.feasible()) return std::nullopt;
  for (std::size_t i = 0; i < all.size(); ++i) sol.y[i] = std::move(route.y[i]);
  return sol;
}

struct AraIteration {
  std::size_t stage = 0;
  std::size_t iteration = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double surrogate_at_expansion = 0.0;  // surrogate value at the previous iterate
  double penalized_at_expansion = 0.0;  // penalized objective at the previous iterate
  double surrogate = 0.0;               // surrogate value at the new iterate
  double penalized = 0.0;               // penalized objective at the new iterate
  double beta_residual = 0.0;
  double x_residual = 0.0;
  bool accepted = true;  // false when the LP point did not decrease the surrogate
};

struct AraTrace {
  std::vector<AraIteration> iterations;
};

inline void write_trace_csv(const AraTrace& trace, std::ostream& os) {
  os.precision(17);
  os << "stage,iteration,lambda1,lambda2,surrogate,penalized,beta_residual,x_residual\n";
  for (const AraIteration& it : trace.iterations)
    os << it.stage << ',' << it.iteration << ',' << it.lambda1 << ',' << it.lambda2 << ','
       << it.surrogate << ',' << it.penalized << ',' << it.beta_residual << ',' << it.x_residual
       << '\n';
}

enum class AraStatus { ok, infeasible, surrogate_infeasible, rounding_failure };

inline std::string to_string(AraStatus s) {
  switch (s) {
    case AraStatus::ok: return "ok";
    case AraStatus::infeasible: return "infeasible";
    case AraStatus::surrogate_infeasible: return "surrogate-infeasible";
    case AraStatus::rounding_failure: return "rounding-failure";
  }
  return "unknown";
}

enum class AraStart { hura, round_robin, rounded_relaxation, relaxation };

struct AraResult {
  AraStatus status = AraStatus::infeasible;
  PlacementSolution solution;  // binary, routed
  PlacementSolution relaxed;   // terminal MM iterate
  double objective = 0.0;
  PenaltyResidual residual;    // of the terminal iterate
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  AraStart start = AraStart::hura;
  bool kept_initial_point = false;  // the rounded iterate was worse than the start
  std::size_t failed_iteration = 0;
  std::size_t nudges = 0;
  std::size_t jumps = 0;  // stage boundaries that moved to the rounded point
  AraTrace trace;

  bool ok() const { return status == AraStatus::ok; }
};

namespace detail {

// (1 - w) * a + w * b componentwise; stays feasible for the relaxation.
inline PlacementSolution blend(const PlacementSolution& a, const PlacementSolution& b, double w) {
  PlacementSolution out = a;
  out.binary = false;
  for (std::size_t n = 0; n < a.beta.size(); ++n) out.beta[n] = (1 - w) * a.beta[n] + w * b.beta[n];
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    for (std::size_t j = 0; j < a.x[i].size(); ++j)
      for (std::size_t n = 0; n < a.x[i][j].size(); ++n)
        out.x[i][j][n] = (1 - w) * a.x[i][j][n] + w * b.x[i][j][n];
    for (std::size_t s = 0; s < a.y[i].size(); ++s)
      for (std::size_t k = 0; k < a.y[i][s].size(); ++k)
        out.y[i][s][k] = (1 - w) * a.y[i][s][k] + w * b.y[i][s][k];
  }
  return out;
}

// One MM stage at fixed lambda.  Returns false when a surrogate LP fails.
inline bool mm_stage(const NfvInstance& inst, const AraConfig& cfg, Formulation& f,
                     PlacementSolution& iterate, double l1, double l2, std::size_t stage,
                     AraTrace& trace) {
  double prev_pen = penalized_objective(inst, iterate, l1, l2);
  for (std::size_t t = 1; t <= cfg.t_max; ++t) {
    set_surrogate_objective(f, l1, l2, iterate);
    AraIteration rec;
    rec.stage = stage;
    rec.iteration = t;
    rec.lambda1 = l1;
    rec.lambda2 = l2;
    rec.surrogate_at_expansion = lp_objective_at(f, iterate);
    rec.penalized_at_expansion = prev_pen;

    const lp::Solution lps = lp::solve(f.problem);
    if (lps.status != lp::Status::optimal) {
      trace.iterations.push_back(rec);
      return false;
    }
    PlacementSolution next = extract_solution(inst, f.index, lps.x, false);
    for (double& b : next.beta) b = std::clamp(b, 0.0, 1.0);
    for (auto& user : next.x)
      for (auto& row : user)
        for (double& v : row) v = std::clamp(v, 0.0, 1.0);

    rec.surrogate = lp_objective_at(f, next);
    const double slack = cfg.descent_slack * std::max(1.0, std::abs(rec.surrogate_at_expansion));
    if (rec.surrogate > rec.surrogate_at_expansion + slack) {
      // LP round-off moved uphill: stay at the expansion point.
      rec.accepted = false;
      rec.surrogate = rec.surrogate_at_expansion;
      next = iterate;
    }
    const PenaltyResidual r = penalty_residual(next);
    rec.penalized = objective_f(inst, next) + l1 * r.beta + l2 * r.x;
    rec.beta_residual = r.beta;
    rec.x_residual = r.x;
    trace.iterations.push_back(rec);

    const double change = std::abs(rec.penalized - prev_pen);
    iterate = std::move(next);
    if (!rec.accepted || change < cfg.eps_converge * std::max(1.0, std::abs(prev_pen))) break;
    prev_pen = rec.penalized;
  }
  return true;
}

}  // namespace detail

inline AraResult ara_solve(const NfvInstance& inst, const AraConfig& cfg = {}) {
  cfg.validate();
  inst.validate();
  AraResult res;

  // Initial point: HuRA, then round-robin, then the LP relaxation optimum.
  Formulation f = build_relaxation(inst);
  std::optional<PlacementSolution> start;
  {
    HuraResult h = hura_solve(inst);
    if (h.all_accepted()) {
      start = reroute(inst, h.solution);
      res.start = AraStart::hura;
    }
  }
  if (!start) {
    start = round_robin_start(inst);
    res.start = AraStart::round_robin;
  }
  if (!start) {
    const lp::Solution root = lp::solve(f.problem);
    if (root.status != lp::Status::optimal) return res;  // infeasible
    start = extract_solution(inst, f.index, root.x, false);
    res.start = AraStart::relaxation;
    RoundingResult r = repair_rounding(inst, *start);
    if (r.ok()) {
      start = std::move(r.solution);
      res.start = AraStart::rounded_relaxation;
    }
  }

  std::size_t total_vnfs = 0;
  for (const SfcRequest& s : inst.sfcs) total_vnfs += s.vnf_count();
  const double f_init = std::max(objective_f(inst, *start), 1e-12);

  PlacementSolution iterate = *start;
  double l1 = cfg.lambda1, l2 = cfg.lambda2;
  bool lp_failed = false;
  if (cfg.schedule == AraConfig::Schedule::continuation) {
    const double cap = cfg.lambda_cap * f_init;
    double lambda = std::min(cap, cfg.lambda_start * f_init / std::max<std::size_t>(1, total_vnfs));
    for (std::size_t stage = 0;; ++stage) {
      l1 = l2 = lambda;
      if (!detail::mm_stage(inst, cfg, f, iterate, l1, l2, stage, res.trace)) {
        lp_failed = true;
        break;
      }
      const PenaltyResidual r = penalty_residual(iterate);
      if ((r.beta <= cfg.eps_binary && r.x <= cfg.eps_binary) || lambda >= cap) break;
      lambda = std::min(cap, lambda * cfg.lambda_growth);
      // Move to the rounded point when that does not raise the penalized
      // objective at the next lambda; otherwise nudge toward it.
      RoundingResult toward = round_with_repair(inst, iterate);
      if (toward.ok()) {
        if (objective_f(inst, toward.solution) <= penalized_objective(inst, iterate, lambda, lambda)) {
          iterate = std::move(toward.solution);
          ++res.jumps;
        } else if (cfg.nudge > 0.0) {
          iterate = detail::blend(iterate, toward.solution, cfg.nudge);
          ++res.nudges;
        }
      }
    }
  } else {
    if (l1 == 0.0) l1 = 1e3 * f_init;
    if (l2 == 0.0) l2 = 1e3 * f_init;
    for (std::size_t stage = 0; stage <= cfg.fixed_restarts; ++stage) {
      iterate = *start;
      if (!detail::mm_stage(inst, cfg, f, iterate, l1, l2, stage, res.trace)) {
        lp_failed = true;
        break;
      }
      const PenaltyResidual r = penalty_residual(iterate);
      if (r.beta <= cfg.eps_binary && r.x <= cfg.eps_binary) break;
      if (stage < cfg.fixed_restarts) {
        l1 *= 2.0;
        l2 *= 2.0;
      }
    }
  }
  res.lambda1 = l1;
  res.lambda2 = l2;
  res.relaxed = iterate;
  res.residual = penalty_residual(iterate);
  if (lp_failed) {
    res.status = AraStatus::surrogate_infeasible;
    res.failed_iteration = res.trace.iterations.size();
    return res;
  }

  RoundingResult rounded = round_with_repair(inst, iterate);
  const bool start_binary = start->binary;
  if (!rounded.ok() && !start_binary) {
    res.status = AraStatus::rounding_failure;
    return res;
  }
  if (rounded.ok() &&
      (!start_binary || objective_f(inst, rounded.solution) <= objective_f(inst, *start))) {
    res.solution = std::move(rounded.solution);
  } else {
    res.solution = *start;
    res.kept_initial_point = true;
  }
  res.objective = objective_f(inst, res.solution);
  res.status = AraStatus::ok;
  return res;
}

}  // namespace nfvchain
