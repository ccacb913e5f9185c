#pragma once

// Data-center graph, SFC requests and placement solutions, plus the
// delay/energy/cost evaluators and the constraint checker for C1..C10.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfvchain {

using NodeId = int;
inline constexpr std::size_t npos = static_cast<std::size_t>(-1);
inline constexpr double kFeasibilityTolerance = 1e-6;

struct Server {
  NodeId id = 0;
  double cpu_capacity = 0.0;  // cycles/s
  double static_power = 0.0;  // W while active
  double proc_power = 0.0;    // W at full utilization
};

struct Link {
  int id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double bandwidth = 0.0;  // bit/s, per direction
};

enum class NodeKind { access_switch, transport_switch, server };

// One direction of a bidirectional link.
struct Arc {
  std::size_t link;
  std::size_t tail;  // node index
  std::size_t head;  // node index
  double bandwidth;
};

class DataCenterGraph {
 public:
  DataCenterGraph() = default;

  DataCenterGraph(std::vector<NodeId> access_switches, std::vector<NodeId> transport_switches,
                  std::vector<Server> servers, std::vector<Link> links)
      : access_(std::move(access_switches)),
        transport_(std::move(transport_switches)),
        servers_(std::move(servers)),
        links_(std::move(links)) {
    index_nodes();
  }

  const std::vector<NodeId>& access_switches() const { return access_; }
  const std::vector<NodeId>& transport_switches() const { return transport_; }
  const std::vector<Server>& servers() const { return servers_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  std::size_t node_count() const { return ids_.size(); }
  std::size_t server_count() const { return servers_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  bool has_node(NodeId id) const { return index_.count(id) != 0; }

  std::size_t node_index(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::domain_error("unknown node id " + std::to_string(id));
    return it->second;
  }
  NodeId node_id(std::size_t idx) const { return ids_.at(idx); }

  NodeKind kind(std::size_t idx) const {
    if (idx < access_.size()) return NodeKind::access_switch;
    if (idx < access_.size() + transport_.size()) return NodeKind::transport_switch;
    return NodeKind::server;
  }

  // Server position n for a node index, or npos for switches.
  std::size_t server_at(std::size_t node) const {
    const std::size_t first = access_.size() + transport_.size();
    return node >= first ? node - first : npos;
  }
  std::size_t server_node(std::size_t n) const { return access_.size() + transport_.size() + n; }

  const std::vector<std::size_t>& out_arcs(std::size_t node) const { return out_.at(node); }
  const std::vector<std::size_t>& in_arcs(std::size_t node) const { return in_.at(node); }

  // Connectivity of the underlying undirected graph.
  bool connected() const {
    if (ids_.empty()) return true;
    std::vector<bool> seen(ids_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t a : out_[v]) {
        const std::size_t w = arcs_[a].head;
        if (!seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == ids_.size();
  }

 private:
  void index_nodes() {
    auto add = [&](NodeId id) {
      if (!index_.emplace(id, ids_.size()).second)
        throw std::invalid_argument("node id " + std::to_string(id) + " declared twice");
      ids_.push_back(id);
    };
    for (NodeId id : access_) add(id);
    for (NodeId id : transport_) add(id);
    for (const Server& s : servers_) {
      if (!(s.cpu_capacity > 0.0)) throw std::invalid_argument("server cpu_capacity must be > 0");
      if (!(s.static_power >= 0.0) || !(s.proc_power >= 0.0))
        throw std::invalid_argument("server power must be >= 0");
      add(s.id);
    }
    out_.assign(ids_.size(), {});
    in_.assign(ids_.size(), {});
    std::map<int, bool> link_ids;
    for (std::size_t l = 0; l < links_.size(); ++l) {
      const Link& link = links_[l];
      if (!link_ids.emplace(link.id, true).second)
        throw std::invalid_argument("link id " + std::to_string(link.id) + " declared twice");
      if (link.src == link.dst) throw std::invalid_argument("link endpoints must differ");
      if (!(link.bandwidth > 0.0)) throw std::invalid_argument("link bandwidth must be > 0");
      if (!has_node(link.src) || !has_node(link.dst))
        throw std::invalid_argument("link " + std::to_string(link.id) + " references unknown node");
      const std::size_t u = index_.at(link.src), v = index_.at(link.dst);
      for (auto [tail, head] : {std::pair{u, v}, std::pair{v, u}}) {
        out_[tail].push_back(arcs_.size());
        in_[head].push_back(arcs_.size());
        arcs_.push_back(Arc{l, tail, head, link.bandwidth});
      }
    }
  }

  std::vector<NodeId> access_;
  std::vector<NodeId> transport_;
  std::vector<Server> servers_;
  std::vector<Link> links_;
  std::vector<Arc> arcs_;
  std::vector<NodeId> ids_;
  std::map<NodeId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

struct SfcRequest {
  int user_id = 0;
  std::vector<double> vnf_cpu;            // C_{i,j}, cycles
  std::vector<double> segment_bandwidth;  // J+1 entries, source->VNF1 ... VNF_J->destination
  NodeId source = 0;                      // access switch
  NodeId destination = 0;                 // transport switch
  double max_delay = 0.0;                 // seconds
  std::vector<double> server_unit_price;  // per server, price per cycle
  std::vector<double> link_unit_price;    // per link, price per bit/s

  std::size_t vnf_count() const { return vnf_cpu.size(); }
  std::size_t segment_count() const { return segment_bandwidth.size(); }
};

struct NfvInstance {
  DataCenterGraph graph;
  std::vector<SfcRequest> sfcs;
  double alpha = 0.5;
  bool enforce_distinct_servers = true;

  std::size_t user_index(int user_id) const {
    for (std::size_t i = 0; i < sfcs.size(); ++i)
      if (sfcs[i].user_id == user_id) return i;
    throw std::domain_error("unknown user id " + std::to_string(user_id));
  }

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
    const std::size_t n_servers = graph.server_count();
    const std::size_t n_links = graph.links().size();
    std::map<int, bool> seen;
    for (const SfcRequest& s : sfcs) {
      const std::string who = "sfc of user " + std::to_string(s.user_id);
      if (!seen.emplace(s.user_id, true).second) throw std::invalid_argument(who + " declared twice");
      if (s.vnf_cpu.empty()) throw std::invalid_argument(who + ": needs at least one VNF");
      if (s.segment_bandwidth.size() != s.vnf_cpu.size() + 1)
        throw std::invalid_argument(who + ": segment_bandwidth must have J+1 entries");
      auto positive = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double d) { return d > 0.0; });
      };
      if (!positive(s.vnf_cpu) || !positive(s.segment_bandwidth))
        throw std::invalid_argument(who + ": demands must be positive");
      if (s.server_unit_price.size() != n_servers || s.link_unit_price.size() != n_links)
        throw std::invalid_argument(who + ": price tables do not match the graph");
      if (!positive(s.server_unit_price) || !positive(s.link_unit_price))
        throw std::invalid_argument(who + ": prices must be positive");
      if (!(s.max_delay > 0.0)) throw std::invalid_argument(who + ": max_delay must be > 0");
      if (!graph.has_node(s.source) ||
          graph.kind(graph.node_index(s.source)) != NodeKind::access_switch)
        throw std::invalid_argument(who + ": source must be an access switch");
      if (!graph.has_node(s.destination) ||
          graph.kind(graph.node_index(s.destination)) != NodeKind::transport_switch)
        throw std::invalid_argument(who + ": destination must be a transport switch");
    }
  }
};

// beta[n], x[i][j][n], y[i][segment][arc].
struct PlacementSolution {
  std::vector<double> beta;
  std::vector<std::vector<std::vector<double>>> x;
  std::vector<std::vector<std::vector<double>>> y;
  bool binary = false;

  static PlacementSolution zeros(const NfvInstance& inst) {
    PlacementSolution s;
    const std::size_t n = inst.graph.server_count(), a = inst.graph.arc_count();
    s.beta.assign(n, 0.0);
    for (const SfcRequest& sfc : inst.sfcs) {
      s.x.emplace_back(sfc.vnf_count(), std::vector<double>(n, 0.0));
      s.y.emplace_back(sfc.segment_count(), std::vector<double>(a, 0.0));
    }
    s.binary = true;
    return s;
  }
};

inline void check_dimensions(const NfvInstance& inst, const PlacementSolution& sol) {
  const std::size_t n = inst.graph.server_count(), a = inst.graph.arc_count();
  bool ok = sol.beta.size() == n && sol.x.size() == inst.sfcs.size() &&
            sol.y.size() == inst.sfcs.size();
  for (std::size_t i = 0; ok && i < inst.sfcs.size(); ++i) {
    ok = sol.x[i].size() == inst.sfcs[i].vnf_count() &&
         sol.y[i].size() == inst.sfcs[i].segment_count();
    for (const auto& row : sol.x[i]) ok = ok && row.size() == n;
    for (const auto& row : sol.y[i]) ok = ok && row.size() == a;
  }
  if (!ok) throw std::domain_error("placement solution dimensions do not match the instance");
}

// Processing part of the end-to-end delay of user index i.
inline double processing_delay(const NfvInstance& inst, const PlacementSolution& sol,
                               std::size_t i) {
  const auto& servers = inst.graph.servers();
  double t = 0.0;
  for (std::size_t j = 0; j < inst.sfcs[i].vnf_count(); ++j)
    for (std::size_t n = 0; n < servers.size(); ++n)
      t += sol.x[i][j][n] * inst.sfcs[i].vnf_cpu[j] / servers[n].cpu_capacity;
  return t;
}

inline double transmission_delay(const NfvInstance& inst, const PlacementSolution& sol,
                                 std::size_t i) {
  const auto& arcs = inst.graph.arcs();
  double t = 0.0;
  for (const auto& seg : sol.y[i])
    for (std::size_t a = 0; a < arcs.size(); ++a) t += seg[a] / arcs[a].bandwidth;
  return t;
}

inline double compute_delay(const NfvInstance& inst, const PlacementSolution& sol, int user_id) {
  check_dimensions(inst, sol);
  const std::size_t i = inst.user_index(user_id);
  return processing_delay(inst, sol, i) + transmission_delay(inst, sol, i);
}

inline double compute_energy(const NfvInstance& inst, const PlacementSolution& sol) {
  check_dimensions(inst, sol);
  const auto& servers = inst.graph.servers();
  double e = 0.0;
  for (std::size_t n = 0; n < servers.size(); ++n) {
    double util = 0.0;
    for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
      for (std::size_t j = 0; j < inst.sfcs[i].vnf_count(); ++j)
        util += sol.x[i][j][n] * inst.sfcs[i].vnf_cpu[j] / servers[n].cpu_capacity;
    e += sol.beta[n] * servers[n].static_power + servers[n].proc_power * util;
  }
  return e;
}

inline double server_cost(const NfvInstance& inst, const PlacementSolution& sol, std::size_t i) {
  const SfcRequest& sfc = inst.sfcs[i];
  double c = 0.0;
  for (std::size_t j = 0; j < sfc.vnf_count(); ++j)
    for (std::size_t n = 0; n < sol.beta.size(); ++n)
      c += sfc.server_unit_price[n] * sol.x[i][j][n] * sfc.vnf_cpu[j];
  return c;
}

inline double link_cost(const NfvInstance& inst, const PlacementSolution& sol, std::size_t i) {
  const SfcRequest& sfc = inst.sfcs[i];
  const auto& arcs = inst.graph.arcs();
  double c = 0.0;
  for (const auto& seg : sol.y[i])
    for (std::size_t a = 0; a < arcs.size(); ++a) c += sfc.link_unit_price[arcs[a].link] * seg[a];
  return c;
}

// Cost borne by one user: its share of the total cost.
inline double compute_user_cost(const NfvInstance& inst, const PlacementSolution& sol,
                                int user_id) {
  check_dimensions(inst, sol);
  const std::size_t i = inst.user_index(user_id);
  return server_cost(inst, sol, i) + link_cost(inst, sol, i);
}

inline double compute_cost(const NfvInstance& inst, const PlacementSolution& sol) {
  check_dimensions(inst, sol);
  double c = 0.0;
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
    c += server_cost(inst, sol, i) + link_cost(inst, sol, i);
  return c;
}

// Link-bandwidth part of the cost only.
inline double compute_routing_cost(const NfvInstance& inst, const PlacementSolution& sol) {
  check_dimensions(inst, sol);
  double c = 0.0;
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i) c += link_cost(inst, sol, i);
  return c;
}

inline double objective_f(const NfvInstance& inst, const PlacementSolution& sol) {
  return inst.alpha * compute_energy(inst, sol) + (1.0 - inst.alpha) * compute_cost(inst, sol);
}

inline std::size_t active_server_count(const PlacementSolution& sol) {
  return static_cast<std::size_t>(
      std::count_if(sol.beta.begin(), sol.beta.end(), [](double b) { return b > 0.5; }));
}

enum class ConstraintId { C1, C2, C3, C4, C5, C6, C7, C8, C9, C10 };

inline std::string to_string(ConstraintId c) {
  static const char* names[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10"};
  return names[static_cast<int>(c)];
}

// element: VNF index for C1/C9, server for C2/C3/C4/C8, node for C5, arc for
// C6/C10; segment is set for C5/C10 and npos otherwise.
struct Violation {
  ConstraintId constraint;
  std::size_t user = npos;
  std::size_t element = npos;
  std::size_t segment = npos;
  double residual = 0.0;
};

// Position indicator of chain position p (0 = source, J+1 = destination,
// otherwise VNF p-1) at a node.
inline double chain_position(const NfvInstance& inst, const PlacementSolution& sol, std::size_t i,
                             std::size_t p, std::size_t node) {
  const SfcRequest& sfc = inst.sfcs[i];
  const auto& g = inst.graph;
  if (p == 0) return node == g.node_index(sfc.source) ? 1.0 : 0.0;
  if (p == sfc.vnf_count() + 1) return node == g.node_index(sfc.destination) ? 1.0 : 0.0;
  const std::size_t n = g.server_at(node);
  return n == npos ? 0.0 : sol.x[i][p - 1][n];
}

// Lists every violated constraint.  With `users` set, per-user constraints are
// only checked for those users; shared constraints (C3, C4, C6, C8) always run.
inline std::vector<Violation> check_feasibility(const NfvInstance& inst,
                                                const PlacementSolution& sol,
                                                double tol = kFeasibilityTolerance,
                                                std::optional<std::vector<int>> users = {}) {
  if (tol < 0.0) throw std::domain_error("feasibility tolerance must be >= 0");
  check_dimensions(inst, sol);
  const auto& g = inst.graph;
  const auto& servers = g.servers();
  const auto& arcs = g.arcs();
  const std::size_t N = servers.size();
  std::vector<bool> checked(inst.sfcs.size(), !users.has_value());
  if (users)
    for (int u : *users) checked[inst.user_index(u)] = true;

  std::vector<Violation> out;
  auto report = [&](ConstraintId c, std::size_t i, std::size_t e, std::size_t s, double r) {
    if (r > tol) out.push_back(Violation{c, i, e, s, r});
  };
  auto binary_residual = [](double v) { return std::min(std::abs(v), std::abs(v - 1.0)); };
  auto box_residual = [](double v) { return std::max({0.0, -v, v - 1.0}); };

  for (std::size_t i = 0; i < inst.sfcs.size(); ++i) {
    if (!checked[i]) continue;
    const SfcRequest& sfc = inst.sfcs[i];
    for (std::size_t j = 0; j < sfc.vnf_count(); ++j) {
      double sum = 0.0;
      for (std::size_t n = 0; n < N; ++n) sum += sol.x[i][j][n];
      report(ConstraintId::C1, i, j, npos, std::abs(sum - 1.0));
      for (std::size_t n = 0; n < N; ++n) {
        const double v = sol.x[i][j][n];
        report(ConstraintId::C9, i, j, npos, sol.binary ? binary_residual(v) : box_residual(v));
      }
    }
    if (inst.enforce_distinct_servers) {
      for (std::size_t n = 0; n < N; ++n) {
        double sum = 0.0;
        for (std::size_t j = 0; j < sfc.vnf_count(); ++j) sum += sol.x[i][j][n];
        report(ConstraintId::C2, i, n, npos, sum - 1.0);
      }
    }
    for (std::size_t s = 0; s < sfc.segment_count(); ++s) {
      const double demand = sfc.segment_bandwidth[s];
      for (std::size_t v = 0; v < g.node_count(); ++v) {
        double net = 0.0;
        for (std::size_t a : g.out_arcs(v)) net += sol.y[i][s][a];
        for (std::size_t a : g.in_arcs(v)) net -= sol.y[i][s][a];
        const double want =
            demand * (chain_position(inst, sol, i, s, v) - chain_position(inst, sol, i, s + 1, v));
        report(ConstraintId::C5, i, v, s, std::abs(net - want));
      }
      for (std::size_t a = 0; a < arcs.size(); ++a)
        report(ConstraintId::C10, i, a, s, -sol.y[i][s][a]);
    }
    const double delay = processing_delay(inst, sol, i) + transmission_delay(inst, sol, i);
    report(ConstraintId::C7, i, npos, npos, delay - sfc.max_delay);
  }

  for (std::size_t n = 0; n < N; ++n) {
    double load = 0.0;
    for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
      for (std::size_t j = 0; j < inst.sfcs[i].vnf_count(); ++j) {
        load += sol.x[i][j][n] * inst.sfcs[i].vnf_cpu[j];
        report(ConstraintId::C4, i, n, npos, sol.x[i][j][n] - sol.beta[n]);
      }
    report(ConstraintId::C3, npos, n, npos, load - sol.beta[n] * servers[n].cpu_capacity);
    report(ConstraintId::C8, npos, n, npos,
           sol.binary ? binary_residual(sol.beta[n]) : box_residual(sol.beta[n]));
  }
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    double used = 0.0;
    for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
      for (const auto& seg : sol.y[i]) used += seg[a];
    report(ConstraintId::C6, npos, a, npos, used - arcs[a].bandwidth);
  }
  return out;
}

}  // namespace nfvchain
