#pragma once

// Smart-contract allocation workflow: the InP advertises resources, users
// request SFCs, the InP runs a solver and announces per-user allocations and
// costs, users verify and pay, and one miner bundles the verified
// transactions into a block.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nfvchain/ara.hpp"
#include "nfvchain/hura.hpp"
#include "nfvchain/json_io.hpp"
#include "nfvchain/mining.hpp"
#include "nfvchain/model.hpp"
#include "nfvchain/rng.hpp"

namespace nfvchain {

enum class EventKind { inp_information, ra_request, run_allocation, payment };

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::inp_information: return "InpInformation";
    case EventKind::ra_request: return "RaRequest";
    case EventKind::run_allocation: return "RunAllocation";
    case EventKind::payment: return "Payment";
  }
  return "unknown";
}

struct ContractEvent {
  EventKind kind = EventKind::inp_information;
  std::uint64_t sequence = 0;
  std::string issuer;
  json payload;
};

inline json event_to_json(const ContractEvent& ev) {
  return json{{"sequence", ev.sequence}, {"kind", to_string(ev.kind)}, {"issuer", ev.issuer},
              {"payload", ev.payload}};
}

// Chained FNV-1a over the serialized events; stands in for block hashes.
inline std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

enum class Rule { qos = 1, cost = 2, allocation = 3, payment = 4, structure = 0 };

struct Reason {
  Rule rule;
  std::string message;
};

struct Verdict {
  bool accept = true;
  std::vector<Reason> reasons;

  void fail(Rule r, std::string msg) {
    accept = false;
    reasons.push_back({r, std::move(msg)});
  }
  std::set<int> rules() const {
    std::set<int> out;
    for (const Reason& r : reasons) out.insert(static_cast<int>(r.rule));
    return out;
  }
};

// What a verifier knows: the advertised instance, the InP's published
// placement and the announced per-user costs.
struct VerificationContext {
  const NfvInstance* instance = nullptr;
  const PlacementSolution* published = nullptr;
  std::map<int, double> announced_cost;
  double tolerance = kFeasibilityTolerance;
};

inline bool same_amount(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Slice of user index i as a RunAllocation payload.
inline json allocation_payload(const NfvInstance& inst, const PlacementSolution& sol, std::size_t i,
                               const std::string& solver) {
  const auto& g = inst.graph;
  const SfcRequest& sfc = inst.sfcs[i];
  json y = json::array();
  for (std::size_t s = 0; s < sol.y[i].size(); ++s)
    for (std::size_t a = 0; a < g.arc_count(); ++a)
      if (sol.y[i][s][a] != 0.0) y.push_back({{"segment", s}, {"arc", a}, {"bandwidth", sol.y[i][s][a]}});
  json servers = json::array();
  for (std::size_t j = 0; j < sfc.vnf_count(); ++j)
    for (std::size_t n = 0; n < g.server_count(); ++n)
      if (sol.x[i][j][n] > 0.5) servers.push_back(g.servers()[n].id);
  return json{{"user_id", sfc.user_id},
              {"solver", solver},
              {"servers", servers},
              {"x", sol.x[i]},
              {"y", y},
              {"announced_cost", compute_user_cost(inst, sol, sfc.user_id)},
              {"announced_delay", compute_delay(inst, sol, sfc.user_id)}};
}

namespace detail {

// Published solution with user i's slice replaced by the payload's.
inline PlacementSolution apply_payload(const NfvInstance& inst, const PlacementSolution& base,
                                       std::size_t i, const json& payload) {
  PlacementSolution sol = base;
  const SfcRequest& sfc = inst.sfcs[i];
  auto x = payload.at("x").get<std::vector<std::vector<double>>>();
  if (x.size() != sfc.vnf_count()) throw std::invalid_argument("x has the wrong number of VNFs");
  for (const auto& row : x)
    if (row.size() != inst.graph.server_count()) throw std::invalid_argument("x row has the wrong length");
  sol.x[i] = std::move(x);
  for (auto& seg : sol.y[i]) std::fill(seg.begin(), seg.end(), 0.0);
  for (const json& e : payload.at("y")) {
    const auto s = e.at("segment").get<std::size_t>();
    const auto a = e.at("arc").get<std::size_t>();
    if (s >= sol.y[i].size() || a >= inst.graph.arc_count())
      throw std::invalid_argument("y entry out of range");
    sol.y[i][s][a] = e.at("bandwidth").get<double>();
  }
  return sol;
}

}  // namespace detail

inline Verdict verify_transaction(const ContractEvent& ev, const VerificationContext& ctx) {
  Verdict v;
  const NfvInstance& inst = *ctx.instance;
  try {
    const int user = ev.payload.at("user_id").get<int>();
    const std::size_t i = inst.user_index(user);
    if (ev.kind == EventKind::payment) {
      const double amount = ev.payload.at("amount").get<double>();
      auto it = ctx.announced_cost.find(user);
      if (it == ctx.announced_cost.end()) {
        v.fail(Rule::payment, "no announced cost for user " + std::to_string(user));
      } else if (!same_amount(amount, it->second)) {
        v.fail(Rule::payment, "payment mismatch: paid " + std::to_string(amount) + ", announced " +
                                  std::to_string(it->second));
      }
      return v;
    }
    if (ev.kind != EventKind::run_allocation) {
      v.fail(Rule::structure, "event kind " + to_string(ev.kind) + " is not verifiable");
      return v;
    }
    const PlacementSolution sol = detail::apply_payload(inst, *ctx.published, i, ev.payload);
    const double announced = ev.payload.at("announced_cost").get<double>();

    const double delay = compute_delay(inst, sol, user);
    if (delay > inst.sfcs[i].max_delay + ctx.tolerance)
      v.fail(Rule::qos, "delay " + std::to_string(delay) + " s exceeds " +
                            std::to_string(inst.sfcs[i].max_delay) + " s");
    const double cost = compute_user_cost(inst, sol, user);
    if (!same_amount(cost, announced))
      v.fail(Rule::cost, "cost mismatch: announced " + std::to_string(announced) + ", recomputed " +
                             std::to_string(cost));
    for (const Violation& viol : check_feasibility(inst, sol, ctx.tolerance, std::vector<int>{user})) {
      if (viol.constraint == ConstraintId::C7) continue;  // covered by the QoS rule
      std::string where;
      if (viol.element != npos) where = " at element " + std::to_string(viol.element);
      v.fail(Rule::allocation, to_string(viol.constraint) + " violated" + where + " (residual " +
                                   std::to_string(viol.residual) + ")");
    }
  } catch (const std::exception& e) {
    v = Verdict{};
    v.fail(Rule::structure, std::string("malformed payload: ") + e.what());
  }
  return v;
}

struct Block {
  struct Entry {
    std::uint64_t sequence = 0;
    bool verified = false;
  };
  std::vector<Entry> transactions;
  int miner_id = -1;
  double requested_reward = 0.0;
  std::string prev_hash;
  bool nonce_valid = true;
  bool orphaned = false;
};

// Block rules reuse the numbers 1..3: reward cap, prior verification, nonce.
inline Verdict verify_block(const Block& b, double cap) {
  Verdict v;
  if (b.requested_reward > cap)
    v.fail(Rule::qos, "requested reward " + std::to_string(b.requested_reward) + " exceeds cap " +
                          std::to_string(cap));
  for (const Block::Entry& t : b.transactions)
    if (!t.verified) v.fail(Rule::cost, "transaction " + std::to_string(t.sequence) + " was not verified");
  if (!b.nonce_valid) v.fail(Rule::allocation, "nonce check failed");
  return v;
}

// Winner index drawn with probability D_i C_i / sum D_j C_j.
inline std::size_t draw_winner(const std::vector<mining::MiningTask>& miners, std::uint64_t seed) {
  std::vector<double> w;
  for (const auto& t : miners) w.push_back(t.demand());
  Rng rng{seed, 0x77696e6e6572ULL};
  return rng.categorical(w);
}

enum class FaultClass { cost, payment, delay, capacity };

inline std::string to_string(FaultClass f) {
  switch (f) {
    case FaultClass::cost: return "cost";
    case FaultClass::payment: return "payment";
    case FaultClass::delay: return "delay";
    case FaultClass::capacity: return "capacity";
  }
  return "unknown";
}

inline Rule expected_rule(FaultClass f) {
  switch (f) {
    case FaultClass::cost: return Rule::cost;
    case FaultClass::payment: return Rule::payment;
    case FaultClass::delay: return Rule::qos;
    case FaultClass::capacity: return Rule::allocation;
  }
  return Rule::structure;
}

// Tampered copy of an honest RunAllocation (or Payment, for the payment
// fault).  Returns nullopt when the fault cannot be staged on this instance.
inline std::optional<ContractEvent> tamper(const ContractEvent& honest, FaultClass fault,
                                           const NfvInstance& inst, const PlacementSolution& published) {
  if (honest.kind != EventKind::run_allocation && honest.kind != EventKind::payment) return std::nullopt;
  ContractEvent ev = honest;
  const int user = ev.payload.at("user_id").get<int>();
  const std::size_t i = inst.user_index(user);
  switch (fault) {
    case FaultClass::cost:
      if (ev.kind != EventKind::run_allocation) return std::nullopt;
      ev.payload["announced_cost"] = ev.payload["announced_cost"].get<double>() + 1.0;
      return ev;
    case FaultClass::payment:
      if (ev.kind != EventKind::payment) return std::nullopt;
      ev.payload["amount"] = ev.payload["amount"].get<double>() + 1.0;
      return ev;
    case FaultClass::delay: {
      // A circulation on both arcs of one link keeps flow balance but adds
      // transmission delay; the cost is re-announced consistently.
      if (ev.kind != EventKind::run_allocation || inst.graph.arc_count() < 2) return std::nullopt;
      PlacementSolution sol = detail::apply_payload(inst, published, i, ev.payload);
      const double slack = inst.sfcs[i].max_delay - compute_delay(inst, sol, user);
      const double bw = inst.graph.arcs()[0].bandwidth;
      const double delta = 0.75 * (std::max(slack, 0.0) + 1e-6) * bw;
      for (std::size_t a : {0, 1}) {
        double used = 0.0;
        for (std::size_t k = 0; k < inst.sfcs.size(); ++k)
          for (const auto& seg : sol.y[k]) used += seg[a];
        if (used + delta > bw) return std::nullopt;
      }
      sol.y[i][0][0] += delta;
      sol.y[i][0][1] += delta;
      ev.payload = allocation_payload(inst, sol, i, ev.payload.at("solver").get<std::string>());
      return ev;
    }
    case FaultClass::capacity: {
      // Move the first VNF to a server the InP never switched on, or failing
      // that to one without room for it.  beta is left as published.
      if (ev.kind != EventKind::run_allocation) return std::nullopt;
      PlacementSolution sol = detail::apply_payload(inst, published, i, ev.payload);
      const auto& servers = inst.graph.servers();
      const double c = inst.sfcs[i].vnf_cpu[0];
      std::size_t target = npos;
      for (std::size_t n = 0; n < servers.size() && target == npos; ++n)
        if (sol.beta[n] < 0.5 && sol.x[i][0][n] < 0.5) target = n;
      for (std::size_t n = 0; n < servers.size() && target == npos; ++n) {
        if (sol.x[i][0][n] > 0.5) continue;
        double load = 0.0;
        for (std::size_t k = 0; k < inst.sfcs.size(); ++k)
          for (std::size_t j = 0; j < inst.sfcs[k].vnf_count(); ++j) load += sol.x[k][j][n] * inst.sfcs[k].vnf_cpu[j];
        if (load + c > servers[n].cpu_capacity) target = n;
      }
      if (target == npos) return std::nullopt;
      std::fill(sol.x[i][0].begin(), sol.x[i][0].end(), 0.0);
      sol.x[i][0][target] = 1.0;
      ev.payload = allocation_payload(inst, sol, i, ev.payload.at("solver").get<std::string>());
      return ev;
    }
  }
  return std::nullopt;
}

struct LedgerEntry {
  std::string kind;  // "payment" or "reward"
  std::string from;
  std::string to;
  double amount = 0.0;
};

struct WorkflowReport {
  bool aborted = false;
  std::string diagnostic;
  std::vector<ContractEvent> events;
  std::vector<Verdict> verdicts;  // parallel to events; InpInformation/RaRequest are accepted as is
  std::vector<int> accepted_users;
  std::vector<int> rejected_users;
  PlacementSolution solution;
  Block block;
  int winner = -1;  // miner id, -1 without miners
  double reward_paid = 0.0;
  std::vector<LedgerEntry> ledger;
};

enum class WorkflowSolver { ara, hura };

inline std::string to_string(WorkflowSolver s) { return s == WorkflowSolver::ara ? "ara" : "hura"; }

inline WorkflowReport run_workflow(const NfvInstance& inst, const std::vector<mining::MiningTask>& miners,
                                   WorkflowSolver solver, const mining::RewardParams& rp,
                                   std::uint64_t seed) {
  inst.validate();
  rp.validate();
  mining::validate(miners);
  WorkflowReport rep;
  std::uint64_t seq = 0;
  auto emit = [&](EventKind kind, std::string issuer, json payload) {
    rep.events.push_back(ContractEvent{kind, seq++, std::move(issuer), std::move(payload)});
    rep.verdicts.push_back(Verdict{});
  };

  // 1. Resources and prices.
  {
    json servers = json::array(), links = json::array(), prices = json::array();
    for (const Server& s : inst.graph.servers())
      servers.push_back({{"id", s.id}, {"cpu_capacity", s.cpu_capacity}});
    for (const Link& l : inst.graph.links())
      links.push_back({{"id", l.id}, {"src", l.src}, {"dst", l.dst}, {"bandwidth", l.bandwidth}});
    for (const SfcRequest& s : inst.sfcs)
      prices.push_back({{"user_id", s.user_id},
                        {"server_unit_price", s.server_unit_price},
                        {"link_unit_price", s.link_unit_price}});
    emit(EventKind::inp_information, "inp", {{"servers", servers}, {"links", links}, {"prices", prices}});
  }

  rep.solution = PlacementSolution::zeros(inst);
  if (!inst.sfcs.empty()) {
    // 2. Requests.
    for (const SfcRequest& s : inst.sfcs)
      emit(EventKind::ra_request, "user-" + std::to_string(s.user_id),
           {{"user_id", s.user_id},
            {"vnf_cpu", s.vnf_cpu},
            {"segment_bandwidth", s.segment_bandwidth},
            {"source", s.source},
            {"destination", s.destination},
            {"max_delay", s.max_delay}});

    // 3. Allocation.
    if (solver == WorkflowSolver::hura) {
      HuraResult h = hura_solve(inst);
      rep.solution = std::move(h.solution);
      rep.accepted_users = h.accepted;
      rep.rejected_users = h.rejected;
      if (h.accepted.empty()) {
        rep.aborted = true;
        rep.diagnostic = "hura placed no SFC";
        return rep;
      }
    } else {
      AraResult a = ara_solve(inst);
      if (!a.ok()) {
        rep.aborted = true;
        rep.diagnostic = "ara failed: " + to_string(a.status);
        return rep;
      }
      rep.solution = std::move(a.solution);
      for (const SfcRequest& s : inst.sfcs) rep.accepted_users.push_back(s.user_id);
    }

    // 4. Per-user allocation results, verified by the users.
    VerificationContext ctx{&inst, &rep.solution, {}, kFeasibilityTolerance};
    for (int user : rep.accepted_users) {
      const std::size_t i = inst.user_index(user);
      json payload = allocation_payload(inst, rep.solution, i, to_string(solver));
      ctx.announced_cost[user] = payload.at("announced_cost").get<double>();
      emit(EventKind::run_allocation, "inp", std::move(payload));
      rep.verdicts.back() = verify_transaction(rep.events.back(), ctx);
    }
    // 5. Payments.
    for (int user : rep.accepted_users) {
      emit(EventKind::payment, "user-" + std::to_string(user),
           {{"user_id", user}, {"amount", ctx.announced_cost.at(user)}, {"wallet", "user-" + std::to_string(user)}});
      rep.verdicts.back() = verify_transaction(rep.events.back(), ctx);
    }
  }

  // Block assembly over the verifiable transactions.
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  for (std::size_t k = 0; k < rep.events.size(); ++k) {
    const ContractEvent& ev = rep.events[k];
    digest = fnv1a(event_to_json(ev).dump(), digest);
    if (ev.kind == EventKind::run_allocation || ev.kind == EventKind::payment)
      rep.block.transactions.push_back({ev.sequence, rep.verdicts[k].accept});
  }
  rep.block.prev_hash = hex_digest(digest);
  if (!miners.empty()) {
    const std::size_t w = draw_winner(miners, seed);
    rep.winner = miners[w].miner_id;
    rep.block.miner_id = rep.winner;
    rep.block.requested_reward = mining::reward(miners[w], miners, rp);
    Rng orphan{seed, 0x6f727068616eULL};
    rep.block.orphaned = orphan.bernoulli(mining::orphan_probability(rp));
  }
  const bool block_ok = verify_block(rep.block, rp.cap()).accept;
  if (block_ok && !rep.block.orphaned) {
    for (std::size_t k = 0; k < rep.events.size(); ++k) {
      const ContractEvent& ev = rep.events[k];
      if (ev.kind != EventKind::payment || !rep.verdicts[k].accept) continue;
      rep.ledger.push_back({"payment", ev.issuer, "inp", ev.payload.at("amount").get<double>()});
    }
    if (rep.winner >= 0) {
      rep.reward_paid = rep.block.requested_reward;
      rep.ledger.push_back({"reward", "network", "miner-" + std::to_string(rep.winner), rep.reward_paid});
    }
  }
  return rep;
}

// One JSON object per line, each carrying the running digest.
inline void write_event_log(const WorkflowReport& rep, std::ostream& os) {
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  for (std::size_t k = 0; k < rep.events.size(); ++k) {
    json line = event_to_json(rep.events[k]);
    digest = fnv1a(line.dump(), digest);
    line["verified"] = rep.verdicts[k].accept;
    line["digest"] = hex_digest(digest);
    os << line.dump() << '\n';
  }
  json block{{"kind", "Block"},
             {"miner_id", rep.block.miner_id},
             {"requested_reward", rep.block.requested_reward},
             {"prev_hash", rep.block.prev_hash},
             {"orphaned", rep.block.orphaned},
             {"transactions", json::array()}};
  for (const auto& t : rep.block.transactions)
    block["transactions"].push_back({{"sequence", t.sequence}, {"verified", t.verified}});
  os << block.dump() << '\n';
}

inline void write_ledger_csv(const WorkflowReport& rep, std::ostream& os) {
  os.precision(17);
  os << "entry,kind,from,to,amount\n";
  for (std::size_t k = 0; k < rep.ledger.size(); ++k)
    os << k << ',' << rep.ledger[k].kind << ',' << rep.ledger[k].from << ',' << rep.ledger[k].to << ','
       << rep.ledger[k].amount << '\n';
}

}  // namespace nfvchain
