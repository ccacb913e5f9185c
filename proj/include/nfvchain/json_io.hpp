#pragma once

// JSON documents for instances, placement solutions and mining scenarios.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nfvchain/mining.hpp"
#include "nfvchain/model.hpp"

namespace nfvchain {

using json = nlohmann::ordered_json;

inline constexpr const char* kInstanceSchema = "nfvchain.instance/1";
inline constexpr const char* kSolutionSchema = "nfvchain.solution/1";
inline constexpr const char* kMiningSchema = "nfvchain.mining/1";

namespace detail {

inline void expect_schema(const json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != schema)
    throw std::invalid_argument(std::string("expected a document with schema ") + schema);
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline json instance_to_json(const NfvInstance& inst) {
  const auto& g = inst.graph;
  json servers = json::array();
  for (const Server& s : g.servers())
    servers.push_back({{"id", s.id},
                       {"cpu_capacity", s.cpu_capacity},
                       {"static_power", s.static_power},
                       {"proc_power", s.proc_power}});
  json links = json::array();
  for (const Link& l : g.links())
    links.push_back({{"id", l.id}, {"src", l.src}, {"dst", l.dst}, {"bandwidth", l.bandwidth}});
  json sfcs = json::array();
  for (const SfcRequest& s : inst.sfcs)
    sfcs.push_back({{"user_id", s.user_id},
                    {"vnf_cpu", s.vnf_cpu},
                    {"segment_bandwidth", s.segment_bandwidth},
                    {"source", s.source},
                    {"destination", s.destination},
                    {"max_delay", s.max_delay},
                    {"server_unit_price", s.server_unit_price},
                    {"link_unit_price", s.link_unit_price}});
  return json{{"schema", kInstanceSchema},
              {"nodes",
               {{"access_switches", g.access_switches()},
                {"transport_switches", g.transport_switches()},
                {"servers", servers}}},
              {"links", links},
              {"sfcs", sfcs},
              {"alpha", inst.alpha},
              {"enforce_distinct_servers", inst.enforce_distinct_servers}};
}

inline NfvInstance instance_from_json(const json& j) {
  using detail::field;
  detail::expect_schema(j, kInstanceSchema);
  const json& nodes = j.at("nodes");
  std::vector<Server> servers;
  for (const json& s : nodes.at("servers"))
    servers.push_back(Server{field<int>(s, "id"), field<double>(s, "cpu_capacity"),
                             field<double>(s, "static_power"), field<double>(s, "proc_power")});
  std::vector<Link> links;
  for (const json& l : j.at("links"))
    links.push_back(Link{field<int>(l, "id"), field<int>(l, "src"), field<int>(l, "dst"),
                         field<double>(l, "bandwidth")});
  NfvInstance inst;
  inst.graph = DataCenterGraph(field<std::vector<NodeId>>(nodes, "access_switches"),
                               field<std::vector<NodeId>>(nodes, "transport_switches"),
                               std::move(servers), std::move(links));
  for (const json& s : j.at("sfcs")) {
    SfcRequest r;
    r.user_id = field<int>(s, "user_id");
    r.vnf_cpu = field<std::vector<double>>(s, "vnf_cpu");
    r.segment_bandwidth = field<std::vector<double>>(s, "segment_bandwidth");
    r.source = field<NodeId>(s, "source");
    r.destination = field<NodeId>(s, "destination");
    r.max_delay = field<double>(s, "max_delay");
    r.server_unit_price = field<std::vector<double>>(s, "server_unit_price");
    r.link_unit_price = field<std::vector<double>>(s, "link_unit_price");
    inst.sfcs.push_back(std::move(r));
  }
  inst.alpha = field<double>(j, "alpha");
  inst.enforce_distinct_servers = j.value("enforce_distinct_servers", true);
  inst.validate();
  return inst;
}

// y is written sparsely: one entry per positive (user, segment, arc) value,
// with the arc given by its link id and direction.
inline json solution_to_json(const NfvInstance& inst, const PlacementSolution& sol) {
  check_dimensions(inst, sol);
  const auto& g = inst.graph;
  json x = json::array();
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
    x.push_back({{"user_id", inst.sfcs[i].user_id}, {"x", sol.x[i]}});
  json y = json::array();
  for (std::size_t i = 0; i < inst.sfcs.size(); ++i)
    for (std::size_t s = 0; s < sol.y[i].size(); ++s)
      for (std::size_t a = 0; a < g.arc_count(); ++a) {
        const double v = sol.y[i][s][a];
        if (v == 0.0) continue;
        const Arc& arc = g.arcs()[a];
        y.push_back({{"user_id", inst.sfcs[i].user_id},
                     {"segment", s},
                     {"link", g.links()[arc.link].id},
                     {"from", g.node_id(arc.tail)},
                     {"to", g.node_id(arc.head)},
                     {"bandwidth", v}});
      }
  json delays = json::array();
  for (const SfcRequest& s : inst.sfcs)
    delays.push_back({{"user_id", s.user_id}, {"delay", compute_delay(inst, sol, s.user_id)}});
  return json{{"schema", kSolutionSchema},
              {"binary", sol.binary},
              {"beta", sol.beta},
              {"x", x},
              {"y", y},
              {"metrics",
               {{"objective", objective_f(inst, sol)},
                {"energy", compute_energy(inst, sol)},
                {"cost", compute_cost(inst, sol)},
                {"active_servers", active_server_count(sol)},
                {"delays", delays}}}};
}

inline PlacementSolution solution_from_json(const NfvInstance& inst, const json& j) {
  using detail::field;
  detail::expect_schema(j, kSolutionSchema);
  const auto& g = inst.graph;
  PlacementSolution sol = PlacementSolution::zeros(inst);
  sol.binary = field<bool>(j, "binary");
  sol.beta = field<std::vector<double>>(j, "beta");
  for (const json& e : j.at("x")) {
    const std::size_t i = inst.user_index(field<int>(e, "user_id"));
    sol.x[i] = field<std::vector<std::vector<double>>>(e, "x");
  }
  for (const json& e : j.at("y")) {
    const std::size_t i = inst.user_index(field<int>(e, "user_id"));
    const auto s = field<std::size_t>(e, "segment");
    const int link = field<int>(e, "link");
    const std::size_t from = g.node_index(field<NodeId>(e, "from"));
    std::size_t arc = npos;
    for (std::size_t a = 0; a < g.arc_count(); ++a)
      if (g.links()[g.arcs()[a].link].id == link && g.arcs()[a].tail == from) arc = a;
    if (arc == npos || s >= sol.y[i].size())
      throw std::invalid_argument("solution references an unknown arc or segment");
    sol.y[i][s][arc] = field<double>(e, "bandwidth");
  }
  check_dimensions(inst, sol);
  return sol;
}

inline json mining_to_json(const std::vector<mining::MiningTask>& tasks, double gamma,
                           const mining::RewardParams& rp) {
  json ts = json::array();
  for (const mining::MiningTask& t : tasks) {
    json ps = json::array();
    for (std::size_t k = 0; k < t.participants.size(); ++k) {
      const mining::Participant& p = t.participants[k];
      ps.push_back({{"id", p.id},
                    {"cpu_capacity", p.cpu_capacity},
                    {"proc_power", p.proc_power},
                    {"unit_price", p.unit_price},
                    {"channel_gain", p.channel_gain},
                    {"noise", p.noise},
                    {"tx_power", t.tx_power[k]}});
    }
    ts.push_back({{"miner_id", t.miner_id},
                  {"size_bits", t.size_bits},
                  {"cycles_per_bit", t.cycles_per_bit},
                  {"max_delay", t.max_delay},
                  {"participants", ps}});
  }
  return json{{"schema", kMiningSchema},
              {"gamma", gamma},
              {"reward",
               {{"r_const", rp.r_const},
                {"r_trans", rp.r_trans},
                {"n_trans", rp.n_trans},
                {"lambda", rp.lambda},
                {"z", rp.z}}},
              {"tasks", ts}};
}

struct MiningDocument {
  std::vector<mining::MiningTask> tasks;
  double gamma = 0.5;
  mining::RewardParams reward;
};

inline MiningDocument mining_from_json(const json& j) {
  using detail::field;
  detail::expect_schema(j, kMiningSchema);
  MiningDocument doc;
  doc.gamma = field<double>(j, "gamma");
  const json& r = j.at("reward");
  doc.reward = {field<double>(r, "r_const"), field<double>(r, "r_trans"), field<double>(r, "n_trans"),
                field<double>(r, "lambda"), field<double>(r, "z")};
  for (const json& t : j.at("tasks")) {
    mining::MiningTask task;
    task.miner_id = field<int>(t, "miner_id");
    task.size_bits = field<double>(t, "size_bits");
    task.cycles_per_bit = field<double>(t, "cycles_per_bit");
    task.max_delay = t.value("max_delay", 600.0);
    for (const json& p : t.at("participants")) {
      task.participants.push_back({field<int>(p, "id"), field<double>(p, "cpu_capacity"),
                                   field<double>(p, "proc_power"), field<double>(p, "unit_price"),
                                   field<double>(p, "channel_gain"), field<double>(p, "noise")});
      task.tx_power.push_back(field<double>(p, "tx_power"));
    }
    doc.tasks.push_back(std::move(task));
  }
  mining::validate(doc.tasks);
  doc.reward.validate();
  return doc;
}

}  // namespace nfvchain
