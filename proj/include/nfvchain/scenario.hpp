#pragma once

// Random scenario generation.  Every entity draws from its own keyed stream,
// so growing one dimension (more servers, more SFCs, longer chains) leaves the
// values of the existing entities unchanged.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nfvchain/mining.hpp"
#include "nfvchain/model.hpp"
#include "nfvchain/rng.hpp"

namespace nfvchain {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  void check(const char* name) const {
    if (!(lo <= hi)) throw std::invalid_argument(std::string(name) + ": lo must not exceed hi");
  }
  double draw(Rng& rng) const { return rng.uniform(lo, hi); }
};

struct NfvScenarioParams {
  int n_servers = 10;
  int n_sfcs = 5;
  int n_access_switches = 2;
  int n_transport_switches = 2;
  int vnf_count_min = 3;
  int vnf_count_max = 8;
  Range bandwidth{100.0, 500.0};              // bit/s per segment
  Range cpu_demand_multiplier{1.0, 5.0};      // times the outgoing segment bandwidth
  double demand_scale = 1.0;
  Range server_capacity{1.0, 10.0};           // in capacity_unit
  double capacity_unit = 1e6;                 // cycles/s
  Range link_bandwidth{100.0, 500.0};         // in bandwidth_unit
  double bandwidth_unit = 1e6;                // bit/s
  Range proc_power{1.0, 5.0};                 // W
  Range static_power{1.0, 10.0};              // W
  Range server_price{0.1, 1.0};
  Range link_price{0.1, 1.0};
  double alpha = 0.5;
  double t_th = 0.020;  // s
  double link_density = 0.4;
  bool enforce_distinct_servers = true;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_servers < 1 || n_sfcs < 0 || n_access_switches < 1 || n_transport_switches < 1)
      throw std::invalid_argument("scenario: node and SFC counts must be positive");
    if (vnf_count_min < 1 || vnf_count_min > vnf_count_max)
      throw std::invalid_argument("scenario: invalid VNF count range");
    if (enforce_distinct_servers && n_servers < vnf_count_max)
      throw std::invalid_argument("scenario: n_servers (" + std::to_string(n_servers) +
                                  ") is below the largest VNF count (" +
                                  std::to_string(vnf_count_max) + ")");
    bandwidth.check("bandwidth");
    cpu_demand_multiplier.check("cpu_demand_multiplier");
    server_capacity.check("server_capacity");
    link_bandwidth.check("link_bandwidth");
    proc_power.check("proc_power");
    static_power.check("static_power");
    server_price.check("server_price");
    link_price.check("link_price");
    if (!(bandwidth.lo > 0.0) || !(cpu_demand_multiplier.lo > 0.0) || !(server_capacity.lo > 0.0) ||
        !(link_bandwidth.lo > 0.0) || !(server_price.lo > 0.0) || !(link_price.lo > 0.0) ||
        proc_power.lo < 0.0 || static_power.lo < 0.0)
      throw std::invalid_argument("scenario: ranges must be positive");
    if (!(demand_scale > 0.0) || !(capacity_unit > 0.0) || !(bandwidth_unit > 0.0))
      throw std::invalid_argument("scenario: scale factors must be > 0");
    if (!(link_density > 0.0 && link_density <= 1.0))
      throw std::invalid_argument("scenario: link_density must lie in (0,1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("scenario: alpha must lie in [0,1]");
    if (!(t_th > 0.0)) throw std::invalid_argument("scenario: t_th must be > 0");
  }
};

struct MiningScenarioParams {
  int n_miners = 3;
  int n_participants = 5;
  double noise = 1e-14;              // W
  Range price{1.0, 10.0};            // per cycle
  Range capacity{100.0, 500.0};      // cycles/s
  Range proc_power{0.1, 0.9};        // W
  Range tx_power{1e-3, 1e-2};        // W
  Range distance{50.0, 200.0};       // m
  Range size_bits{10.0, 50.0};
  Range cycles_per_bit{1.0, 5.0};
  double path_loss_exponent = 3.0;
  double max_delay = 600.0;          // s
  double gamma = 0.5;
  mining::RewardParams reward;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_miners < 0 || n_participants < 1)
      throw std::invalid_argument("mining scenario: counts must be positive");
    for (auto [r, name] : {std::pair{&price, "price"}, {&capacity, "capacity"}, {&proc_power, "proc_power"},
                           {&tx_power, "tx_power"}, {&distance, "distance"}, {&size_bits, "size_bits"},
                           {&cycles_per_bit, "cycles_per_bit"}}) {
      r->check(name);
      if (r->lo < 0.0) throw std::invalid_argument(std::string("mining scenario: negative ") + name);
    }
    if (!(noise > 0.0) || !(capacity.lo > 0.0) || !(distance.lo > 0.0) || !(size_bits.lo > 0.0) ||
        !(cycles_per_bit.lo > 0.0))
      throw std::invalid_argument("mining scenario: noise, capacity, distance and demand must be > 0");
    if (!(max_delay > 0.0)) throw std::invalid_argument("mining scenario: max_delay must be > 0");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("mining scenario: gamma must lie in [0,1]");
    reward.validate();
  }
};

namespace detail {

enum StreamTag : std::uint64_t {
  tag_server = 1,
  tag_link = 2,
  tag_sfc = 3,
  tag_segment = 4,
  tag_vnf = 5,
  tag_server_price = 6,
  tag_link_price = 7,
  tag_participant = 11,
  tag_miner = 12,
  tag_pair = 13,
};

inline std::uint64_t u64(int v) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(v)); }

}  // namespace detail

inline NfvInstance generate_nfv_scenario(const NfvScenarioParams& p) {
  using namespace detail;
  p.validate();
  const std::uint64_t seed = p.seed;
  std::vector<NodeId> access, transport;
  NodeId next = 0;
  for (int k = 0; k < p.n_access_switches; ++k) access.push_back(next++);
  for (int k = 0; k < p.n_transport_switches; ++k) transport.push_back(next++);
  std::vector<Server> servers;
  for (int n = 0; n < p.n_servers; ++n) {
    Rng rng{seed, tag_server, u64(n)};
    Server s;
    s.id = next++;
    s.cpu_capacity = p.server_capacity.draw(rng) * p.capacity_unit;
    s.static_power = p.static_power.draw(rng);
    s.proc_power = p.proc_power.draw(rng);
    servers.push_back(s);
  }

  // One draw per unordered node pair: existence, then bandwidth.
  const int n_nodes = next;
  struct PairDraw {
    bool present;
    double bandwidth;
  };
  auto pair_draw = [&](int u, int v) {
    Rng rng{seed, tag_link, u64(u), u64(v)};
    const bool present = rng.bernoulli(p.link_density);
    return PairDraw{present, p.link_bandwidth.draw(rng) * p.bandwidth_unit};
  };
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> bandwidths;
  std::vector<int> comp(n_nodes);
  for (int v = 0; v < n_nodes; ++v) comp[v] = v;
  auto find = [&](int v) {
    while (comp[v] != v) v = comp[v] = comp[comp[v]];
    return v;
  };
  for (int u = 0; u < n_nodes; ++u)
    for (int v = u + 1; v < n_nodes; ++v) {
      const PairDraw d = pair_draw(u, v);
      if (!d.present) continue;
      pairs.emplace_back(u, v);
      bandwidths.push_back(d.bandwidth);
      comp[find(u)] = find(v);
    }
  // Repair: join every other component to the one holding node 0, through the
  // pair of lowest node ids.
  for (int v = 1; v < n_nodes; ++v) {
    if (find(v) == find(0)) continue;
    pairs.emplace_back(0, v);
    bandwidths.push_back(pair_draw(0, v).bandwidth);
    comp[find(v)] = find(0);
  }
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return pairs[l] < pairs[r]; });
  std::vector<Link> links;
  for (std::size_t k : order)
    links.push_back(Link{static_cast<int>(links.size()), pairs[k].first, pairs[k].second, bandwidths[k]});

  NfvInstance inst;
  inst.graph = DataCenterGraph(access, transport, servers, links);
  inst.alpha = p.alpha;
  inst.enforce_distinct_servers = p.enforce_distinct_servers;
  for (int i = 0; i < p.n_sfcs; ++i) {
    Rng rng{seed, tag_sfc, u64(i)};
    SfcRequest sfc;
    sfc.user_id = i;
    const int J = rng.uniform_int(p.vnf_count_min, p.vnf_count_max);
    sfc.source = access[static_cast<std::size_t>(rng.uniform_int(0, p.n_access_switches - 1))];
    sfc.destination = transport[static_cast<std::size_t>(rng.uniform_int(0, p.n_transport_switches - 1))];
    sfc.max_delay = p.t_th;
    for (int s = 0; s <= J; ++s) {
      Rng seg{seed, tag_segment, u64(i), u64(s)};
      sfc.segment_bandwidth.push_back(p.bandwidth.draw(seg));
    }
    for (int j = 0; j < J; ++j) {
      Rng vnf{seed, tag_vnf, u64(i), u64(j)};
      const double outgoing = sfc.segment_bandwidth[static_cast<std::size_t>(j) + 1];
      sfc.vnf_cpu.push_back(p.cpu_demand_multiplier.draw(vnf) * outgoing * p.demand_scale);
    }
    for (int n = 0; n < p.n_servers; ++n) {
      Rng pr{seed, tag_server_price, u64(i), u64(n)};
      sfc.server_unit_price.push_back(p.server_price.draw(pr));
    }
    for (const Link& l : links) {
      Rng pr{seed, tag_link_price, u64(i), u64(l.src), u64(l.dst)};
      sfc.link_unit_price.push_back(p.link_price.draw(pr));
    }
    inst.sfcs.push_back(std::move(sfc));
  }
  inst.validate();
  return inst;
}

inline std::vector<mining::MiningTask> generate_mining_scenario(const MiningScenarioParams& p) {
  using namespace detail;
  p.validate();
  const std::uint64_t seed = p.seed;
  struct Device {
    double capacity, proc_power;
  };
  std::vector<Device> devices;
  for (int k = 0; k < p.n_participants; ++k) {
    Rng rng{seed, tag_participant, u64(k)};
    const double cap = p.capacity.draw(rng);
    devices.push_back({cap, p.proc_power.draw(rng)});
  }
  std::vector<mining::MiningTask> tasks;
  for (int i = 0; i < p.n_miners; ++i) {
    Rng rng{seed, tag_miner, u64(i)};
    mining::MiningTask t;
    t.miner_id = i;
    t.size_bits = p.size_bits.draw(rng);
    t.cycles_per_bit = p.cycles_per_bit.draw(rng);
    t.max_delay = p.max_delay;
    for (int k = 0; k < p.n_participants; ++k) {
      Rng pair{seed, tag_pair, u64(i), u64(k)};
      const double nu = pair.rayleigh(1.0);
      const double d = p.distance.draw(pair);
      mining::Participant q;
      q.id = k;
      q.cpu_capacity = devices[static_cast<std::size_t>(k)].capacity;
      q.proc_power = devices[static_cast<std::size_t>(k)].proc_power;
      q.unit_price = p.price.draw(pair);
      q.channel_gain = nu * std::pow(d, -p.path_loss_exponent);
      q.noise = p.noise;
      t.tx_power.push_back(p.tx_power.draw(pair));
      t.participants.push_back(q);
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

}  // namespace nfvchain
