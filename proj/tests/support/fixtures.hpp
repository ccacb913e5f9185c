#pragma once

// Hand-built instances shared by the unit tests.

#include <vector>

#include "nfvchain/model.hpp"
#include "nfvchain/scenario.hpp"

namespace fixture {

using nfvchain::Link;
using nfvchain::NfvInstance;
using nfvchain::Server;
using nfvchain::SfcRequest;

// Access switch 0, transport switch 1, servers 2.. with the given capacities.
// Links: access to every server, every server to transport, and a chain
// between consecutive servers.
inline NfvInstance diamond(const std::vector<double>& capacities, double link_bw = 1000.0) {
  std::vector<Server> servers;
  for (std::size_t n = 0; n < capacities.size(); ++n)
    servers.push_back({static_cast<nfvchain::NodeId>(2 + n), capacities[n], 10.0, 5.0});
  std::vector<Link> links;
  int id = 0;
  for (std::size_t n = 0; n < capacities.size(); ++n) {
    const auto s = static_cast<nfvchain::NodeId>(2 + n);
    links.push_back({id++, 0, s, link_bw});
    links.push_back({id++, s, 1, link_bw});
    if (n + 1 < capacities.size()) links.push_back({id++, s, s + 1, link_bw});
  }
  NfvInstance inst;
  inst.graph = nfvchain::DataCenterGraph({0}, {1}, servers, links);
  return inst;
}

inline SfcRequest sfc(const NfvInstance& inst, int user, std::vector<double> cpu, double bw, double max_delay) {
  SfcRequest s;
  s.user_id = user;
  s.vnf_cpu = std::move(cpu);
  s.segment_bandwidth.assign(s.vnf_cpu.size() + 1, bw);
  s.source = 0;
  s.destination = 1;
  s.max_delay = max_delay;
  s.server_unit_price.assign(inst.graph.server_count(), 0.5);
  s.link_unit_price.assign(inst.graph.links().size(), 0.2);
  return s;
}

// Small generated instance that every solver handles in well under a second.
inline NfvInstance small_generated(std::uint64_t seed, int n_servers = 4, int n_sfcs = 2, int vnf_max = 2) {
  nfvchain::NfvScenarioParams p;
  p.seed = seed;
  p.n_servers = n_servers;
  p.n_sfcs = n_sfcs;
  p.vnf_count_min = 1;
  p.vnf_count_max = vnf_max;
  p.n_access_switches = 1;
  p.n_transport_switches = 1;
  p.link_density = 0.5;
  return nfvchain::generate_nfv_scenario(p);
}

}  // namespace fixture
