#pragma once

// Mining-task offloading: rate and energy model, block reward with
// orphaning, and the offloading LP.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nfvchain/lp.hpp"

namespace nfvchain::mining {

struct Participant {
  int id = 0;
  double cpu_capacity = 0.0;  // cycles/s
  double proc_power = 0.0;    // W
  double unit_price = 0.0;    // per cycle
  double channel_gain = 0.0;  // from the miner to this participant
  double noise = 0.0;         // W
};

struct MiningTask {
  int miner_id = 0;
  double size_bits = 0.0;
  double cycles_per_bit = 0.0;
  std::vector<double> tx_power;  // per participant, W
  std::vector<Participant> participants;
  double max_delay = 600.0;  // s

  double demand() const { return size_bits * cycles_per_bit; }
};

struct RewardParams {
  double r_const = 12.5;
  double r_trans = 0.01;
  double n_trans = 5.0;
  double lambda = 1.0 / 600.0;
  double z = 0.01;

  void validate() const {
    if (r_const < 0.0 || r_trans < 0.0 || n_trans < 0.0 || z < 0.0)
      throw std::invalid_argument("reward parameters must be >= 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("block rate lambda must be > 0");
  }

  double cap() const { return r_const + n_trans * r_trans; }
};

inline void validate(const std::vector<MiningTask>& tasks) {
  std::map<int, double> capacity;
  std::map<int, bool> miners;
  for (const MiningTask& t : tasks) {
    const std::string who = "mining task of miner " + std::to_string(t.miner_id);
    if (!miners.emplace(t.miner_id, true).second) throw std::invalid_argument(who + " declared twice");
    if (!(t.size_bits > 0.0) || !(t.cycles_per_bit > 0.0))
      throw std::invalid_argument(who + ": size and cycles per bit must be > 0");
    if (t.participants.empty()) throw std::invalid_argument(who + ": needs participants");
    if (t.tx_power.size() != t.participants.size())
      throw std::invalid_argument(who + ": tx_power must have one entry per participant");
    if (!(t.max_delay > 0.0)) throw std::invalid_argument(who + ": max_delay must be > 0");
    for (std::size_t k = 0; k < t.participants.size(); ++k) {
      const Participant& p = t.participants[k];
      if (!(p.cpu_capacity > 0.0)) throw std::invalid_argument(who + ": cpu_capacity must be > 0");
      if (p.proc_power < 0.0 || p.unit_price < 0.0 || p.channel_gain < 0.0 || p.noise < 0.0 ||
          t.tx_power[k] < 0.0)
        throw std::invalid_argument(who + ": negative participant parameter");
      auto [it, fresh] = capacity.emplace(p.id, p.cpu_capacity);
      if (!fresh && it->second != p.cpu_capacity)
        throw std::invalid_argument("participant " + std::to_string(p.id) +
                                    " has inconsistent cpu_capacity");
    }
  }
}

inline double data_rate(double tx_power, double gain, double noise) {
  if (!(noise > 0.0)) throw std::domain_error("data_rate: noise must be > 0");
  return std::log2(1.0 + tx_power * gain / noise);
}

inline double rate(const MiningTask& t, std::size_t k) {
  const Participant& p = t.participants[k];
  return data_rate(t.tx_power[k], p.channel_gain, p.noise);
}

using Weights = std::vector<std::vector<double>>;  // f[i][k]

inline void check_weights(const std::vector<MiningTask>& tasks, const Weights& f) {
  bool ok = f.size() == tasks.size();
  for (std::size_t i = 0; ok && i < tasks.size(); ++i) ok = f[i].size() == tasks[i].participants.size();
  if (!ok) throw std::domain_error("offloading weights do not match the tasks");
}

inline double mining_energy(const std::vector<MiningTask>& tasks, const Weights& f) {
  check_weights(tasks, f);
  double e = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const MiningTask& t = tasks[i];
    for (std::size_t k = 0; k < t.participants.size(); ++k) {
      if (f[i][k] == 0.0) continue;
      const double r = rate(t, k);
      if (r <= 0.0) throw std::domain_error("mining_energy: zero data rate with positive weight");
      const Participant& p = t.participants[k];
      e += t.tx_power[k] * f[i][k] * t.size_bits / r +
           p.proc_power * f[i][k] * t.demand() / p.cpu_capacity;
    }
  }
  return e;
}

inline double offloading_cost(const std::vector<MiningTask>& tasks, const Weights& f) {
  check_weights(tasks, f);
  double c = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    for (std::size_t k = 0; k < tasks[i].participants.size(); ++k)
      c += tasks[i].participants[k].unit_price * f[i][k] * tasks[i].demand();
  return c;
}

inline double orphan_probability(const RewardParams& rp) {
  return -std::expm1(-rp.lambda * rp.z * rp.n_trans);
}

inline double reward(const MiningTask& task, const std::vector<MiningTask>& all_tasks,
                     const RewardParams& rp) {
  if (all_tasks.empty()) throw std::domain_error("reward: no tasks");
  double total = 0.0;
  for (const MiningTask& t : all_tasks) total += t.demand();
  if (!(total > 0.0)) throw std::domain_error("reward: total demand must be > 0");
  return task.demand() / total * rp.cap() * std::exp(-rp.lambda * rp.z * rp.n_trans);
}

struct OffloadSolution {
  lp::Status status = lp::Status::infeasible;
  Weights f;
  double objective_value = 0.0;
  double energy = 0.0;
  double cost = 0.0;
  std::vector<double> rewards;  // per miner

  bool ok() const { return status == lp::Status::optimal; }
};

inline double mo_objective(const std::vector<MiningTask>& tasks, const Weights& f, double gamma,
                           const RewardParams& rp) {
  double rewards = 0.0;
  for (const MiningTask& t : tasks) rewards += reward(t, tasks, rp);
  return gamma * mining_energy(tasks, f) + (1.0 - gamma) * (offloading_cost(tasks, f) - rewards);
}

// Largest violation of the simplex, capacity, delay and sign constraints.
inline double mo_max_violation(const std::vector<MiningTask>& tasks, const Weights& f) {
  check_weights(tasks, f);
  double worst = 0.0;
  std::map<int, std::pair<double, double>> load;  // id -> (used, capacity)
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const MiningTask& t = tasks[i];
    double sum = 0.0;
    for (std::size_t k = 0; k < t.participants.size(); ++k) {
      const Participant& p = t.participants[k];
      const double v = f[i][k];
      sum += v;
      worst = std::max(worst, -v);
      auto& slot = load.try_emplace(p.id, 0.0, p.cpu_capacity).first->second;
      slot.first += v * t.demand();
      if (v > 0.0) {
        const double r = rate(t, k);
        const double delay = r > 0.0 ? v * t.size_bits / r + v * t.demand() / p.cpu_capacity
                                     : std::numeric_limits<double>::infinity();
        worst = std::max(worst, delay - t.max_delay);
      }
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  for (const auto& [id, slot] : load) worst = std::max(worst, slot.first - slot.second);
  return worst;
}

inline OffloadSolution mo_solve(const std::vector<MiningTask>& tasks, double gamma,
                                const RewardParams& rp) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
  rp.validate();
  validate(tasks);

  lp::Problem p;
  std::vector<std::vector<std::size_t>> var(tasks.size());
  std::map<int, std::vector<lp::Term>> capacity_rows;
  std::map<int, double> capacity;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const MiningTask& t = tasks[i];
    std::vector<lp::Term> simplex;
    for (std::size_t k = 0; k < t.participants.size(); ++k) {
      const Participant& q = t.participants[k];
      const double r = rate(t, k);
      const double proc_time = t.demand() / q.cpu_capacity;
      if (r <= 0.0) {
        var[i].push_back(p.add_variable(0.0, 0.0, 0.0));  // unreachable participant
      } else {
        const double tx_time = t.size_bits / r;
        const double c = gamma * (t.tx_power[k] * tx_time + q.proc_power * proc_time) +
                         (1.0 - gamma) * q.unit_price * t.demand();
        var[i].push_back(p.add_variable(c));
        p.add_constraint({{var[i][k], tx_time + proc_time}}, lp::Relation::less_equal, t.max_delay,
                         "delay");
      }
      simplex.push_back({var[i][k], 1.0});
      capacity_rows[q.id].push_back({var[i][k], t.demand()});
      capacity[q.id] = q.cpu_capacity;
    }
    p.add_constraint(std::move(simplex), lp::Relation::equal, 1.0, "offload");
  }
  for (auto& [id, row] : capacity_rows)
    p.add_constraint(std::move(row), lp::Relation::less_equal, capacity[id],
                     "capacity" + std::to_string(id));

  OffloadSolution out;
  for (const MiningTask& t : tasks) out.rewards.push_back(reward(t, tasks, rp));
  double reward_total = 0.0;
  for (double r : out.rewards) reward_total += r;
  p.offset = -(1.0 - gamma) * reward_total;

  const lp::Solution s = lp::solve(p);
  out.status = s.status;
  if (!out.ok()) return out;
  out.f.resize(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    for (std::size_t v : var[i]) out.f[i].push_back(std::max(0.0, s.x[v]));
  out.energy = mining_energy(tasks, out.f);
  out.cost = offloading_cost(tasks, out.f);
  out.objective_value = gamma * out.energy + (1.0 - gamma) * (out.cost - reward_total);
  return out;
}

inline void write_offload_csv(const std::vector<MiningTask>& tasks, const OffloadSolution& sol,
                              std::ostream& os) {
  os.precision(17);
  os << "miner,participant,f,energy_share,cost_share\n";
  for (std::size_t i = 0; i < sol.f.size(); ++i) {
    const MiningTask& t = tasks[i];
    for (std::size_t k = 0; k < sol.f[i].size(); ++k) {
      const Participant& p = t.participants[k];
      const double f = sol.f[i][k];
      double energy = p.proc_power * f * t.demand() / p.cpu_capacity;
      if (f > 0.0) energy += t.tx_power[k] * f * t.size_bits / rate(t, k);
      os << t.miner_id << ',' << p.id << ',' << f << ',' << energy << ','
         << p.unit_price * f * t.demand() << '\n';
    }
  }
}

}  // namespace nfvchain::mining
