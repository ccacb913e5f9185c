// nfvchain command-line front end.
//
// Exit codes: 0 success, 1 solver infeasibility, 2 usage or input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nfvchain/ara.hpp"
#include "nfvchain/hura.hpp"
#include "nfvchain/json_io.hpp"
#include "nfvchain/milp_exact.hpp"
#include "nfvchain/mining.hpp"
#include "nfvchain/scenario.hpp"
#include "nfvchain/sweep.hpp"
#include "nfvchain/workflow.hpp"

namespace {

using namespace nfvchain;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to the file at `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct ScenarioFlags {
  NfvScenarioParams nfv;
  MiningScenarioParams mining;
  bool no_c2 = false;

  void add_nfv(CLI::App* app) {
    app->add_option("--n-servers", nfv.n_servers, "Number of servers")->capture_default_str();
    app->add_option("--n-sfcs", nfv.n_sfcs, "Number of SFC requests")->capture_default_str();
    app->add_option("--vnf-min", nfv.vnf_count_min, "Smallest chain length")->capture_default_str();
    app->add_option("--vnf-max", nfv.vnf_count_max, "Largest chain length")->capture_default_str();
    app->add_option("--t-th", nfv.t_th, "Max tolerable delay per SFC [s]")->capture_default_str();
    app->add_option("--demand-scale", nfv.demand_scale, "Multiplier on VNF CPU demand")->capture_default_str();
    app->add_option("--capacity-unit", nfv.capacity_unit, "Server capacity unit [cycles/s]")->capture_default_str();
    app->add_option("--bandwidth-unit", nfv.bandwidth_unit, "Link bandwidth unit [bit/s]")->capture_default_str();
    app->add_option("--link-density", nfv.link_density, "Probability of a link per node pair")->capture_default_str();
    app->add_option("--alpha", nfv.alpha, "Energy weight in the objective")->capture_default_str();
    app->add_flag("--no-c2", no_c2, "Allow several VNFs of one SFC on one server");
  }
  void add_mining(CLI::App* app) {
    app->add_option("--n-miners", mining.n_miners, "Number of miners")->capture_default_str();
    app->add_option("--n-participants", mining.n_participants, "Participants per miner")->capture_default_str();
    app->add_option("--mining-max-delay", mining.max_delay, "Mining deadline [s]")->capture_default_str();
    app->add_option("--gamma", mining.gamma, "Energy weight in the mining objective")->capture_default_str();
  }
  NfvScenarioParams nfv_params(std::uint64_t seed) const {
    NfvScenarioParams p = nfv;
    p.seed = seed;
    p.enforce_distinct_servers = !no_c2;
    return p;
  }
  MiningScenarioParams mining_params(std::uint64_t seed) const {
    MiningScenarioParams p = mining;
    p.seed = seed;
    return p;
  }
};

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("invalid axis value '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--values is empty");
  return out;
}

void print_summary(std::ostream& os, const NfvInstance& inst, const PlacementSolution& sol,
                   const std::string& solver, const std::vector<int>& users) {
  const auto violations = check_feasibility(inst, sol, kFeasibilityTolerance, users);
  os << "solver=" << solver << " objective=" << format_number(objective_f(inst, sol))
     << " energy=" << format_number(compute_energy(inst, sol)) << " cost=" << format_number(compute_cost(inst, sol))
     << " active_servers=" << active_server_count(sol) << " accepted=" << users.size() << '/' << inst.sfcs.size()
     << " feasible=" << (violations.empty() ? "yes" : "no") << '\n';
}

int cmd_generate(const std::string& kind, std::uint64_t seed, const ScenarioFlags& flags, const std::string& out) {
  Output o(out);
  if (kind == "mining") {
    const MiningScenarioParams p = flags.mining_params(seed);
    o.stream() << mining_to_json(generate_mining_scenario(p), p.gamma, p.reward).dump(2) << '\n';
  } else {
    o.stream() << instance_to_json(generate_nfv_scenario(flags.nfv_params(seed))).dump(2) << '\n';
  }
  return 0;
}

struct SolveFlags {
  std::string instance;
  std::string solver = "hura";
  double alpha = -1.0;
  bool no_c2 = false;
  std::string out;
  double timeout_s = 600.0;
  std::string trace;
  std::string node_log;
  std::string decision_log;
};

int cmd_solve(const SolveFlags& f) {
  NfvInstance inst = instance_from_json(read_json(f.instance));
  if (f.alpha >= 0.0) inst.alpha = f.alpha;
  if (f.no_c2) inst.enforce_distinct_servers = false;
  inst.validate();
  const SolverKind solver = parse_solver(f.solver);

  PlacementSolution sol;
  std::vector<int> users;
  bool ok = false;
  if (solver == SolverKind::hura) {
    HuraResult h = hura_solve(inst);
    if (!f.decision_log.empty()) {
      Output o(f.decision_log);
      write_decision_log(h.log, o.stream());
    }
    ok = !h.accepted.empty() || inst.sfcs.empty();
    sol = std::move(h.solution);
    users = h.accepted;
    if (!h.rejected.empty()) std::cerr << "hura rejected " << h.rejected.size() << " SFC(s)\n";
  } else if (solver == SolverKind::ara) {
    AraResult a = ara_solve(inst);
    if (!f.trace.empty()) {
      Output o(f.trace);
      write_trace_csv(a.trace, o.stream());
    }
    ok = a.ok();
    if (!ok) std::cerr << "ara: " << to_string(a.status) << '\n';
    sol = std::move(a.solution);
  } else {
    ExactLimits lim;
    lim.time_cap_s = f.timeout_s;
    std::ofstream log;
    if (!f.node_log.empty()) {
      log.open(f.node_log, std::ios::binary);
      if (!log) throw UsageError("cannot open " + f.node_log);
      log << "node,depth,bound,incumbent\n";
      lim.node_log = &log;
    }
    ExactResult e = solve_exact(inst, lim);
    ok = e.has_solution;
    std::cerr << "exact: " << to_string(e.status) << " after " << e.nodes << " nodes\n";
    sol = std::move(e.solution);
  }
  if (!ok) return 1;
  if (solver != SolverKind::hura)
    for (const SfcRequest& s : inst.sfcs) users.push_back(s.user_id);

  Output o(f.out);
  o.stream() << solution_to_json(inst, sol).dump(2) << '\n';
  print_summary(f.out.empty() || f.out == "-" ? std::cerr : std::cout, inst, sol, f.solver, users);
  return 0;
}

int main_impl(int argc, char** argv) {
  CLI::App app{"Resource allocation for blockchain-enabled NFV: SFC placement solvers, mining offloading and "
               "contract workflow simulation"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  ScenarioFlags scen;

  // generate
  std::string gen_kind = "nfv", gen_out;
  auto* gen = app.add_subcommand("generate", "Generate a scenario as JSON");
  gen->add_option("--kind", gen_kind, "nfv or mining")->check(CLI::IsMember({"nfv", "mining"}))->capture_default_str();
  gen->add_option("--seed", seed, "Scenario seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (default stdout)");
  scen.add_nfv(gen);
  scen.add_mining(gen);

  // solve
  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "Solve an instance JSON");
  solve->add_option("instance", sf.instance, "Instance JSON")->required();
  solve->add_option("--solver", sf.solver, "exact, ara or hura")
      ->check(CLI::IsMember({"exact", "ara", "hura"}))
      ->capture_default_str();
  solve->add_option("--alpha", sf.alpha, "Override the instance's alpha");
  solve->add_flag("--no-c2", sf.no_c2, "Allow several VNFs of one SFC on one server");
  solve->add_option("--out", sf.out, "Solution JSON file (default stdout)");
  solve->add_option("--timeout-s", sf.timeout_s, "Time cap for the exact solver [s]")->capture_default_str();
  solve->add_option("--trace", sf.trace, "ARA iteration trace CSV");
  solve->add_option("--node-log", sf.node_log, "Branch-and-bound node log CSV");
  solve->add_option("--decision-log", sf.decision_log, "HuRA per-SFC decision CSV");

  // sweep
  std::string axis, values_csv, sweep_out, aggregate_out;
  std::vector<std::string> sweep_solvers{"hura"};
  int snapshots = 100;
  double timeout_s = 600.0;
  bool record_runtime = false;
  auto* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter over seeded snapshots");
  std::vector<std::string> all_axes = nfv_axes();
  all_axes.insert(all_axes.end(), mining_axes().begin(), mining_axes().end());
  sweep->add_option("--axis", axis, "Parameter to vary")->required()->check(CLI::IsMember(all_axes));
  sweep->add_option("--values", values_csv, "Comma-separated axis values")->required();
  sweep->add_option("--solver", sweep_solvers, "Solvers to run (repeatable)")
      ->check(CLI::IsMember({"exact", "ara", "hura"}))
      ->capture_default_str();
  sweep->add_option("--snapshots", snapshots, "Snapshots per axis value")->capture_default_str();
  sweep->add_option("--seed", seed, "Seed of the first snapshot")->capture_default_str();
  sweep->add_option("--out", sweep_out, "Per-run CSV (default stdout)");
  sweep->add_option("--aggregate", aggregate_out, "Aggregate CSV (default: next to --out)");
  sweep->add_option("--timeout-s", timeout_s, "Per-solve time cap [s]")->capture_default_str();
  sweep->add_flag("--record-runtime", record_runtime, "Write measured runtimes instead of NA");
  scen.add_nfv(sweep);
  scen.add_mining(sweep);

  // workflow
  std::string wf_instance, wf_solver = "hura", wf_out, wf_ledger;
  auto* wf = app.add_subcommand("workflow", "Simulate the allocation contract and one mined block");
  wf->add_option("--instance", wf_instance, "Instance JSON (default: generated from --seed)");
  wf->add_option("--solver", wf_solver, "ara or hura")->check(CLI::IsMember({"ara", "hura"}))->capture_default_str();
  wf->add_option("--seed", seed, "Scenario and mining seed")->capture_default_str();
  wf->add_option("--out", wf_out, "Event log, JSON lines (default stdout)");
  wf->add_option("--ledger", wf_ledger, "Ledger CSV");
  scen.add_nfv(wf);
  scen.add_mining(wf);

  // mine
  std::string mine_in, mine_out;
  auto* mine = app.add_subcommand("mine", "Solve the mining offloading LP");
  mine->add_option("--scenario", mine_in, "Mining JSON (default: generated from --seed)");
  mine->add_option("--seed", seed, "Scenario seed")->capture_default_str();
  mine->add_option("--out", mine_out, "Offloading CSV (default stdout)");
  scen.add_mining(mine);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (gen->parsed()) return cmd_generate(gen_kind, seed, scen, gen_out);
  if (solve->parsed()) return cmd_solve(sf);

  if (sweep->parsed()) {
    SweepSpec spec;
    spec.axis = axis;
    spec.values = parse_values(values_csv);
    spec.solvers.clear();
    for (const auto& s : sweep_solvers) spec.solvers.push_back(parse_solver(s));
    spec.snapshots = snapshots;
    spec.base_seed = seed;
    spec.nfv = scen.nfv_params(seed);
    spec.mining = scen.mining_params(seed);
    spec.timeout_s = timeout_s;
    spec.record_runtime = record_runtime;
    const auto rows = run_sweep(spec);
    {
      Output o(sweep_out);
      write_sweep_csv(rows, record_runtime, o.stream());
    }
    std::string agg = aggregate_out;
    if (agg.empty() && !sweep_out.empty() && sweep_out != "-") {
      const auto dot = sweep_out.rfind(".csv");
      agg = (dot == std::string::npos ? sweep_out : sweep_out.substr(0, dot)) + "_aggregate.csv";
    }
    if (!agg.empty()) {
      Output o(agg);
      write_aggregate_csv(rows, record_runtime, o.stream());
    }
    return 0;
  }

  if (wf->parsed()) {
    const NfvInstance inst =
        wf_instance.empty() ? generate_nfv_scenario(scen.nfv_params(seed)) : instance_from_json(read_json(wf_instance));
    const MiningScenarioParams mp = scen.mining_params(seed);
    const auto miners = generate_mining_scenario(mp);
    const WorkflowReport rep =
        run_workflow(inst, miners, wf_solver == "ara" ? WorkflowSolver::ara : WorkflowSolver::hura, mp.reward, seed);
    {
      Output o(wf_out);
      write_event_log(rep, o.stream());
    }
    if (!wf_ledger.empty()) {
      Output o(wf_ledger);
      write_ledger_csv(rep, o.stream());
    }
    if (rep.aborted) {
      std::cerr << "workflow aborted: " << rep.diagnostic << '\n';
      return 1;
    }
    return 0;
  }

  if (mine->parsed()) {
    MiningDocument doc;
    if (mine_in.empty()) {
      const MiningScenarioParams p = scen.mining_params(seed);
      doc.tasks = generate_mining_scenario(p);
      doc.gamma = p.gamma;
      doc.reward = p.reward;
    } else {
      doc = mining_from_json(read_json(mine_in));
    }
    const mining::OffloadSolution sol = mining::mo_solve(doc.tasks, doc.gamma, doc.reward);
    if (!sol.ok()) {
      std::cerr << "mining LP: " << lp::to_string(sol.status) << '\n';
      return 1;
    }
    Output o(mine_out);
    mining::write_offload_csv(doc.tasks, sol, o.stream());
    std::cerr << "objective=" << format_number(sol.objective_value) << " energy=" << format_number(sol.energy)
              << " cost=" << format_number(sol.cost) << '\n';
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return main_impl(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
