#include <gtest/gtest.h>

#include <sstream>

#include "nfvchain/scenario.hpp"
#include "nfvchain/workflow.hpp"
#include "support/fixtures.hpp"

using namespace nfvchain;

namespace {

std::vector<mining::MiningTask> miners(int n, std::uint64_t seed = 1) {
  MiningScenarioParams p;
  p.n_miners = n;
  p.seed = seed;
  return generate_mining_scenario(p);
}

NfvInstance generated(std::uint64_t seed) {
  NfvScenarioParams p;
  p.seed = seed;
  p.n_sfcs = 3;
  return generate_nfv_scenario(p);
}

std::string log_of(const WorkflowReport& rep) {
  std::ostringstream os;
  write_event_log(rep, os);
  return os.str();
}

std::size_t first_event(const WorkflowReport& rep, EventKind kind) {
  for (std::size_t k = 0; k < rep.events.size(); ++k)
    if (rep.events[k].kind == kind) return k;
  throw std::logic_error("no such event");
}

}  // namespace

TEST(Workflow, EmptySfcSetEmitsOnlyInpInformation) {
  NfvInstance inst = generated(1);
  inst.sfcs.clear();
  const WorkflowReport rep = run_workflow(inst, miners(2), WorkflowSolver::hura, {}, 7);
  ASSERT_EQ(rep.events.size(), 1u);
  EXPECT_EQ(rep.events[0].kind, EventKind::inp_information);
  EXPECT_TRUE(rep.block.transactions.empty());
  EXPECT_FALSE(rep.aborted);
}

TEST(Workflow, SingleSfcSingleMiner) {
  NfvInstance inst = fixture::diamond({1000.0, 1000.0});
  inst.sfcs.push_back(fixture::sfc(inst, 4, {100.0}, 10.0, 1.0));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = miners(1);
    const WorkflowReport rep = run_workflow(inst, m, WorkflowSolver::hura, {}, seed);
    ASSERT_FALSE(rep.aborted);
    EXPECT_EQ(rep.winner, m[0].miner_id);
    if (rep.block.orphaned) continue;
    std::size_t payments = 0;
    for (const LedgerEntry& e : rep.ledger)
      if (e.kind == "payment") {
        ++payments;
        EXPECT_NEAR(e.amount, compute_cost(inst, rep.solution), 1e-12);
      }
    EXPECT_EQ(payments, 1u);
  }
}

TEST(Workflow, FixedSeedGivesIdenticalLog) {
  const NfvInstance inst = generated(3);
  const auto m = miners(3);
  const std::string a = log_of(run_workflow(inst, m, WorkflowSolver::hura, {}, 11));
  EXPECT_EQ(a, log_of(run_workflow(inst, m, WorkflowSolver::hura, {}, 11)));
  const std::string b = log_of(run_workflow(inst, m, WorkflowSolver::ara, {}, 11));
  EXPECT_EQ(b, log_of(run_workflow(inst, m, WorkflowSolver::ara, {}, 11)));
}

TEST(Workflow, HonestRunIsAccepted) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NfvInstance inst = generated(seed);
    const WorkflowReport rep = run_workflow(inst, miners(3), WorkflowSolver::hura, {}, seed);
    ASSERT_FALSE(rep.aborted);
    for (const Verdict& v : rep.verdicts) EXPECT_TRUE(v.accept);
    EXPECT_TRUE(verify_block(rep.block, mining::RewardParams{}.cap()).accept);
  }
}

TEST(VerifyTransaction, InflatedCostIsRuleTwo) {
  const NfvInstance inst = generated(2);
  const WorkflowReport rep = run_workflow(inst, miners(1), WorkflowSolver::hura, {}, 1);
  const std::size_t k = first_event(rep, EventKind::run_allocation);
  const auto bad = tamper(rep.events[k], FaultClass::cost, inst, rep.solution);
  ASSERT_TRUE(bad);
  VerificationContext ctx{&inst, &rep.solution, {}, kFeasibilityTolerance};
  const Verdict v = verify_transaction(*bad, ctx);
  EXPECT_FALSE(v.accept);
  EXPECT_EQ(v.rules(), std::set<int>{2});
  EXPECT_NE(v.reasons[0].message.find("cost mismatch"), std::string::npos);
}

TEST(VerifyTransaction, MoveToFullServerListsC3) {
  // Server 1 is filled by user 0; user 1's VNF is then moved onto it.
  NfvInstance inst = fixture::diamond({1000.0, 150.0});
  inst.enforce_distinct_servers = false;
  inst.sfcs.push_back(fixture::sfc(inst, 0, {120.0}, 10.0, 5.0));
  inst.sfcs.push_back(fixture::sfc(inst, 1, {100.0}, 10.0, 5.0));
  inst.sfcs[0].server_unit_price = {1.0, 0.1};
  const WorkflowReport rep = run_workflow(inst, {}, WorkflowSolver::hura, {}, 1);
  ASSERT_EQ(rep.solution.x[0][0][1], 1.0);
  ASSERT_EQ(rep.solution.x[1][0][0], 1.0);
  PlacementSolution moved = rep.solution;
  moved.x[1][0] = {0.0, 1.0};
  ContractEvent ev = rep.events[first_event(rep, EventKind::run_allocation) + 1];
  ASSERT_EQ(ev.payload.at("user_id").get<int>(), 1);
  ev.payload = allocation_payload(inst, moved, 1, "hura");
  VerificationContext ctx{&inst, &rep.solution, {}, kFeasibilityTolerance};
  const Verdict v = verify_transaction(ev, ctx);
  EXPECT_FALSE(v.accept);
  bool c3 = false;
  for (const Reason& r : v.reasons) c3 = c3 || (r.rule == Rule::allocation && r.message.rfind("C3", 0) == 0);
  EXPECT_TRUE(c3);
}

TEST(VerifyTransaction, MalformedPayload) {
  const NfvInstance inst = generated(2);
  PlacementSolution sol = PlacementSolution::zeros(inst);
  VerificationContext ctx{&inst, &sol, {}, kFeasibilityTolerance};
  ContractEvent ev{EventKind::run_allocation, 0, "inp", json{{"nothing", 1}}};
  const Verdict v = verify_transaction(ev, ctx);
  EXPECT_FALSE(v.accept);
  EXPECT_EQ(v.rules(), std::set<int>{0});
}

TEST(VerifyTransaction, EveryFaultClassIsAttributed) {
  const NfvInstance inst = generated(4);
  const WorkflowReport rep = run_workflow(inst, miners(2), WorkflowSolver::hura, {}, 4);
  ASSERT_FALSE(rep.aborted);
  VerificationContext ctx{&inst, &rep.solution, {}, kFeasibilityTolerance};
  for (const ContractEvent& ev : rep.events)
    if (ev.kind == EventKind::run_allocation)
      ctx.announced_cost[ev.payload.at("user_id").get<int>()] = ev.payload.at("announced_cost").get<double>();
  for (FaultClass f : {FaultClass::cost, FaultClass::payment, FaultClass::delay, FaultClass::capacity}) {
    int staged = 0;
    for (const ContractEvent& ev : rep.events) {
      const auto bad = tamper(ev, f, inst, rep.solution);
      if (!bad) continue;
      ++staged;
      const Verdict v = verify_transaction(*bad, ctx);
      EXPECT_FALSE(v.accept) << to_string(f);
      EXPECT_TRUE(v.rules().count(static_cast<int>(expected_rule(f)))) << to_string(f);
    }
    EXPECT_GT(staged, 0) << to_string(f);
  }
}

TEST(VerifyBlock, Rules) {
  Block b;
  b.transactions = {{0, true}, {1, true}};
  b.requested_reward = 12.55;
  EXPECT_TRUE(verify_block(b, 12.55).accept);
  b.requested_reward = 12.55 + 1e-9;
  Verdict v = verify_block(b, 12.55);
  EXPECT_FALSE(v.accept);
  EXPECT_EQ(v.rules(), std::set<int>{1});
  b.requested_reward = 1.0;
  b.transactions.push_back({17, false});
  v = verify_block(b, 12.55);
  EXPECT_FALSE(v.accept);
  EXPECT_NE(v.reasons[0].message.find("17"), std::string::npos);
}

TEST(DrawWinner, DeterministicAndProportional) {
  auto m = miners(2);
  m[0].size_bits = 10.0;
  m[0].cycles_per_bit = 1.0;
  m[1].size_bits = 30.0;
  m[1].cycles_per_bit = 1.0;
  EXPECT_EQ(draw_winner(m, 5), draw_winner(m, 5));
  int second = 0;
  for (std::uint64_t s = 0; s < 4000; ++s) second += draw_winner(m, s) == 1;
  // Expected 3000, sigma about 27.
  EXPECT_NEAR(second, 3000, 110);
}
