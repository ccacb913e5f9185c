#include <gtest/gtest.h>

#include "nfvchain/hura.hpp"
#include "nfvchain/json_io.hpp"
#include "nfvchain/scenario.hpp"

using namespace nfvchain;

TEST(JsonIo, InstanceRoundTripIsByteIdentical) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    NfvScenarioParams p;
    p.seed = seed;
    p.alpha = 0.1 + 0.03 * static_cast<double>(seed);
    p.enforce_distinct_servers = seed % 2 == 0;
    const std::string first = instance_to_json(generate_nfv_scenario(p)).dump(2);
    const std::string second = instance_to_json(instance_from_json(json::parse(first))).dump(2);
    ASSERT_EQ(first, second) << "seed " << seed;
  }
}

TEST(JsonIo, MiningRoundTripIsByteIdentical) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    MiningScenarioParams p;
    p.seed = seed;
    const std::string first = mining_to_json(generate_mining_scenario(p), p.gamma, p.reward).dump(2);
    const MiningDocument doc = mining_from_json(json::parse(first));
    ASSERT_EQ(first, mining_to_json(doc.tasks, doc.gamma, doc.reward).dump(2)) << "seed " << seed;
  }
}

TEST(JsonIo, SolutionRoundTrip) {
  NfvScenarioParams p;
  p.seed = 3;
  const NfvInstance inst = generate_nfv_scenario(p);
  const HuraResult h = hura_solve(inst);
  const json j = solution_to_json(inst, h.solution);
  const PlacementSolution back = solution_from_json(inst, json::parse(j.dump()));
  EXPECT_EQ(back.x, h.solution.x);
  EXPECT_EQ(back.y, h.solution.y);
  EXPECT_EQ(back.beta, h.solution.beta);
  EXPECT_EQ(solution_to_json(inst, back).dump(), j.dump());
  EXPECT_DOUBLE_EQ(j.at("metrics").at("objective").get<double>(), h.objective);
}

TEST(JsonIo, SchemaAndFieldErrors) {
  NfvScenarioParams p;
  json j = instance_to_json(generate_nfv_scenario(p));
  json wrong = j;
  wrong["schema"] = "something/else";
  EXPECT_THROW(instance_from_json(wrong), std::invalid_argument);
  json missing = j;
  missing.erase("alpha");
  EXPECT_THROW(instance_from_json(missing), std::invalid_argument);
  json bad_type = j;
  bad_type["sfcs"][0]["max_delay"] = "soon";
  EXPECT_THROW(instance_from_json(bad_type), std::invalid_argument);
  json invalid = j;
  invalid["alpha"] = 2.0;
  EXPECT_THROW(instance_from_json(invalid), std::invalid_argument);
}

TEST(JsonIo, SolutionWithUnknownArcIsRejected) {
  NfvScenarioParams p;
  const NfvInstance inst = generate_nfv_scenario(p);
  json j = solution_to_json(inst, hura_solve(inst).solution);
  ASSERT_FALSE(j["y"].empty());
  j["y"][0]["link"] = 99999;
  EXPECT_THROW(solution_from_json(inst, j), std::invalid_argument);
}
