#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mpbandits/simulator.hpp"

using namespace mpbandits;

namespace {

SimulationConfig base(const std::string& policy, Round horizon = 300, int reps = 6) {
  SimulationConfig c;
  c.means = {0.1, 0.3, 0.5, 0.7, 0.9};
  c.num_players = 3;
  c.horizon = horizon;
  c.policy = parse_policy(policy);
  c.repetitions = reps;
  c.master_seed = 123;
  return c;
}

}  // namespace

TEST(Checkpoints, EveryRoundUpToTenThousand) {
  SimulationConfig c = base("mctopm", 10000);
  const auto s = checkpoint_schedule(c);
  ASSERT_EQ(s.size(), 10000U);
  EXPECT_EQ(s.front(), 1);
  EXPECT_EQ(s.back(), 10000);
}

TEST(Checkpoints, GeometricAboveTenThousand) {
  SimulationConfig c = base("mctopm", 123456);
  const auto s = checkpoint_schedule(c);
  EXPECT_LT(s.size(), 200U);
  EXPECT_EQ(s.back(), 123456);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::set<Round>(s.begin(), s.end()).size(), s.size());
  c.checkpoints = CheckpointMode::kGeometric;
  c.horizon = 50;
  EXPECT_EQ(checkpoint_schedule(c).back(), 50);
}

TEST(Config, Validation) {
  SimulationConfig c = base("mctopm");
  c.num_players = 6;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = base("mctopm");
  c.observation_model = ObservationModel::kNoSensing;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.policy = parse_policy("selfish");
  EXPECT_NO_THROW(c.validate());
  c.means = {0.1, 0.5, 0.5, 0.9};
  c.num_players = 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Episode, Deterministic) {
  for (const char* tag : {"rhorand", "randtopm", "mctopm", "selfish", "centralized", "musical-chairs"}) {
    SimulationConfig c = base(tag);
    c.policy.musical_chairs_t0 = 50;
    EXPECT_EQ(run_episode(c, 2), run_episode(c, 2)) << tag;
    EXPECT_NE(run_episode(c, 2).counters, run_episode(c, 3).counters) << tag;
  }
}

TEST(Episode, CountersAreConsistent) {
  for (const char* tag : {"rhorand", "randtopm", "mctopm", "selfish", "centralized"}) {
    SimulationConfig c = base(tag);
    const EpisodeTrace trace = run_episode(c, 0);
    EXPECT_EQ(trace.counters.total_draws(), c.num_players * c.horizon) << tag;
    const double regret = pseudo_regret(trace.counters, trace.instance, c.num_players);
    EXPECT_NEAR(trace.counters.cumulative_pseudo_regret.back(), regret, 1e-9) << tag;
    EXPECT_EQ(trace.counters.cumulative_collisions.back(), trace.counters.total_collisions()) << tag;
  }
}

TEST(Episode, ObserverSeesEveryRound) {
  SimulationConfig c = base("mctopm", 40);
  Round calls = 0;
  run_episode(c, 0, [&](Round t, std::span<const PlayerState> players) {
    ++calls;
    EXPECT_EQ(t, calls);
    ASSERT_EQ(players.size(), 3U);
    std::int64_t pulls = 0;
    for (const auto& s : players[0].stats) pulls += s.pulls;
    EXPECT_EQ(pulls, t);
  });
  EXPECT_EQ(calls, 40);
}

TEST(Episode, CentralizedAndSinglePlayerNeverCollide) {
  EXPECT_EQ(run_episode(base("centralized"), 0).counters.total_collisions(), 0);
  SimulationConfig single = base("mctopm");
  single.num_players = 1;
  EXPECT_EQ(run_episode(single, 0).counters.total_collisions(), 0);
}

TEST(Episode, EveryModelRuns) {
  for (auto model : {ObservationModel::kSensingAndCollision, ObservationModel::kSensingThenCollision,
                     ObservationModel::kNoSensing}) {
    SimulationConfig c = base(model == ObservationModel::kNoSensing ? "selfish" : "mctopm");
    c.observation_model = model;
    const EpisodeTrace trace = run_episode(c, 1);
    EXPECT_EQ(trace.counters.total_draws(), c.num_players * c.horizon);
  }
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  for (const char* tag : {"mctopm", "selfish-ucb", "centralized"}) {
    SimulationConfig c = base(tag, 200, 9);
    EXPECT_EQ(run_monte_carlo(c, 1), run_monte_carlo(c, 4)) << tag;
  }
}

TEST(MonteCarlo, SummaryMatchesRecords) {
  SimulationConfig c = base("randtopm", 200, 8);
  const MonteCarloSummary s = run_monte_carlo(c, 2);
  ASSERT_EQ(s.reps.size(), 8U);
  double mean = 0.0;
  for (const auto& r : s.reps) mean += r.pseudo_regret;
  mean /= 8;
  EXPECT_NEAR(s.mean_final_regret, mean, 1e-9);
  EXPECT_NEAR(s.mean_regret.back(), mean, 1e-9);
  EXPECT_EQ(s.generator, "xoshiro256**");
  EXPECT_NEAR(s.mean_lb_ours, lower_bound_ours(BanditInstance(c.means), 3), 1e-12);
}

TEST(MonteCarlo, UniformInstancesAreReproducibleAndValid) {
  SimulationConfig c = base("mctopm", 50, 5);
  c.means.clear();
  c.uniform_random_instance = true;
  c.uniform_num_arms = 6;
  std::set<std::vector<double>> seen;
  for (int rep = 0; rep < 5; ++rep) {
    const BanditInstance a = repetition_instance(c, rep);
    EXPECT_EQ(a.means(), repetition_instance(c, rep).means());
    EXPECT_TRUE(a.in_p_m(3));
    for (double mu : a.means()) {
      EXPECT_GE(mu, 0.0);
      EXPECT_LE(mu, 1.0);
    }
    seen.insert(a.means());
  }
  EXPECT_EQ(seen.size(), 5U);
  EXPECT_NO_THROW(run_monte_carlo(c, 2));
}

TEST(MonteCarlo, ComparePoliciesShareInstanceStreams) {
  SimulationConfig a = base("mctopm");
  SimulationConfig b = base("rhorand");
  a.means.clear();
  b.means.clear();
  a.uniform_random_instance = b.uniform_random_instance = true;
  a.uniform_num_arms = b.uniform_num_arms = 5;
  EXPECT_EQ(repetition_instance(a, 3).means(), repetition_instance(b, 3).means());
}
