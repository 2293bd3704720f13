#include <gtest/gtest.h>

#include <memory>

#include "badgesim/game.hpp"
#include "badgesim/knapsack.hpp"
#include "badgesim/rng.hpp"
#include "badgesim/synthetic.hpp"
#include "badgesim/evaluation.hpp"
#include "oracles.hpp"

using namespace badgesim;

namespace {

// A game where only peer leadership counts: v = 0.1 + 0.5 * ratio.
struct PeerOnlyGame {
  std::unique_ptr<ValueModel> values;
  InferredParams params;

  PeerOnlyGame(const Dataset& d, std::vector<double> budgets, AbilityMatrix abilities) {
    values = std::make_unique<ValueModel>(std::make_shared<const Dataset>(d),
                                          PeerLeadershipModel{PeerFamily::kLinear, {0.5, 0.1}}, std::vector<Rule>{},
                                          ValueWeights{0.0, 1.0});
    params.budgets = std::move(budgets);
    params.abilities = std::move(abilities);
  }
};

double strategy_net(const std::vector<double>& v, const Strategy& s) {
  double net = 0.0;
  for (auto [b, x] : s.efforts) net += v[b] - x;
  return net;
}

}  // namespace

TEST(MinEffort, Formula) {
  EXPECT_DOUBLE_EQ(*min_effort(0.3, 0.6), 0.5);
  EXPECT_EQ(*min_effort(0.0, 0.7), 0.0);
  EXPECT_EQ(*min_effort(0.0, 0.0), 0.0);
  EXPECT_FALSE(min_effort(0.2, 0.0).has_value());
}

TEST(Utility, Cases) {
  EXPECT_DOUBLE_EQ(utility(0.5, 0.8, 0.3, 0.6), 0.3);
  EXPECT_DOUBLE_EQ(utility(0.5, 0.8, 0.9, 0.6), -0.5);
  EXPECT_EQ(utility(0.0, 0.8, 0.3, 0.6), 0.0);
}

TEST(Utility, ExactThresholdWinsDespiteRounding) {
  double a = 0.7, theta = 0.3;
  EXPECT_TRUE(wins_badge(a, *min_effort(theta, a), theta));
}

TEST(OverallUtility, Cases) {
  std::vector<double> v = {0.5, 0.5, 0.9}, th = {0.2, 0.3, 0.4}, a = {1.0, 1.0, 0.0};
  EXPECT_EQ(overall_utility({}, v, th, a), 0.0);
  Strategy two{{{0, 0.2}, {1, 0.3}}};
  EXPECT_NEAR(overall_utility(two, v, th, a), 0.5, 1e-15);
  Strategy wasted{{{0, 0.2}, {1, 0.3}, {2, 0.1}}};
  EXPECT_LT(overall_utility(wasted, v, th, a), overall_utility(two, v, th, a));
}

TEST(BestResponse, ZeroBudgetIsEmpty) {
  std::vector<double> v = {0.9}, a = {1.0}, th = {0.1};
  EXPECT_TRUE(best_response(v, a, 0.0, th).empty());
}

TEST(BestResponse, SingleBadge) {
  std::vector<double> v = {0.5}, a = {1.0}, th = {0.2};
  auto s = best_response(v, a, 1.0, th);
  ASSERT_EQ(s.efforts.size(), 1u);
  EXPECT_DOUBLE_EQ(s.efforts[0].second, 0.2);
  EXPECT_NEAR(overall_utility(s, v, th, a), 0.3, 1e-15);
}

TEST(BestResponse, MatchesSubsetOracle) {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 10;
    std::vector<double> v(m), a(m, 1.0), th(m), e(m);
    for (std::size_t j = 0; j < m; ++j) {
      v[j] = rng.uniform01() * 0.5;
      th[j] = e[j] = rng.uniform01() * 0.4;
    }
    auto s = best_response(v, a, 0.7, th);
    auto best = oracle::knapsack(v, e, 0.7);
    EXPECT_GE(overall_utility(s, v, th, a), best.net - 1e-3 * m);
    EXPECT_LE(s.total(), 0.7 + 1e-12);
    EXPECT_NEAR(overall_utility(s, v, th, a), strategy_net(v, s), 1e-12);
  }
}

TEST(BestResponse, NeverFundsALostBadge) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 12;
    std::vector<double> v(m), a(m), th(m);
    for (std::size_t j = 0; j < m; ++j) {
      v[j] = rng.uniform01();
      a[j] = rng.bernoulli(0.2) ? 0.0 : rng.uniform01();
      th[j] = rng.uniform01() * 0.3;
    }
    for (auto [b, x] : best_response(v, a, 0.8, th).efforts) EXPECT_TRUE(wins_badge(a[b], x, th[b]));
  }
}

TEST(BestResponse, InactiveBadgesAreSkipped) {
  std::vector<double> v = {0.9, 0.9}, a = {1.0, 1.0}, th = {0.1, 0.1};
  bool active[] = {false, true};
  auto s = best_response(v, a, 1.0, th, {}, std::span<const bool>(active, 2));
  ASSERT_EQ(s.efforts.size(), 1u);
  EXPECT_EQ(s.efforts[0].first, 1u);
}

TEST(Knapsack, ExactBeatsDpAlone) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    std::vector<KnapsackItem> items(12);
    std::vector<double> v, e;
    for (auto& it : items) {
      it.value = rng.uniform01();
      it.effort = rng.uniform01() * 0.5;
      v.push_back(it.value);
      e.push_back(it.effort);
    }
    auto exact = solve_knapsack(items, 1.0);
    auto dp = solve_knapsack_dp(items, 1.0, 1e-3);
    EXPECT_TRUE(exact.exact);
    EXPECT_NEAR(exact.net, oracle::knapsack(v, e, 1.0).net, 1e-12);
    EXPECT_GE(exact.net, dp.net - 1e-12);
    EXPECT_LE(dp.effort, 1.0 + 1e-12);
  }
}

TEST(Domination, Classes) {
  std::vector<double> s = {2, 3}, worse = {1, 2}, mixed = {1, 4};
  EXPECT_EQ(classify_domination(s, worse), Domination::kStrict);
  std::vector<double> tie_then_better = {2, 2};
  EXPECT_EQ(classify_domination(s, tie_then_better), Domination::kWeak);
  EXPECT_EQ(classify_domination(s, s), Domination::kVeryWeak);
  EXPECT_EQ(classify_domination(s, mixed), Domination::kNone);
}

TEST(Dynamics, SingleUserPlaysStandaloneKnapsack) {
  Dataset d = oracle::make_dataset({}, {}, {"solo"}, {{"x", "", "x", 1, std::nullopt}, {"y", "", "y", 1, std::nullopt}});
  AbilityMatrix a(1, 2);
  a.at(0, 0) = 0.5;
  a.at(0, 1) = 0.5;
  PeerOnlyGame g(d, {1.0}, a);
  BadgeGame game(*g.values, g.params, Mechanism{{0, 1}, {0.02, 0.2}});
  auto eq = run_dynamics(game, {});
  EXPECT_TRUE(eq.converged);
  EXPECT_LE(eq.rounds, 2u);
  auto& s = eq.profile.strategies[0];
  ASSERT_EQ(s.efforts.size(), 1u);
  EXPECT_EQ(s.efforts[0].first, 0u);
  EXPECT_DOUBLE_EQ(s.efforts[0].second, 0.04);
  EXPECT_EQ(epsilon_nash_check(game, eq, 0.0).max_improvement, 0.0);
}

// A is cheap to convince; B only adopts once A holds the badge.
TEST(Dynamics, FriendAdoptionFlipsPeer) {
  Dataset d = oracle::make_dataset({}, {{"A", "B"}}, {"A", "B"}, {{"x", "", "x", 1, std::nullopt}});
  AbilityMatrix a(2, 1);
  a.at(d.user_index("A"), 0) = 1.0;
  a.at(d.user_index("B"), 0) = 0.1;
  PeerOnlyGame g(d, {1.0, 1.0}, a);
  BadgeGame game(*g.values, g.params, Mechanism{{0}, {0.05}});

  std::vector<std::vector<BadgeIndex>> none(2);
  EXPECT_TRUE(game.best_response(d.user_index("B"), none, {}).empty());

  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    DynamicsOptions o;
    o.seed = seed;
    auto eq = run_dynamics(game, o);
    EXPECT_TRUE(eq.converged);
    EXPECT_LE(eq.rounds, 3u);
    for (UserIndex u = 0; u < 2; ++u) EXPECT_EQ(eq.profile.indicators[u], std::vector<BadgeIndex>{0});
    EXPECT_NEAR(eq.profile.strategies[d.user_index("B")].effort_on(0), 0.5, 1e-12);
    EXPECT_EQ(eq.changes_per_round.back(), 0u);
  }
}

TEST(Dynamics, NothingWorthItStaysZero) {
  Dataset d = oracle::make_dataset({}, {{"A", "B"}}, {"A", "B"}, {{"x", "", "x", 1, std::nullopt}});
  AbilityMatrix a(2, 1);
  a.at(0, 0) = 0.5;
  a.at(1, 0) = 0.5;
  PeerOnlyGame g(d, {1.0, 1.0}, a);
  BadgeGame game(*g.values, g.params, Mechanism{{0}, {0.5}});
  auto eq = run_dynamics(game, {});
  EXPECT_TRUE(eq.converged);
  EXPECT_EQ(eq.rounds, 1u);
  for (const auto& s : eq.profile.strategies) EXPECT_TRUE(s.empty());
}

TEST(Dynamics, ZeroThresholdBadgesAreHeldForFree) {
  Dataset d = oracle::make_dataset({}, {}, {"u"}, {{"x", "", "x", 1, std::nullopt}});
  AbilityMatrix a(1, 1);
  a.at(0, 0) = 1.0;
  PeerOnlyGame g(d, {1.0}, a);
  BadgeGame game(*g.values, g.params, Mechanism{{0}, {0.0}});
  auto eq = run_dynamics(game, {});
  EXPECT_TRUE(eq.profile.strategies[0].empty());
  EXPECT_EQ(eq.profile.indicators[0], std::vector<BadgeIndex>{0});
}

class SyntheticGame : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticConfig c;
    c.n_users = 150;
    c.n_badges = 40;
    c.seed = 6;
    data = filter_rare_badges(generate_synthetic(c), 5);
    values = std::make_unique<ValueModel>(ValueModel::build(data, {}));
    params = infer_params(data, {});
  }

  Dataset data;
  std::unique_ptr<ValueModel> values;
  InferredParams params;
};

TEST_F(SyntheticGame, DeterministicAndBudgeted) {
  BadgeGame game(*values, params, Mechanism::uniform(data.badge_count(), 0.1));
  auto a = run_dynamics(game, {});
  auto b = run_dynamics(game, {});
  EXPECT_EQ(a.profile.strategies, b.profile.strategies);
  EXPECT_EQ(a.rounds, b.rounds);
  for (UserIndex u = 0; u < game.user_count(); ++u) {
    EXPECT_LE(a.profile.strategies[u].total(), game.budget(u) + 1e-12);
  }
}

TEST_F(SyntheticGame, ConvergedRunIsEpsilonNash) {
  BadgeGame game(*values, params, Mechanism::uniform(data.badge_count(), 0.1));
  for (auto refresh : {ValueRefresh::kPerUpdate, ValueRefresh::kPerRound}) {
    DynamicsOptions o;
    o.refresh = refresh;
    auto eq = run_dynamics(game, o);
    ASSERT_TRUE(eq.converged);
    EXPECT_TRUE(epsilon_nash_check(game, eq, 1e-3 * static_cast<double>(game.badge_count())).passed);
  }
}

TEST_F(SyntheticGame, PerturbationIsDetected) {
  BadgeGame game(*values, params, Mechanism::uniform(data.badge_count(), 0.1));
  auto eq = run_dynamics(game, {});
  // Drop everyone's strategy; users who were playing now gain by deviating.
  std::size_t players = 0;
  for (auto& s : eq.profile.strategies) {
    players += !s.empty();
    s = {};
  }
  ASSERT_GT(players, 0u);
  for (UserIndex u = 0; u < game.user_count(); ++u) eq.profile.indicators[u] = game.indicators(u, {});
  EXPECT_GT(epsilon_nash_check(game, eq, 0.0).max_improvement, 0.0);
}

TEST_F(SyntheticGame, JsonDump) {
  BadgeGame game(*values, params, Mechanism::uniform(data.badge_count(), 0.1));
  auto eq = run_dynamics(game, {});
  std::string j = equilibrium_to_json(eq, data);
  EXPECT_NE(j.find("\"converged\""), std::string::npos);
  EXPECT_NE(j.find("\"strategies\""), std::string::npos);
  EXPECT_EQ(j, equilibrium_to_json(run_dynamics(game, {}), data));
}
