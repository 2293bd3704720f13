#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "badgesim/dataset.hpp"
#include "badgesim/inference.hpp"
#include "badgesim/knapsack.hpp"
#include "badgesim/value_model.hpp"

namespace badgesim {

// theta / a; nullopt (unattainable) when a = 0 and theta > 0; 0 when theta = 0.
std::optional<double> min_effort(double theta, double ability);

// Badge indicator I(a * effort >= theta), tolerant to the rounding in
// a * (theta / a).
bool wins_badge(double ability, double effort, double theta);

// I(a * effort >= theta) * value - effort.
double utility(double effort, double value, double theta, double ability);

// Sparse nonnegative effort allocation, sorted by badge, zero entries omitted.
struct Strategy {
  std::vector<std::pair<BadgeIndex, double>> efforts;

  double total() const;
  double effort_on(BadgeIndex b) const;
  bool empty() const { return efforts.empty(); }
  bool operator==(const Strategy&) const = default;
};

// Sum of per-badge utilities over the active badges: indicator-weighted values
// minus the total effort spent (effort on inactive badges is still a cost).
// `values`, `thresholds` and `ability` are indexed by badge.
double overall_utility(const Strategy& s, std::span<const double> values,
                       std::span<const double> thresholds, std::span<const double> ability,
                       std::span<const bool> active = {});

struct BestResponseOptions {
  double resolution = 1e-3;
  std::size_t node_limit = 2'000'000;
};

// Utility-maximizing strategy: a subset of attainable badges with positive
// net value (value - minimal effort) that fits in the budget, each funded with
// exactly its minimal effort. Inactive badges are skipped.
Strategy best_response(std::span<const double> values, std::span<const double> ability, double budget,
                       std::span<const double> thresholds, const BestResponseOptions& options = {},
                       std::span<const bool> active = {});

enum class Domination { kStrict, kWeak, kVeryWeak, kNone };

std::string_view to_string(Domination d);

// Relation of strategy s to s' given their utilities against the same list of
// opponent profiles: strict if s is better everywhere, weak if never worse
// and better somewhere, very weak if never worse.
Domination classify_domination(std::span<const double> utility_s, std::span<const double> utility_s_prime);

struct Profile {
  std::vector<Strategy> strategies;               // per user
  std::vector<std::vector<BadgeIndex>> indicators;  // per user: active badges held, ascending
};

enum class ValueRefresh {
  kPerUpdate,  // peer values see every earlier update of the same round
  kPerRound,   // peer values see the state at the start of the round
};

struct DynamicsOptions {
  std::size_t max_rounds = 50;
  std::uint64_t seed = 1;
  ValueRefresh refresh = ValueRefresh::kPerUpdate;
  BestResponseOptions best_response;
};

struct EquilibriumResult {
  Profile profile;
  std::size_t rounds = 0;
  bool converged = false;
  std::vector<std::size_t> changes_per_round;
};

// The user game for one mechanism. Peer leadership is recomputed from the
// neighbors' projected badge indicators. Personal interest and network trend
// depend only on the user's own history, so they are taken from training and
// stay fixed: folding a user's current wins back into the valuation of its
// own next move makes a lone user oscillate between level badges.
class BadgeGame {
 public:
  BadgeGame(const ValueModel& values, const InferredParams& params, Mechanism mechanism);

  std::size_t user_count() const { return n_; }
  std::size_t badge_count() const { return m_; }
  const Mechanism& mechanism() const { return mechanism_; }
  std::span<const double> thresholds() const { return thresholds_; }
  std::span<const bool> active() const { return {active_.get(), m_}; }
  std::span<const double> ability(UserIndex u) const { return abilities_.row(u); }
  double budget(UserIndex u) const { return budgets_[u]; }
  const AbilityMatrix& abilities() const { return abilities_; }

  // Badges won under strategy s (includes every zero-threshold active badge).
  std::vector<BadgeIndex> indicators(UserIndex u, const Strategy& s) const;

  // Comprehensive values of every badge for u given the others' indicators.
  std::vector<double> values(UserIndex u, const std::vector<std::vector<BadgeIndex>>& indicators) const;

  Strategy best_response(UserIndex u, const std::vector<std::vector<BadgeIndex>>& indicators,
                         const BestResponseOptions& options) const;
  double utility(UserIndex u, const Strategy& s,
                 const std::vector<std::vector<BadgeIndex>>& indicators) const;

  // Everyone plays the zero strategy.
  Profile zero_profile() const;

 private:
  std::size_t n_;
  std::size_t m_;
  Mechanism mechanism_;
  std::vector<double> thresholds_;  // per catalogue badge; inactive entries unused
  std::unique_ptr<bool[]> active_;
  std::vector<double> budgets_;
  AbilityMatrix abilities_;
  std::vector<std::vector<UserIndex>> neighbors_;
  std::vector<double> interest_;  // n x m
  std::vector<double> trend_;     // n x m
  PeerLeadershipModel peer_;
  ValueWeights weights_;
};

// Random-order iterated best response from the all-zero profile until a round
// changes no strategy or max_rounds is reached.
EquilibriumResult run_dynamics(const BadgeGame& game, const DynamicsOptions& options);

struct NashReport {
  double max_improvement = 0.0;
  UserIndex worst_user = 0;
  bool passed = false;
};

// Largest utility gain any single user obtains by best-responding to the
// final profile; passes iff it is at most epsilon (plus 1e-9 rounding slack).
NashReport epsilon_nash_check(const BadgeGame& game, const EquilibriumResult& result, double epsilon,
                              const BestResponseOptions& options = {});

// {"converged", "rounds", "changes_per_round", "strategies": {user: {badge: effort}},
//  "indicators": {"holders": {badge: count}, "total": n}}
std::string equilibrium_to_json(const EquilibriumResult& result, const Dataset& catalog);

}  // namespace badgesim
