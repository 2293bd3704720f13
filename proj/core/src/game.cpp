#include "badgesim/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "badgesim/error.hpp"
#include "badgesim/rng.hpp"

namespace badgesim {

std::optional<double> min_effort(double theta, double ability) {
  if (theta <= 0.0) return 0.0;
  if (ability <= 0.0) return std::nullopt;
  return theta / ability;
}

bool wins_badge(double ability, double effort, double theta) {
  return ability * effort >= theta - 1e-12 * std::max(1.0, theta);
}

double utility(double effort, double value, double theta, double ability) {
  return (wins_badge(ability, effort, theta) ? value : 0.0) - effort;
}

double Strategy::total() const {
  double s = 0.0;
  for (const auto& [b, e] : efforts) s += e;
  return s;
}

double Strategy::effort_on(BadgeIndex b) const {
  auto it = std::lower_bound(efforts.begin(), efforts.end(), b,
                             [](const auto& entry, BadgeIndex key) { return entry.first < key; });
  return (it != efforts.end() && it->first == b) ? it->second : 0.0;
}

double overall_utility(const Strategy& s, std::span<const double> values,
                       std::span<const double> thresholds, std::span<const double> ability,
                       std::span<const bool> active) {
  double total = 0.0;
  for (std::size_t b = 0; b < values.size(); ++b) {
    if (!active.empty() && !active[b]) continue;
    if (wins_badge(ability[b], s.effort_on(static_cast<BadgeIndex>(b)), thresholds[b])) total += values[b];
  }
  return total - s.total();
}

Strategy best_response(std::span<const double> values, std::span<const double> ability, double budget,
                       std::span<const double> thresholds, const BestResponseOptions& options,
                       std::span<const bool> active) {
  std::vector<KnapsackItem> items;
  std::vector<BadgeIndex> badge_of;
  for (std::size_t b = 0; b < values.size(); ++b) {
    if (!active.empty() && !active[b]) continue;
    auto e = min_effort(thresholds[b], ability[b]);
    if (!e || *e <= 0.0) continue;  // unattainable, or won for free
    items.push_back({values[b], *e});
    badge_of.push_back(static_cast<BadgeIndex>(b));
  }
  KnapsackOptions ko;
  ko.resolution = options.resolution;
  ko.node_limit = options.node_limit;
  auto sol = solve_knapsack(items, budget, ko);

  Strategy s;
  for (std::size_t k : sol.chosen) s.efforts.emplace_back(badge_of[k], items[k].effort);
  std::sort(s.efforts.begin(), s.efforts.end());
  return s;
}

std::string_view to_string(Domination d) {
  switch (d) {
    case Domination::kStrict: return "strict";
    case Domination::kWeak: return "weak";
    case Domination::kVeryWeak: return "very-weak";
    case Domination::kNone: return "none";
  }
  return "none";
}

Domination classify_domination(std::span<const double> utility_s, std::span<const double> utility_s_prime) {
  if (utility_s.size() != utility_s_prime.size() || utility_s.empty()) {
    throw ConfigError("domination needs utilities against the same nonempty set of opponent profiles");
  }
  bool all_greater = true, any_greater = false;
  for (std::size_t k = 0; k < utility_s.size(); ++k) {
    if (utility_s[k] < utility_s_prime[k]) return Domination::kNone;
    if (utility_s[k] > utility_s_prime[k]) {
      any_greater = true;
    } else {
      all_greater = false;
    }
  }
  if (all_greater) return Domination::kStrict;
  return any_greater ? Domination::kWeak : Domination::kVeryWeak;
}

BadgeGame::BadgeGame(const ValueModel& values, const InferredParams& params, Mechanism mechanism)
    : n_(values.train().user_count()),
      m_(values.train().badge_count()),
      mechanism_(std::move(mechanism)),
      thresholds_(m_, 0.0),
      active_(new bool[m_ > 0 ? m_ : 1]()),
      budgets_(params.budgets),
      abilities_(params.abilities),
      neighbors_(n_),
      interest_(n_ * m_, 0.0),
      trend_(n_ * m_, 0.0),
      peer_(values.peer_model()),
      weights_(values.weights()) {
  mechanism_.validate(m_);
  if (budgets_.size() != n_ || abilities_.users() != n_ || abilities_.badges() != m_) {
    throw DataError("inferred parameters do not match the value model's training data");
  }
  for (std::size_t k = 0; k < mechanism_.badges.size(); ++k) {
    active_[mechanism_.badges[k]] = true;
    thresholds_[mechanism_.badges[k]] = mechanism_.thresholds[k];
  }
  const auto& graph = values.train().graph();
  for (std::size_t u = 0; u < n_; ++u) {
    auto nb = graph.neighbors(static_cast<UserIndex>(u));
    neighbors_[u].assign(nb.begin(), nb.end());
    for (BadgeIndex b : mechanism_.badges) {
      interest_[u * m_ + b] = values.personal_interest(static_cast<UserIndex>(u), b);
      trend_[u * m_ + b] = values.network_trend(static_cast<UserIndex>(u), b);
    }
  }
}

std::vector<BadgeIndex> BadgeGame::indicators(UserIndex u, const Strategy& s) const {
  std::vector<BadgeIndex> won;
  auto a = abilities_.row(u);
  for (BadgeIndex b : mechanism_.badges) {
    if (wins_badge(a[b], s.effort_on(b), thresholds_[b])) won.push_back(b);
  }
  return won;
}

std::vector<double> BadgeGame::values(UserIndex u,
                                      const std::vector<std::vector<BadgeIndex>>& indicators) const {
  std::vector<double> holders(m_, 0.0);
  for (UserIndex v : neighbors_[u]) {
    for (BadgeIndex b : indicators[v]) holders[b] += 1.0;
  }
  const double degree = static_cast<double>(neighbors_[u].size());

  std::vector<double> out(m_, 0.0);
  for (BadgeIndex b : mechanism_.badges) {
    double ratio = degree > 0.0 ? holders[b] / degree : 0.0;
    out[b] = comprehensive_value(weights_, interest_[u * m_ + b], eval_peer_value(peer_, ratio),
                                 trend_[u * m_ + b]);
  }
  return out;
}

Strategy BadgeGame::best_response(UserIndex u, const std::vector<std::vector<BadgeIndex>>& indicators,
                                  const BestResponseOptions& options) const {
  auto v = values(u, indicators);
  return badgesim::best_response(v, abilities_.row(u), budgets_[u], thresholds_, options, active());
}

double BadgeGame::utility(UserIndex u, const Strategy& s,
                          const std::vector<std::vector<BadgeIndex>>& indicators) const {
  auto v = values(u, indicators);
  return overall_utility(s, v, thresholds_, abilities_.row(u), active());
}

Profile BadgeGame::zero_profile() const {
  Profile p;
  p.strategies.assign(n_, Strategy{});
  p.indicators.resize(n_);
  for (std::size_t u = 0; u < n_; ++u) p.indicators[u] = indicators(static_cast<UserIndex>(u), Strategy{});
  return p;
}

EquilibriumResult run_dynamics(const BadgeGame& game, const DynamicsOptions& options) {
  EquilibriumResult result;
  result.profile = game.zero_profile();
  auto& profile = result.profile;
  Rng rng(options.seed);

  std::vector<UserIndex> order(game.user_count());
  std::iota(order.begin(), order.end(), UserIndex{0});

  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    rng.shuffle(order);
    // Per-round refresh evaluates everyone against the start-of-round state.
    std::vector<std::vector<BadgeIndex>> snapshot;
    if (options.refresh == ValueRefresh::kPerRound) snapshot = profile.indicators;
    const auto& seen = options.refresh == ValueRefresh::kPerRound ? snapshot : profile.indicators;

    std::size_t changes = 0;
    for (UserIndex u : order) {
      Strategy next = game.best_response(u, seen, options.best_response);
      if (next == profile.strategies[u]) continue;
      ++changes;
      profile.indicators[u] = game.indicators(u, next);
      profile.strategies[u] = std::move(next);
    }
    result.rounds = round;
    result.changes_per_round.push_back(changes);
    if (changes == 0) {
      result.converged = true;
      break;
    }
  }
  return result;
}

NashReport epsilon_nash_check(const BadgeGame& game, const EquilibriumResult& result, double epsilon,
                              const BestResponseOptions& options) {
  NashReport report;
  const auto& profile = result.profile;
  for (std::size_t i = 0; i < game.user_count(); ++i) {
    auto u = static_cast<UserIndex>(i);
    double current = game.utility(u, profile.strategies[u], profile.indicators);
    double best = game.utility(u, game.best_response(u, profile.indicators, options), profile.indicators);
    double gain = best - current;
    if (gain > report.max_improvement) {
      report.max_improvement = gain;
      report.worst_user = u;
    }
  }
  report.passed = report.max_improvement <= epsilon + 1e-9;
  return report;
}

std::string equilibrium_to_json(const EquilibriumResult& result, const Dataset& catalog) {
  nlohmann::ordered_json j;
  j["converged"] = result.converged;
  j["rounds"] = result.rounds;
  j["changes_per_round"] = result.changes_per_round;
  auto& strategies = j["strategies"] = nlohmann::ordered_json::object();
  std::vector<std::size_t> holders(catalog.badge_count(), 0);
  std::size_t total = 0;
  for (std::size_t u = 0; u < result.profile.strategies.size(); ++u) {
    const auto& s = result.profile.strategies[u];
    for (BadgeIndex b : result.profile.indicators[u]) {
      ++holders[b];
      ++total;
    }
    if (s.empty()) continue;
    auto& row = strategies[catalog.user_id(static_cast<UserIndex>(u))] = nlohmann::ordered_json::object();
    for (const auto& [b, e] : s.efforts) row[catalog.badge_id(b)] = e;
  }
  auto& ind = j["indicators"] = nlohmann::ordered_json::object();
  auto& per_badge = ind["holders"] = nlohmann::ordered_json::object();
  for (std::size_t b = 0; b < holders.size(); ++b) {
    if (holders[b] > 0) per_badge[catalog.badge_id(static_cast<BadgeIndex>(b))] = holders[b];
  }
  ind["total"] = total;
  return j.dump();
}

}  // namespace badgesim
