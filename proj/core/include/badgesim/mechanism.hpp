#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "badgesim/game.hpp"

namespace badgesim {

// c(b | M) = sum over users of a_ub * effort_ub.
double badge_contribution(const Profile& profile, const AbilityMatrix& abilities, BadgeIndex b);

// Per-badge contributions for the whole catalogue.
std::vector<double> badge_contributions(const Profile& profile, const AbilityMatrix& abilities);

// Sum of badge contributions over `subset`; throws ConfigError for a badge
// outside the catalogue.
double set_contribution(const Profile& profile, const AbilityMatrix& abilities,
                        std::span<const BadgeIndex> subset);

struct ContributionReport {
  Mechanism mechanism;
  std::vector<double> per_badge;  // indexed by catalogue badge
  double total = 0.0;
  bool converged = false;
  std::size_t rounds = 0;
};

ContributionReport contribution_report(const BadgeGame& game, const EquilibriumResult& result);

struct RankedBadge {
  BadgeIndex badge = 0;
  double contribution = 0.0;

  bool operator==(const RankedBadge&) const = default;
};

// Badges by contribution, descending, ties by badge id; the first K. The head
// of the list is the dominant badge category.
std::vector<RankedBadge> rank_categories(std::span<const double> contributions, std::size_t k);

struct SweepPoint {
  double param = 0.0;
  double total = 0.0;
  bool converged = true;
  std::size_t rounds = 0;
};

struct SweepCurve {
  std::vector<SweepPoint> points;  // params strictly increasing
};

// Cumulative contribution of the top-K ranked badges for each K (clamped to
// the catalogue size). Ks must be strictly increasing.
SweepCurve sweep_topk(std::span<const double> contributions, std::span<const std::size_t> ks);

// One fresh equilibrium per threshold value, every badge sharing that
// threshold, all with the same dynamics seed. Points run on up to `jobs`
// threads; the curve does not depend on it.
SweepCurve sweep_thresholds(const ValueModel& values, const InferredParams& params,
                            std::span<const double> thetas, const DynamicsOptions& options,
                            std::size_t jobs = 1);

struct MechanismSearch {
  std::size_t winner = 0;  // first candidate with the maximal total
  std::vector<ContributionReport> candidates;
};

// Equilibrium contribution of every candidate mechanism; throws ConfigError
// for an empty grid.
MechanismSearch search_dominant_mechanism(const ValueModel& values, const InferredParams& params,
                                          std::span<const Mechanism> grid, const DynamicsOptions& options,
                                          std::size_t jobs = 1);

// Top-K badges of a base equilibrium. With `re_equilibrate`, the game is
// re-solved on a mechanism holding only those K badges (base thresholds) and
// the returned report describes that equilibrium.
ContributionReport dominant_category_set(const ValueModel& values, const InferredParams& params,
                                         const Mechanism& base, std::size_t k, bool re_equilibrate,
                                         const DynamicsOptions& options);

// Uniform-threshold grid lo, lo + step, ..., hi (inclusive, rounding-safe).
std::vector<double> threshold_grid(double lo, double hi, double step);

std::string sweep_to_csv(const SweepCurve& curve);
std::string ranking_to_csv(std::span<const RankedBadge> ranking, const Dataset& catalog);

}  // namespace badgesim
