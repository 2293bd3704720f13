#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "badgesim/dataset.hpp"

namespace badgesim {

// Dense users x badges matrix of nonnegative abilities. Summed over one badge
// per ability dimension, every row is 1.
class AbilityMatrix {
 public:
  AbilityMatrix() = default;
  AbilityMatrix(std::size_t users, std::size_t badges)
      : users_(users), badges_(badges), cells_(users * badges, 0.0) {}

  std::size_t users() const { return users_; }
  std::size_t badges() const { return badges_; }

  double at(UserIndex u, BadgeIndex b) const { return cells_[u * badges_ + b]; }
  double& at(UserIndex u, BadgeIndex b) { return cells_[u * badges_ + b]; }
  std::span<const double> row(UserIndex u) const { return {cells_.data() + u * badges_, badges_}; }
  std::span<double> row(UserIndex u) { return {cells_.data() + u * badges_, badges_}; }

  bool operator==(const AbilityMatrix&) const = default;

 private:
  std::size_t users_ = 0;
  std::size_t badges_ = 0;
  std::vector<double> cells_;
};

// Min-max normalized badge counts per user; 1.0 for everyone when all counts
// are equal.
std::vector<double> infer_effort_budget(const Dataset& train);

struct AbilityOptions {
  double mix = 0.85;  // weight of the data-driven part
  std::uint64_t seed = 1;
  // Ability lives on badge categories (all levels of a category share one
  // entry) instead of on individual badges.
  bool collapse_levels = true;
};

// Ability dimension of every badge: its category index (first-appearance
// order) when collapsing levels, else the badge itself.
std::vector<std::size_t> ability_groups(const Dataset& train, bool collapse_levels);

// Over the ability dimensions: mix * (L1-normalized achievement counts) +
// (1 - mix) * (L1-normalized uniform[0,1] draws), renormalized; each badge
// then carries the entry of its dimension. Users without events get a uniform
// data-driven part. Row u draws from its own seeded stream.
AbilityMatrix infer_ability(const Dataset& train, const AbilityOptions& options);

enum class ThresholdMode {
  kCountRatio,  // p / q: badges achieved / 1-based position of the badge
  kIndexRatio,  // q / p, in (0, 1]
};

std::string_view to_string(ThresholdMode mode);
std::optional<ThresholdMode> parse_threshold_mode(std::string_view name);

struct ThresholdOptions {
  ThresholdMode mode = ThresholdMode::kIndexRatio;
  double eta_cap = 10.0;
  // Threshold of badges nobody achieved in training (above any a * E <= 1).
  double unachieved_threshold = 10.0;
};

struct ThresholdEstimate {
  std::vector<double> theta;
  std::vector<double> eta;
  std::vector<double> base;  // unscaled mean raw score per badge
};

// Largest eta (capped) with eta * base <= every capacity, and the resulting
// threshold. A zero base yields threshold 0.
struct ThresholdScaling {
  double eta;
  double theta;
};
ThresholdScaling scale_to_feasibility(double base, std::span<const double> capacities, double eta_cap);

// Per-badge threshold: mean raw score over training achievers, scaled so every
// achiever can reach it by spending its whole budget: a_ij * E_i >= theta_j.
ThresholdEstimate estimate_thresholds(const Dataset& train, std::span<const double> budgets,
                                      const AbilityMatrix& abilities, const ThresholdOptions& options);

struct InferredParams {
  std::vector<double> budgets;
  AbilityMatrix abilities;
  ThresholdEstimate thresholds;
};

struct InferenceOptions {
  AbilityOptions ability;
  ThresholdOptions threshold;
};

InferredParams infer_params(const Dataset& train, const InferenceOptions& options);

// {"budgets": {user: E}, "abilities": {user: {badge: a}}, "thresholds": {badge: theta},
//  "eta": {badge: eta}}; ids resolved against `catalog`. Zero abilities are omitted.
std::string params_to_json(const InferredParams& params, const Dataset& catalog);
InferredParams params_from_json(std::string_view text, const Dataset& catalog);

}  // namespace badgesim
