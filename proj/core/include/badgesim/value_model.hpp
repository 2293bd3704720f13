#pragma once

#include <memory>
#include <span>
#include <vector>

#include "badgesim/dataset.hpp"
#include "badgesim/peer_fit.hpp"
#include "badgesim/sequence_mining.hpp"

namespace badgesim {

// |neighbors of u who achieved b strictly before t| / |neighbors of u|; 0 for
// a user without neighbors.
double peer_ratio(const Dataset& train, UserIndex u, BadgeIndex b, Timestamp t);

// Histogram of peer_ratio at every training achievement over the 11 bins
// (bin k holds ratios that round to k/10), normalized to sum 1.
PeerCurvePoints empirical_ratio_curve(const Dataset& train);

// Jaccard coefficient of the achiever sets of two badges; 0 if both are empty.
double badge_similarity(const Dataset& train, BadgeIndex a, BadgeIndex b);

// Mean similarity of `b` against the badges in `history`; 0 for an empty history.
double personal_interest_value(const Dataset& train, BadgeIndex b,
                               std::span<const BadgeIndex> history);

// Max confidence over rules with consequent `b` whose antecedent is an ordered
// subsequence of `history`; `fallback` when none applies.
double network_trend_value(std::span<const Rule> rules, std::span<const BadgeIndex> history,
                           BadgeIndex b, double fallback = 0.0);

struct ValueWeights {
  double alpha = 1.0 / 3.0;  // personal interest
  double beta = 1.0 / 3.0;   // peer leadership
  // network trend gets 1 - alpha - beta

  void validate() const;  // throws ConfigError
};

double comprehensive_value(const ValueWeights& w, double v_pi, double v_ps, double v_nt);

struct ValueModelConfig {
  PeerFamily family = PeerFamily::kQuadratic;
  ValueWeights weights;
  std::size_t min_support = 0;  // 0 selects default_min_support(users)
  std::size_t max_len = 5;
  bool base_rate_rules = false;
  double trend_fallback = 0.0;
  std::size_t jobs = 1;
};

// The three badge value functions and their combination, all estimated from
// one training split. Immutable after construction.
class ValueModel {
 public:
  // Fits the peer curve, mines rules and indexes achiever sets.
  static ValueModel build(const Dataset& train, const ValueModelConfig& config);

  ValueModel(std::shared_ptr<const Dataset> train, PeerLeadershipModel peer, std::vector<Rule> rules,
             ValueWeights weights, double trend_fallback = 0.0);

  const Dataset& train() const { return *train_; }
  const PeerLeadershipModel& peer_model() const { return peer_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const ValueWeights& weights() const { return weights_; }

  double personal_interest(UserIndex u, BadgeIndex b) const;
  double network_trend(UserIndex u, BadgeIndex b) const;
  double peer_value(double ratio) const { return eval_peer_value(peer_, ratio); }
  // Peer value at the end of training: every training achievement counts.
  double peer_value_end_of_train(UserIndex u, BadgeIndex b) const;
  double comprehensive(double v_pi, double v_ps, double v_nt) const {
    return comprehensive_value(weights_, v_pi, v_ps, v_nt);
  }
  double comprehensive_end_of_train(UserIndex u, BadgeIndex b) const;

  Timestamp end_of_train() const { return end_of_train_; }

 private:
  std::shared_ptr<const Dataset> train_;
  PeerLeadershipModel peer_;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::size_t>> rules_by_consequent_;
  ValueWeights weights_;
  double trend_fallback_;
  Timestamp end_of_train_;
};

}  // namespace badgesim
