#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "badgesim/dataset.hpp"
#include "badgesim/inference.hpp"
#include "badgesim/value_model.hpp"

namespace badgesim {

// Keeps badges achieved by at least `min_achievers` users.
Dataset filter_rare_badges(const Dataset& d, std::size_t min_achievers);

// Probability that a random positive outscores a random negative, ties 0.5.
// Rank-sum with midranks; throws DataError when either side is empty.
double auc(std::span<const double> positives, std::span<const double> negatives);

struct ScoredPair {
  UserBadge pair;
  double score = 0.0;
};

struct ScoredPairs {
  std::vector<ScoredPair> positives;
  std::vector<ScoredPair> negatives;
};

// Everything a scorer may look at: the training split and what was fitted on it.
struct ProtocolContext {
  std::shared_ptr<const Dataset> train;
  std::shared_ptr<const ValueModel> values;
  std::shared_ptr<const InferredParams> params;
  std::vector<UserBadge> positives;  // visible only to the oracle scorer
};

using PairScorer = std::function<double(UserIndex, BadgeIndex)>;

struct ScorerSpec {
  std::string name;
  std::function<PairScorer(const ProtocolContext&)> make;
};

ScorerSpec personal_interest_scorer();
ScorerSpec peer_leadership_scorer();
ScorerSpec network_trend_scorer();
ScorerSpec comprehensive_scorer();
// v_c - theta / a under the inferred parameters; unattainable badges score lowest.
ScorerSpec utility_scorer();
ScorerSpec random_scorer(std::uint64_t seed);
// 1 on test positives, 0 elsewhere.
ScorerSpec oracle_scorer();

// v_pi, v_ps, v_nt, v_c, utility.
std::vector<ScorerSpec> default_scorers();

struct ProtocolConfig {
  double train_fraction = 0.9;
  std::size_t min_achievers = 100;
  std::uint64_t negative_seed = 1;
  ValueModelConfig values;
  InferenceOptions inference;
  bool swap_labels = false;  // score negatives as positives and vice versa
  std::size_t jobs = 1;
};

struct ScorerResult {
  std::string name;
  double auc = 0.0;
  ScoredPairs pairs;
};

struct EvalReport {
  double train_fraction = 0.0;
  std::size_t min_achievers = 0;
  std::uint64_t negative_seed = 0;
  std::size_t badges_kept = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<ScorerResult> scorers;
};

// filter -> temporal split -> as many negatives as test positives -> score
// both sets with every scorer -> AUC per scorer.
EvalReport run_protocol(const Dataset& d, std::span<const ScorerSpec> scorers, const ProtocolConfig& config);

std::string report_to_json(const EvalReport& report, const std::string& config_hash = {});
std::string report_to_csv(const EvalReport& report);

}  // namespace badgesim
