#include "badgesim/value_model.hpp"

#include <algorithm>
#include <cmath>

#include "badgesim/error.hpp"

namespace badgesim {

double peer_ratio(const Dataset& train, UserIndex u, BadgeIndex b, Timestamp t) {
  auto nb = train.graph().neighbors(u);
  if (nb.empty()) return 0.0;
  std::size_t prior = 0;
  for (UserIndex v : nb) {
    auto ts = train.achieved_at(v, b);
    if (ts && *ts < t) ++prior;
  }
  return static_cast<double>(prior) / static_cast<double>(nb.size());
}

PeerCurvePoints empirical_ratio_curve(const Dataset& train) {
  if (train.empty()) throw DataError("peer curve needs at least one training event");
  std::array<double, kPeerBins> counts{};
  for (const auto& e : train.events()) {
    double r = peer_ratio(train, e.user, e.badge, e.ts);
    auto bin = static_cast<std::size_t>(std::lround(r * 10.0));
    counts[std::min(bin, kPeerBins - 1)] += 1.0;
  }
  const double total = static_cast<double>(train.event_count());
  for (auto& c : counts) c /= total;
  return PeerCurvePoints::from_y(counts);
}

double badge_similarity(const Dataset& train, BadgeIndex a, BadgeIndex b) {
  auto sa = train.achievers(a);
  auto sb = train.achievers(b);
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  auto i = sa.begin();
  auto j = sb.begin();
  while (i != sa.end() && j != sb.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double personal_interest_value(const Dataset& train, BadgeIndex b,
                               std::span<const BadgeIndex> history) {
  if (history.empty()) return 0.0;
  double s = 0.0;
  for (BadgeIndex k : history) s += badge_similarity(train, b, k);
  return s / static_cast<double>(history.size());
}

double network_trend_value(std::span<const Rule> rules, std::span<const BadgeIndex> history,
                           BadgeIndex b, double fallback) {
  bool any = false;
  double best = 0.0;
  for (const auto& r : rules) {
    if (r.consequent != b || !is_subsequence(r.antecedent, history)) continue;
    best = any ? std::max(best, r.confidence) : r.confidence;
    any = true;
  }
  return any ? best : fallback;
}

void ValueWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || alpha + beta > 1.0 + 1e-12) {
    throw ConfigError("value weights need alpha, beta >= 0 and alpha + beta <= 1");
  }
}

double comprehensive_value(const ValueWeights& w, double v_pi, double v_ps, double v_nt) {
  return w.alpha * v_pi + w.beta * v_ps + (1.0 - w.alpha - w.beta) * v_nt;
}

ValueModel ValueModel::build(const Dataset& train, const ValueModelConfig& config) {
  config.weights.validate();
  auto shared = std::make_shared<const Dataset>(train);
  auto fit = fit_peer_function(empirical_ratio_curve(train), config.family);

  auto sequences = build_sequences(train);
  std::size_t min_support =
      config.min_support > 0 ? config.min_support : default_min_support(train.user_count());
  auto patterns = prefixspan(sequences, min_support, config.max_len, config.jobs);
  RuleOptions ro;
  ro.base_rate_rules = config.base_rate_rules;
  ro.sequence_count = sequences.size();
  auto rules = generate_rules(patterns, ro);

  return ValueModel(std::move(shared), std::move(fit.model), std::move(rules), config.weights,
                    config.trend_fallback);
}

ValueModel::ValueModel(std::shared_ptr<const Dataset> train, PeerLeadershipModel peer,
                       std::vector<Rule> rules, ValueWeights weights, double trend_fallback)
    : train_(std::move(train)),
      peer_(std::move(peer)),
      rules_(std::move(rules)),
      rules_by_consequent_(train_->badge_count()),
      weights_(weights),
      trend_fallback_(trend_fallback) {
  weights_.validate();
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].consequent >= rules_by_consequent_.size()) {
      throw DataError("rule consequent outside the badge catalogue");
    }
    rules_by_consequent_[rules_[i].consequent].push_back(i);
  }
  end_of_train_ = train_->empty() ? 0 : train_->events().back().ts + 1;
}

double ValueModel::personal_interest(UserIndex u, BadgeIndex b) const {
  return personal_interest_value(*train_, b, train_->history(u));
}

double ValueModel::network_trend(UserIndex u, BadgeIndex b) const {
  auto history = train_->history(u);
  bool any = false;
  double best = 0.0;
  for (std::size_t i : rules_by_consequent_[b]) {
    const auto& r = rules_[i];
    if (any && r.confidence <= best) continue;
    if (!is_subsequence(r.antecedent, history)) continue;
    best = r.confidence;
    any = true;
  }
  return any ? best : trend_fallback_;
}

double ValueModel::peer_value_end_of_train(UserIndex u, BadgeIndex b) const {
  return peer_value(peer_ratio(*train_, u, b, end_of_train_));
}

double ValueModel::comprehensive_end_of_train(UserIndex u, BadgeIndex b) const {
  return comprehensive(personal_interest(u, b), peer_value_end_of_train(u, b),
                       network_trend(u, b));
}

}  // namespace badgesim
