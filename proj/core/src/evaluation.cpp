#include "badgesim/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include <json.hpp>

#include "badgesim/error.hpp"
#include "badgesim/game.hpp"
#include "badgesim/rng.hpp"

namespace badgesim {

Dataset filter_rare_badges(const Dataset& d, std::size_t min_achievers) {
  std::vector<bool> keep(d.badge_count());
  for (std::size_t b = 0; b < keep.size(); ++b) {
    keep[b] = d.achievers(static_cast<BadgeIndex>(b)).size() >= min_achievers;
  }
  return d.restrict_badges(keep);
}

double auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) throw DataError("AUC needs positive and negative scores");
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // Twice the positive rank sum, kept integral so the result is exact.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::uint64_t pos = 0;
    while (j < all.size() && all[j].score == all[i].score) pos += all[j++].positive ? 1 : 0;
    // Midrank of 1-based ranks i+1..j is (i+1+j)/2.
    twice_rank_sum += pos * (i + 1 + j);
    i = j;
  }
  const std::uint64_t p = positives.size(), n = negatives.size();
  // U = R - P(P+1)/2 counts wins plus half ties; 2U is an integer.
  const std::uint64_t twice_u = twice_rank_sum - p * (p + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(p) * static_cast<double>(n));
}

ScorerSpec personal_interest_scorer() {
  return {"v_pi", [](const ProtocolContext& ctx) -> PairScorer {
            auto values = ctx.values;
            return [values](UserIndex u, BadgeIndex b) { return values->personal_interest(u, b); };
          }};
}

ScorerSpec peer_leadership_scorer() {
  return {"v_ps", [](const ProtocolContext& ctx) -> PairScorer {
            auto values = ctx.values;
            return [values](UserIndex u, BadgeIndex b) { return values->peer_value_end_of_train(u, b); };
          }};
}

ScorerSpec network_trend_scorer() {
  return {"v_nt", [](const ProtocolContext& ctx) -> PairScorer {
            auto values = ctx.values;
            return [values](UserIndex u, BadgeIndex b) { return values->network_trend(u, b); };
          }};
}

ScorerSpec comprehensive_scorer() {
  return {"v_c", [](const ProtocolContext& ctx) -> PairScorer {
            auto values = ctx.values;
            return [values](UserIndex u, BadgeIndex b) { return values->comprehensive_end_of_train(u, b); };
          }};
}

ScorerSpec utility_scorer() {
  return {"utility", [](const ProtocolContext& ctx) -> PairScorer {
            auto values = ctx.values;
            auto params = ctx.params;
            return [values, params](UserIndex u, BadgeIndex b) {
              auto e = min_effort(params->thresholds.theta[b], params->abilities.at(u, b));
              if (!e) return std::numeric_limits<double>::lowest();
              return values->comprehensive_end_of_train(u, b) - *e;
            };
          }};
}

ScorerSpec random_scorer(std::uint64_t seed) {
  return {"random", [seed](const ProtocolContext& ctx) -> PairScorer {
            const std::uint64_t m = ctx.train->badge_count();
            return [seed, m](UserIndex u, BadgeIndex b) {
              Rng rng(mix_seed(seed, static_cast<std::uint64_t>(u) * m + b));
              return rng.uniform01();
            };
          }};
}

ScorerSpec oracle_scorer() {
  return {"oracle", [](const ProtocolContext& ctx) -> PairScorer {
            auto positives = std::make_shared<std::vector<UserBadge>>(ctx.positives);
            std::sort(positives->begin(), positives->end());
            return [positives](UserIndex u, BadgeIndex b) {
              return std::binary_search(positives->begin(), positives->end(), UserBadge{u, b}) ? 1.0 : 0.0;
            };
          }};
}

std::vector<ScorerSpec> default_scorers() {
  return {personal_interest_scorer(), peer_leadership_scorer(), network_trend_scorer(), comprehensive_scorer(),
          utility_scorer()};
}

namespace {

std::vector<ScoredPair> score_all(const PairScorer& scorer, const std::vector<UserBadge>& pairs, std::size_t jobs) {
  std::vector<ScoredPair> out(pairs.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = {pairs[i], scorer(pairs[i].user, pairs[i].badge)};
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, pairs.size() / 256));
  if (jobs == 1) {
    work(0, pairs.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (pairs.size() + jobs - 1) / jobs;
    for (std::size_t t = 0; t < jobs; ++t) {
      threads.emplace_back(work, std::min(pairs.size(), t * chunk), std::min(pairs.size(), (t + 1) * chunk));
    }
    for (auto& t : threads) t.join();
  }
  for (const auto& sp : out) {
    if (!std::isfinite(sp.score)) {
      throw DataError("scorer produced a non-finite score");
    }
  }
  return out;
}

std::vector<double> scores_of(const std::vector<ScoredPair>& pairs) {
  std::vector<double> s(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) s[i] = pairs[i].score;
  return s;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

EvalReport run_protocol(const Dataset& d, std::span<const ScorerSpec> scorers, const ProtocolConfig& config) {
  Dataset filtered = filter_rare_badges(d, config.min_achievers);
  auto split = temporal_split(filtered, config.train_fraction);

  // Test positives are unique (user, badge) pairs by construction; negatives
  // come from pairs absent from the whole filtered dataset.
  auto negatives = sample_negatives(filtered, split.test_pairs.size(), config.negative_seed);

  ProtocolContext ctx;
  ctx.train = std::make_shared<const Dataset>(std::move(split.train));
  ValueModelConfig vcfg = config.values;
  vcfg.jobs = std::max<std::size_t>(vcfg.jobs, config.jobs);
  ctx.values = std::make_shared<const ValueModel>(ValueModel::build(*ctx.train, vcfg));
  ctx.params = std::make_shared<const InferredParams>(infer_params(*ctx.train, config.inference));
  ctx.positives = split.test_pairs;

  const auto& pos_pairs = config.swap_labels ? negatives : split.test_pairs;
  const auto& neg_pairs = config.swap_labels ? split.test_pairs : negatives;

  EvalReport report;
  report.train_fraction = config.train_fraction;
  report.min_achievers = config.min_achievers;
  report.negative_seed = config.negative_seed;
  report.badges_kept = filtered.badge_count();
  report.positives = pos_pairs.size();
  report.negatives = neg_pairs.size();
  for (const auto& spec : scorers) {
    PairScorer scorer = spec.make(ctx);
    ScorerResult r;
    r.name = spec.name;
    r.pairs.positives = score_all(scorer, pos_pairs, config.jobs);
    r.pairs.negatives = score_all(scorer, neg_pairs, config.jobs);
    r.auc = auc(scores_of(r.pairs.positives), scores_of(r.pairs.negatives));
    report.scorers.push_back(std::move(r));
  }
  return report;
}

std::string report_to_json(const EvalReport& report, const std::string& config_hash) {
  nlohmann::ordered_json j;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  j["train_fraction"] = report.train_fraction;
  j["min_achievers"] = report.min_achievers;
  j["negative_seed"] = report.negative_seed;
  j["badges_kept"] = report.badges_kept;
  j["positives"] = report.positives;
  j["negatives"] = report.negatives;
  auto& rows = j["auc"] = nlohmann::ordered_json::object();
  for (const auto& s : report.scorers) rows[s.name] = s.auc;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "scorer,auc\n";
  for (const auto& s : report.scorers) out += s.name + "," + format_double(s.auc) + "\n";
  return out;
}

}  // namespace badgesim
