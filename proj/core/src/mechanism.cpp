#include "badgesim/mechanism.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>

#include "badgesim/error.hpp"

namespace badgesim {

namespace {

// Runs task(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < jobs; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double badge_contribution(const Profile& profile, const AbilityMatrix& abilities, BadgeIndex b) {
  double c = 0.0;
  for (std::size_t u = 0; u < profile.strategies.size(); ++u) {
    double e = profile.strategies[u].effort_on(b);
    if (e != 0.0) c += abilities.at(static_cast<UserIndex>(u), b) * e;
  }
  return c;
}

std::vector<double> badge_contributions(const Profile& profile, const AbilityMatrix& abilities) {
  std::vector<double> c(abilities.badges(), 0.0);
  for (std::size_t u = 0; u < profile.strategies.size(); ++u) {
    for (const auto& [b, e] : profile.strategies[u].efforts) {
      c[b] += abilities.at(static_cast<UserIndex>(u), b) * e;
    }
  }
  return c;
}

double set_contribution(const Profile& profile, const AbilityMatrix& abilities,
                        std::span<const BadgeIndex> subset) {
  double total = 0.0;
  for (BadgeIndex b : subset) {
    if (b >= abilities.badges()) throw ConfigError("unknown badge in contribution subset");
    total += badge_contribution(profile, abilities, b);
  }
  return total;
}

ContributionReport contribution_report(const BadgeGame& game, const EquilibriumResult& result) {
  ContributionReport r;
  r.mechanism = game.mechanism();
  r.per_badge = badge_contributions(result.profile, game.abilities());
  for (double c : r.per_badge) r.total += c;
  r.converged = result.converged;
  r.rounds = result.rounds;
  return r;
}

std::vector<RankedBadge> rank_categories(std::span<const double> contributions, std::size_t k) {
  std::vector<RankedBadge> ranked;
  ranked.reserve(contributions.size());
  for (std::size_t b = 0; b < contributions.size(); ++b) {
    ranked.push_back({static_cast<BadgeIndex>(b), contributions[b]});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedBadge& a, const RankedBadge& b) {
    return a.contribution > b.contribution;
  });
  ranked.resize(std::min(k, ranked.size()));
  return ranked;
}

SweepCurve sweep_topk(std::span<const double> contributions, std::span<const std::size_t> ks) {
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (ks[i] <= ks[i - 1]) throw ConfigError("top-K sweep needs strictly increasing K values");
  }
  auto ranked = rank_categories(contributions, contributions.size());
  SweepCurve curve;
  double acc = 0.0;
  std::size_t taken = 0;
  for (std::size_t k : ks) {
    std::size_t upto = std::min(k, ranked.size());
    for (; taken < upto; ++taken) acc += ranked[taken].contribution;
    curve.points.push_back({static_cast<double>(k), acc, true, 0});
  }
  return curve;
}

SweepCurve sweep_thresholds(const ValueModel& values, const InferredParams& params,
                            std::span<const double> thetas, const DynamicsOptions& options,
                            std::size_t jobs) {
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (!(thetas[i] > thetas[i - 1])) throw ConfigError("threshold sweep needs increasing values");
  }
  SweepCurve curve;
  curve.points.resize(thetas.size());
  const std::size_t m = values.train().badge_count();
  parallel_for(thetas.size(), jobs, [&](std::size_t i) {
    BadgeGame game(values, params, Mechanism::uniform(m, thetas[i]));
    auto eq = run_dynamics(game, options);
    auto report = contribution_report(game, eq);
    curve.points[i] = {thetas[i], report.total, eq.converged, eq.rounds};
  });
  return curve;
}

MechanismSearch search_dominant_mechanism(const ValueModel& values, const InferredParams& params,
                                          std::span<const Mechanism> grid, const DynamicsOptions& options,
                                          std::size_t jobs) {
  if (grid.empty()) throw ConfigError("mechanism search needs at least one candidate");
  MechanismSearch out;
  out.candidates.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    BadgeGame game(values, params, grid[i]);
    out.candidates[i] = contribution_report(game, run_dynamics(game, options));
  });
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (out.candidates[i].total > out.candidates[out.winner].total) out.winner = i;
  }
  return out;
}

ContributionReport dominant_category_set(const ValueModel& values, const InferredParams& params,
                                         const Mechanism& base, std::size_t k, bool re_equilibrate,
                                         const DynamicsOptions& options) {
  BadgeGame game(values, params, base);
  auto report = contribution_report(game, run_dynamics(game, options));
  auto top = rank_categories(report.per_badge, k);

  Mechanism chosen;
  for (const auto& r : top) chosen.badges.push_back(r.badge);
  std::sort(chosen.badges.begin(), chosen.badges.end());
  for (BadgeIndex b : chosen.badges) {
    auto it = std::lower_bound(base.badges.begin(), base.badges.end(), b);
    chosen.thresholds.push_back(base.thresholds[static_cast<std::size_t>(it - base.badges.begin())]);
  }

  if (re_equilibrate) {
    BadgeGame sub(values, params, chosen);
    return contribution_report(sub, run_dynamics(sub, options));
  }
  ContributionReport r = report;
  r.mechanism = chosen;
  std::vector<double> kept(r.per_badge.size(), 0.0);
  r.total = 0.0;
  for (BadgeIndex b : chosen.badges) {
    kept[b] = report.per_badge[b];
    r.total += kept[b];
  }
  r.per_badge = std::move(kept);
  return r;
}

std::vector<double> threshold_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ConfigError("threshold grid needs step > 0 and hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  // Rounded to 12 decimals so that 0:1:0.1 yields 0.3 rather than 0.30000000000000004.
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
  }
  return out;
}

std::string sweep_to_csv(const SweepCurve& curve) {
  std::string out = "param,total_contribution\n";
  for (const auto& p : curve.points) out += format_double(p.param) + "," + format_double(p.total) + "\n";
  return out;
}

std::string ranking_to_csv(std::span<const RankedBadge> ranking, const Dataset& catalog) {
  std::string out = "rank,badge,contribution\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    out += std::to_string(i + 1) + "," + catalog.badge_id(ranking[i].badge) + "," +
           format_double(ranking[i].contribution) + "\n";
  }
  return out;
}

}  // namespace badgesim
