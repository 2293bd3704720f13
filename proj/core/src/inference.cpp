#include "badgesim/inference.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "badgesim/error.hpp"
#include "badgesim/rng.hpp"

namespace badgesim {

namespace {

void normalize_l1(std::span<double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (s > 0.0) {
    for (double& x : v) x /= s;
  } else {
    for (double& x : v) x = 1.0 / static_cast<double>(v.size());
  }
}

}  // namespace

std::vector<double> infer_effort_budget(const Dataset& train) {
  const std::size_t n = train.user_count();
  std::vector<double> out(n, 1.0);
  if (n == 0) return out;
  std::size_t lo = SIZE_MAX, hi = 0;
  for (std::size_t u = 0; u < n; ++u) {
    std::size_t c = train.history(static_cast<UserIndex>(u)).size();
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  if (hi == lo) return out;
  const double span = static_cast<double>(hi - lo);
  for (std::size_t u = 0; u < n; ++u) {
    out[u] = static_cast<double>(train.history(static_cast<UserIndex>(u)).size() - lo) / span;
  }
  return out;
}

std::vector<std::size_t> ability_groups(const Dataset& train, bool collapse_levels) {
  const std::size_t m = train.badge_count();
  std::vector<std::size_t> group(m);
  if (!collapse_levels) {
    for (std::size_t b = 0; b < m; ++b) group[b] = b;
    return group;
  }
  std::unordered_map<std::string, std::size_t> ids;
  for (std::size_t b = 0; b < m; ++b) {
    auto it = ids.emplace(train.badges()[b].category, ids.size()).first;
    group[b] = it->second;
  }
  return group;
}

AbilityMatrix infer_ability(const Dataset& train, const AbilityOptions& options) {
  if (!(options.mix >= 0.0 && options.mix <= 1.0)) throw ConfigError("ability mix must lie in [0, 1]");
  const std::size_t n = train.user_count();
  const std::size_t m = train.badge_count();
  AbilityMatrix a(n, m);
  if (m == 0) return a;

  const auto group = ability_groups(train, options.collapse_levels);
  const std::size_t g = *std::max_element(group.begin(), group.end()) + 1;

  std::vector<double> inferred(g), random(g), blended(g);
  for (std::size_t u = 0; u < n; ++u) {
    std::fill(inferred.begin(), inferred.end(), 0.0);
    for (BadgeIndex b : train.history(static_cast<UserIndex>(u))) inferred[group[b]] += 1.0;
    normalize_l1(inferred);

    Rng rng(mix_seed(options.seed, u));
    for (auto& r : random) r = rng.uniform01();
    normalize_l1(random);

    for (std::size_t k = 0; k < g; ++k) blended[k] = options.mix * inferred[k] + (1.0 - options.mix) * random[k];
    normalize_l1(blended);

    auto row = a.row(static_cast<UserIndex>(u));
    for (std::size_t b = 0; b < m; ++b) row[b] = blended[group[b]];
  }
  return a;
}

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::kCountRatio ? "count-ratio" : "index-ratio";
}

std::optional<ThresholdMode> parse_threshold_mode(std::string_view name) {
  if (name == "count-ratio") return ThresholdMode::kCountRatio;
  if (name == "index-ratio") return ThresholdMode::kIndexRatio;
  return std::nullopt;
}

ThresholdScaling scale_to_feasibility(double base, std::span<const double> capacities, double eta_cap) {
  if (base <= 0.0) return {eta_cap, 0.0};
  double min_cap = capacities.empty() ? 0.0 : *std::min_element(capacities.begin(), capacities.end());
  double eta = min_cap / base;
  if (eta >= eta_cap) return {eta_cap, eta_cap * base};
  // Binding achiever: the threshold is exactly its capacity.
  return {eta, min_cap};
}

ThresholdEstimate estimate_thresholds(const Dataset& train, std::span<const double> budgets,
                                      const AbilityMatrix& abilities, const ThresholdOptions& options) {
  const std::size_t m = train.badge_count();
  if (budgets.size() != train.user_count() || abilities.users() != train.user_count() ||
      abilities.badges() != m) {
    throw DataError("budgets and abilities do not match the training data");
  }
  if (!(options.eta_cap > 0.0)) throw ConfigError("eta cap must be positive");

  // Position (1-based) of every training achievement in its user's sequence.
  std::vector<std::vector<double>> raw(m);
  std::vector<std::vector<double>> capacity(m);
  for (std::size_t u = 0; u < train.user_count(); ++u) {
    auto h = train.history(static_cast<UserIndex>(u));
    const double p = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double q = static_cast<double>(i + 1);
      raw[h[i]].push_back(options.mode == ThresholdMode::kCountRatio ? p / q : q / p);
      capacity[h[i]].push_back(abilities.at(static_cast<UserIndex>(u), h[i]) * budgets[u]);
    }
  }

  ThresholdEstimate out;
  out.theta.assign(m, options.unachieved_threshold);
  out.eta.assign(m, 0.0);
  out.base.assign(m, 0.0);
  for (std::size_t b = 0; b < m; ++b) {
    if (raw[b].empty()) continue;
    double s = 0.0;
    for (double r : raw[b]) s += r;
    out.base[b] = s / static_cast<double>(raw[b].size());
    auto scaled = scale_to_feasibility(out.base[b], capacity[b], options.eta_cap);
    out.eta[b] = scaled.eta;
    out.theta[b] = scaled.theta;
  }
  return out;
}

InferredParams infer_params(const Dataset& train, const InferenceOptions& options) {
  InferredParams p;
  p.budgets = infer_effort_budget(train);
  p.abilities = infer_ability(train, options.ability);
  p.thresholds = estimate_thresholds(train, p.budgets, p.abilities, options.threshold);
  return p;
}

std::string params_to_json(const InferredParams& params, const Dataset& catalog) {
  nlohmann::ordered_json j;
  auto& budgets = j["budgets"] = nlohmann::ordered_json::object();
  for (std::size_t u = 0; u < params.budgets.size(); ++u) {
    budgets[catalog.user_id(static_cast<UserIndex>(u))] = params.budgets[u];
  }
  auto& abilities = j["abilities"] = nlohmann::ordered_json::object();
  for (std::size_t u = 0; u < params.abilities.users(); ++u) {
    auto& row = abilities[catalog.user_id(static_cast<UserIndex>(u))] = nlohmann::ordered_json::object();
    auto r = params.abilities.row(static_cast<UserIndex>(u));
    for (std::size_t b = 0; b < r.size(); ++b) {
      if (r[b] != 0.0) row[catalog.badge_id(static_cast<BadgeIndex>(b))] = r[b];
    }
  }
  auto& thresholds = j["thresholds"] = nlohmann::ordered_json::object();
  auto& eta = j["eta"] = nlohmann::ordered_json::object();
  for (std::size_t b = 0; b < params.thresholds.theta.size(); ++b) {
    const auto& id = catalog.badge_id(static_cast<BadgeIndex>(b));
    thresholds[id] = params.thresholds.theta[b];
    eta[id] = params.thresholds.eta[b];
  }
  return j.dump();
}

InferredParams params_from_json(std::string_view text, const Dataset& catalog) {
  const std::size_t n = catalog.user_count();
  const std::size_t m = catalog.badge_count();
  InferredParams p;
  p.budgets.assign(n, 0.0);
  p.abilities = AbilityMatrix(n, m);
  p.thresholds.theta.assign(m, 0.0);
  p.thresholds.eta.assign(m, 0.0);
  p.thresholds.base.assign(m, 0.0);
  try {
    auto j = nlohmann::json::parse(text);
    for (const auto& [id, v] : j.at("budgets").items()) p.budgets[catalog.user_index(id)] = v.get<double>();
    for (const auto& [uid, row] : j.at("abilities").items()) {
      UserIndex u = catalog.user_index(uid);
      for (const auto& [bid, v] : row.items()) p.abilities.at(u, catalog.badge_index(bid)) = v.get<double>();
    }
    for (const auto& [id, v] : j.at("thresholds").items()) {
      p.thresholds.theta[catalog.badge_index(id)] = v.get<double>();
    }
    for (const auto& [id, v] : j.at("eta").items()) p.thresholds.eta[catalog.badge_index(id)] = v.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad parameter JSON: ") + e.what());
  }
  return p;
}

}  // namespace badgesim
