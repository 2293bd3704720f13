#include "badgesim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "badgesim/error.hpp"
#include "badgesim/rng.hpp"

namespace badgesim {

namespace {

std::string padded(char prefix, std::size_t i, std::size_t count) {
  std::string digits = std::to_string(i);
  std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

// Discrete power law on 1..k_max by inverse transform over the exact CDF.
class PowerLawCounts {
 public:
  PowerLawCounts(double exponent, std::size_t k_min, std::size_t k_max)
      : k_min_(k_min), cdf_(k_max - k_min + 1) {
    double acc = 0.0;
    for (std::size_t k = k_min; k <= k_max; ++k) {
      acc += std::pow(static_cast<double>(k), -exponent);
      cdf_[k - k_min] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }

  std::size_t draw(Rng& rng) const {
    double u = rng.uniform01();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin()) + k_min_;
  }

 private:
  std::size_t k_min_;
  std::vector<double> cdf_;
};

struct BadgeShape {
  std::size_t category;
  std::size_t level;  // 1-based
  std::size_t topic;
  double popularity;
};

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_users < 1 || cfg.n_badges < 1) throw ConfigError("n_users and n_badges must be >= 1");
  if (!(cfg.powerlaw_exponent > 1.0)) throw ConfigError("power-law exponent must exceed 1");
  if (!(cfg.homophily >= 0.0 && cfg.homophily <= 1.0)) {
    throw ConfigError("homophily must lie in [0, 1]");
  }
  if (cfg.topics < 1 || cfg.levels_per_category < 1) {
    throw ConfigError("topics and levels_per_category must be >= 1");
  }
  if (cfg.min_badges_per_user < 1 || cfg.min_badges_per_user > cfg.n_badges) {
    throw ConfigError("min_badges_per_user must lie in [1, n_badges]");
  }
  if (!(cfg.background_interest >= 0.0)) throw ConfigError("background_interest must be >= 0");
  if (!(cfg.adoption_threshold >= 0.0 && cfg.adoption_threshold <= 1.0)) {
    throw ConfigError("adoption_threshold must lie in [0, 1]");
  }
  if (!(cfg.conformity >= 0.0)) throw ConfigError("conformity must be >= 0");
  if (!(cfg.pioneer >= 0.0 && cfg.pioneer <= 1.0)) throw ConfigError("pioneer must lie in [0, 1]");

  const std::size_t n = cfg.n_users;
  const std::size_t m = cfg.n_badges;
  Rng rng(cfg.seed);

  // Badge catalogue: consecutive badges form leveled categories.
  const std::size_t n_categories = (m + cfg.levels_per_category - 1) / cfg.levels_per_category;
  std::vector<std::size_t> category_rank(n_categories);
  for (std::size_t c = 0; c < n_categories; ++c) category_rank[c] = c;
  rng.shuffle(category_rank);

  std::vector<BadgeShape> shape(m);
  std::vector<Badge> badges(m);
  for (std::size_t b = 0; b < m; ++b) {
    std::size_t c = b / cfg.levels_per_category;
    std::size_t level = b % cfg.levels_per_category + 1;
    shape[b] = {c, level, c % cfg.topics,
                std::pow(1.0 + static_cast<double>(category_rank[c]), -0.8) /
                    static_cast<double>(level)};
    badges[b].id = padded('b', b, m);
    badges[b].name = "Badge " + std::to_string(c) + "." + std::to_string(level);
    badges[b].category = padded('c', c, n_categories);
    badges[b].level = static_cast<int>(level);
    if (level > 1) badges[b].prev = padded('b', b - 1, m);
  }

  // Latent interests: one dominant topic plus background mass.
  std::vector<std::size_t> main_topic(n);
  std::vector<std::vector<double>> interest(n, std::vector<double>(cfg.topics));
  for (std::size_t u = 0; u < n; ++u) {
    main_topic[u] = static_cast<std::size_t>(rng.below(cfg.topics));
    for (std::size_t t = 0; t < cfg.topics; ++t) {
      interest[u][t] = t == main_topic[u] ? 1.0 : cfg.background_interest * (0.1 + 0.9 * rng.uniform01());
    }
  }

  // Follow graph: preferential attachment, biased toward the same main topic.
  std::vector<FollowEdge> follows;
  std::vector<UserIndex> endpoints;  // each user repeated (degree + 1) times
  std::vector<std::vector<UserIndex>> topic_endpoints(cfg.topics);
  std::vector<std::vector<UserIndex>> adjacency(n);
  for (std::size_t u = 0; u < n; ++u) {
    const auto self = static_cast<UserIndex>(u);
    std::size_t want = std::min(u, cfg.follows_per_user);
    std::vector<UserIndex> picked;
    for (std::size_t attempt = 0; picked.size() < want && attempt < 20 * want + 20; ++attempt) {
      const auto& same = topic_endpoints[main_topic[u]];
      const auto& pool = (!same.empty() && rng.bernoulli(cfg.topic_assortativity)) ? same : endpoints;
      UserIndex v = pool[rng.below(pool.size())];
      if (std::find(picked.begin(), picked.end(), v) == picked.end()) picked.push_back(v);
    }
    endpoints.push_back(self);
    topic_endpoints[main_topic[u]].push_back(self);
    for (UserIndex v : picked) {
      follows.push_back({self, v});
      if (rng.bernoulli(0.3)) follows.push_back({v, self});
      adjacency[u].push_back(v);
      adjacency[v].push_back(self);
      endpoints.push_back(v);
      endpoints.push_back(self);
      topic_endpoints[main_topic[v]].push_back(v);
      topic_endpoints[main_topic[u]].push_back(self);
    }
  }

  // Achievement timeline.
  const std::size_t k_max = cfg.max_badges_per_user == 0 ? m : std::min(cfg.max_badges_per_user, m);
  PowerLawCounts counts(cfg.powerlaw_exponent, std::min(cfg.min_badges_per_user, k_max), k_max);
  std::vector<std::size_t> quota(n);
  for (auto& q : quota) q = counts.draw(rng);

  std::vector<std::vector<BadgeIndex>> held(n);
  std::vector<std::vector<bool>> owns(n, std::vector<bool>(m, false));
  std::vector<AchievementEvent> events;

  std::vector<UserIndex> active;
  std::vector<std::ptrdiff_t> slot(n, -1);
  auto activate = [&](std::size_t u) {
    if (slot[u] >= 0 || held[u].size() >= quota[u]) return;
    slot[u] = static_cast<std::ptrdiff_t>(active.size());
    active.push_back(static_cast<UserIndex>(u));
  };
  auto deactivate = [&](std::size_t u) {
    std::ptrdiff_t s = slot[u];
    if (s < 0) return;
    UserIndex last = active.back();
    active[static_cast<std::size_t>(s)] = last;
    slot[last] = s;
    active.pop_back();
    slot[u] = -1;
  };
  for (std::size_t u = 0; u < n; ++u) activate(u);

  std::vector<double> weights(m);
  std::vector<double> pace;
  std::vector<BadgeIndex> copy_pool;
  std::vector<double> copy_weights;
  std::vector<double> holders(m, 0.0);
  std::vector<BadgeIndex> touched;
  std::vector<BadgeIndex> level_ups;
  Timestamp clock = 0;

  while (!active.empty()) {
    // Acting rate proportional to the quota spreads every user's achievements
    // over the whole timeline.
    pace.resize(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) pace[k] = static_cast<double>(quota[active[k]]);
    const std::size_t u = active[rng.weighted(pace)];
    std::optional<BadgeIndex> pick;

    // How many neighbors hold each badge.
    for (BadgeIndex b : touched) holders[b] = 0.0;
    touched.clear();
    for (UserIndex v : adjacency[u]) {
      for (BadgeIndex b : held[v]) {
        if (holders[b] == 0.0) touched.push_back(b);
        holders[b] += 1.0;
      }
    }
    const double degree = static_cast<double>(adjacency[u].size());

    if (rng.bernoulli(cfg.homophily)) {
      copy_weights.clear();
      copy_pool.clear();
      // Full homophily leaves no other source, so the adoption threshold
      // relaxes to any neighbor-held badge.
      const double needed = cfg.homophily >= 1.0 ? 0.0 : cfg.adoption_threshold;
      for (BadgeIndex b : touched) {
        if (owns[u][b] || holders[b] / degree < needed) continue;
        copy_pool.push_back(b);
        copy_weights.push_back(std::pow(holders[b] / degree, cfg.conformity));
      }
      if (!copy_pool.empty()) {
        pick = copy_pool[rng.weighted(copy_weights)];
      } else if (cfg.homophily >= 1.0 && !held[u].empty()) {
        deactivate(u);  // stalled until a neighbor achieves something new
        continue;
      }
    }

    if (!pick) {
      level_ups.clear();
      for (BadgeIndex b : held[u]) {
        if (shape[b].level < cfg.levels_per_category && b + 1 < m && !owns[u][b + 1]) {
          level_ups.push_back(b + 1);
        }
      }
      if (!level_ups.empty() && rng.bernoulli(cfg.level_up_bias)) {
        pick = level_ups[rng.below(level_ups.size())];
      } else {
        bool any = false;
        for (std::size_t b = 0; b < m; ++b) {
          weights[b] = owns[u][b] ? 0.0 : interest[u][shape[b].topic] * shape[b].popularity;
          if (holders[b] > 0.0) weights[b] *= 1.0 - cfg.pioneer;
          any = any || weights[b] > 0.0;
        }
        if (!any) {
          // Everything left is held by a neighbor: drop the pioneer discount.
          for (std::size_t b = 0; b < m; ++b) {
            weights[b] = owns[u][b] ? 0.0 : interest[u][shape[b].topic] * shape[b].popularity;
          }
        }
        std::size_t b = rng.weighted(weights);
        if (b == m) {
          deactivate(u);
          continue;
        }
        pick = static_cast<BadgeIndex>(b);
      }
    }

    owns[u][*pick] = true;
    held[u].push_back(*pick);
    events.push_back({static_cast<UserIndex>(u), *pick, clock++});
    if (held[u].size() >= quota[u]) deactivate(u);
    for (UserIndex v : adjacency[u]) activate(v);
  }

  std::vector<std::string> user_ids(n);
  for (std::size_t u = 0; u < n; ++u) user_ids[u] = padded('u', u, n);

  std::vector<EventRecord> records;
  records.reserve(events.size());
  for (const auto& e : events) records.push_back({user_ids[e.user], badges[e.badge].id, e.ts});
  std::vector<std::pair<std::string, std::string>> edges;
  edges.reserve(follows.size());
  for (const auto& f : follows) edges.emplace_back(user_ids[f.src], user_ids[f.dst]);

  return Dataset::from_records(std::move(user_ids), std::move(badges), records, edges);
}

}  // namespace badgesim
