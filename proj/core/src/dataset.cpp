#include "badgesim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "badgesim/error.hpp"
#include "badgesim/rng.hpp"

namespace badgesim {

SocialGraph::SocialGraph(std::size_t user_count, std::vector<FollowEdge> follows) {
  std::erase_if(follows, [](const FollowEdge& e) { return e.src == e.dst; });
  std::sort(follows.begin(), follows.end());
  follows.erase(std::unique(follows.begin(), follows.end()), follows.end());
  edges_ = std::move(follows);

  std::vector<std::vector<UserIndex>> adj(user_count);
  for (const auto& e : edges_) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  offsets_.assign(user_count + 1, 0);
  for (std::size_t u = 0; u < user_count; ++u) {
    auto& list = adj[u];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    offsets_[u + 1] = offsets_[u] + list.size();
  }
  neighbors_.reserve(offsets_.back());
  for (const auto& list : adj) neighbors_.insert(neighbors_.end(), list.begin(), list.end());
}

Dataset::Dataset(std::vector<std::string> user_ids, std::vector<Badge> badges,
                 std::vector<AchievementEvent> events, SocialGraph graph)
    : user_ids_(std::move(user_ids)),
      badges_(std::move(badges)),
      events_(std::move(events)),
      graph_(std::move(graph)) {
  std::sort(events_.begin(), events_.end(), event_order);
  build_indices();
}

Dataset Dataset::from_records(std::vector<std::string> users, std::vector<Badge> badges,
                              const std::vector<EventRecord>& events,
                              const std::vector<std::pair<std::string, std::string>>& follows) {
  for (const auto& e : events) users.push_back(e.user);
  for (const auto& [src, dst] : follows) {
    users.push_back(src);
    users.push_back(dst);
  }
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());

  std::sort(badges.begin(), badges.end(),
            [](const Badge& a, const Badge& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < badges.size(); ++i) {
    if (badges[i].id == badges[i - 1].id) throw DataError("duplicate badge id: " + badges[i].id);
  }

  std::unordered_map<std::string_view, std::size_t> badge_pos;
  for (std::size_t i = 0; i < badges.size(); ++i) badge_pos.emplace(badges[i].id, i);

  std::vector<std::string> problems;
  for (const auto& b : badges) {
    if (b.level < 1) {
      problems.push_back("badge " + b.id + " has level " + std::to_string(b.level));
    }
    if (!b.prev) continue;
    auto it = badge_pos.find(*b.prev);
    if (it == badge_pos.end()) {
      problems.push_back("badge " + b.id + " links to unknown previous level " + *b.prev);
      continue;
    }
    const Badge& p = badges[it->second];
    if (p.category != b.category || p.level + 1 != b.level) {
      problems.push_back("badge " + b.id + " level link to " + p.id +
                         " is not the same category one level lower");
    }
  }

  std::vector<std::string> unknown_badges;
  for (const auto& e : events) {
    if (!badge_pos.contains(e.badge)) unknown_badges.push_back(e.badge);
  }
  if (!unknown_badges.empty()) {
    std::sort(unknown_badges.begin(), unknown_badges.end());
    unknown_badges.erase(std::unique(unknown_badges.begin(), unknown_badges.end()),
                         unknown_badges.end());
    std::string msg = "events reference unknown badges:";
    for (const auto& id : unknown_badges) msg += " " + id;
    problems.push_back(msg);
  }
  if (!problems.empty()) {
    std::string msg = problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
    throw DataError(msg);
  }

  auto user_of = [&users](const std::string& id) {
    return static_cast<UserIndex>(std::lower_bound(users.begin(), users.end(), id) - users.begin());
  };

  // Collapse repeated achievements to the earliest timestamp.
  std::map<std::pair<UserIndex, BadgeIndex>, Timestamp> earliest;
  for (const auto& e : events) {
    auto key = std::make_pair(user_of(e.user), static_cast<BadgeIndex>(badge_pos.at(e.badge)));
    auto [it, inserted] = earliest.emplace(key, e.ts);
    if (!inserted && e.ts < it->second) it->second = e.ts;
  }
  std::vector<AchievementEvent> evs;
  evs.reserve(earliest.size());
  for (const auto& [key, ts] : earliest) evs.push_back({key.first, key.second, ts});

  std::vector<FollowEdge> edges;
  edges.reserve(follows.size());
  for (const auto& [src, dst] : follows) edges.push_back({user_of(src), user_of(dst)});
  SocialGraph graph(users.size(), std::move(edges));

  return Dataset(std::move(users), std::move(badges), std::move(evs), std::move(graph));
}

void Dataset::build_indices() {
  const std::size_t n = user_ids_.size();
  const std::size_t m = badges_.size();

  history_offsets_.assign(n + 1, 0);
  achiever_offsets_.assign(m + 1, 0);
  for (const auto& e : events_) {
    ++history_offsets_[e.user + 1];
    ++achiever_offsets_[e.badge + 1];
  }
  for (std::size_t u = 0; u < n; ++u) history_offsets_[u + 1] += history_offsets_[u];
  for (std::size_t b = 0; b < m; ++b) achiever_offsets_[b + 1] += achiever_offsets_[b];

  history_.assign(events_.size(), 0);
  achievers_.assign(events_.size(), 0);
  achieved_sorted_.assign(events_.size(), {0, 0});
  std::vector<std::size_t> hfill(history_offsets_.begin(), history_offsets_.end() - 1);
  std::vector<std::size_t> afill(achiever_offsets_.begin(), achiever_offsets_.end() - 1);
  for (const auto& e : events_) {
    achieved_sorted_[hfill[e.user]] = {e.badge, e.ts};
    history_[hfill[e.user]++] = e.badge;
    achievers_[afill[e.badge]++] = e.user;
  }
  for (std::size_t b = 0; b < m; ++b) {
    std::sort(achievers_.begin() + achiever_offsets_[b], achievers_.begin() + achiever_offsets_[b + 1]);
  }
  for (std::size_t u = 0; u < n; ++u) {
    std::sort(achieved_sorted_.begin() + history_offsets_[u],
              achieved_sorted_.begin() + history_offsets_[u + 1]);
  }
}

std::optional<UserIndex> Dataset::find_user(std::string_view id) const {
  auto it = std::lower_bound(user_ids_.begin(), user_ids_.end(), id);
  if (it == user_ids_.end() || *it != id) return std::nullopt;
  return static_cast<UserIndex>(it - user_ids_.begin());
}

std::optional<BadgeIndex> Dataset::find_badge(std::string_view id) const {
  auto it = std::lower_bound(badges_.begin(), badges_.end(), id,
                             [](const Badge& b, std::string_view key) { return b.id < key; });
  if (it == badges_.end() || it->id != id) return std::nullopt;
  return static_cast<BadgeIndex>(it - badges_.begin());
}

UserIndex Dataset::user_index(std::string_view id) const {
  if (auto u = find_user(id)) return *u;
  throw DataError("unknown user: " + std::string(id));
}

BadgeIndex Dataset::badge_index(std::string_view id) const {
  if (auto b = find_badge(id)) return *b;
  throw DataError("unknown badge: " + std::string(id));
}

std::optional<Timestamp> Dataset::achieved_at(UserIndex u, BadgeIndex b) const {
  auto first = achieved_sorted_.begin() + history_offsets_[u];
  auto last = achieved_sorted_.begin() + history_offsets_[u + 1];
  auto it = std::lower_bound(first, last, b,
                             [](const auto& entry, BadgeIndex key) { return entry.first < key; });
  if (it == last || it->first != b) return std::nullopt;
  return it->second;
}

Dataset Dataset::with_events(std::vector<AchievementEvent> events) const {
  return Dataset(user_ids_, badges_, std::move(events), graph_);
}

Dataset Dataset::restrict_badges(const std::vector<bool>& keep) const {
  if (keep.size() != badges_.size()) throw DataError("badge mask has wrong length");
  std::vector<BadgeIndex> remap(badges_.size(), 0);
  std::vector<Badge> kept;
  for (std::size_t b = 0; b < badges_.size(); ++b) {
    if (!keep[b]) continue;
    remap[b] = static_cast<BadgeIndex>(kept.size());
    kept.push_back(badges_[b]);
  }
  for (auto& b : kept) {
    if (b.prev) {
      auto p = find_badge(*b.prev);
      if (!p || !keep[*p]) b.prev.reset();
    }
  }
  std::vector<AchievementEvent> evs;
  for (const auto& e : events_) {
    if (keep[e.badge]) evs.push_back({e.user, remap[e.badge], e.ts});
  }
  return Dataset(user_ids_, std::move(kept), std::move(evs), graph_);
}

bool Dataset::operator==(const Dataset& other) const {
  return user_ids_ == other.user_ids_ && badges_ == other.badges_ && events_ == other.events_ &&
         graph_ == other.graph_;
}

std::vector<UserIndex> neighbor_set(const Dataset& d, std::string_view user_id) {
  auto span = d.graph().neighbors(d.user_index(user_id));
  return {span.begin(), span.end()};
}

TemporalSplit temporal_split(const Dataset& d, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  if (d.empty()) throw DataError("cannot split an empty dataset");
  const auto& events = d.events();
  // The small epsilon keeps 0.9 * 10 from rounding up to 10 through
  // representation error.
  auto n_train = static_cast<std::size_t>(
      std::ceil(train_fraction * static_cast<double>(events.size()) - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, events.size());

  TemporalSplit out;
  out.train = d.with_events({events.begin(), events.begin() + static_cast<std::ptrdiff_t>(n_train)});
  for (std::size_t i = n_train; i < events.size(); ++i) {
    out.test_pairs.push_back({events[i].user, events[i].badge});
  }
  return out;
}

std::vector<UserBadge> sample_negatives(const Dataset& d, std::size_t n, std::uint64_t seed) {
  const std::uint64_t m = d.badge_count();
  const std::uint64_t total = static_cast<std::uint64_t>(d.user_count()) * m;

  // Flattened present pairs, sorted; the k-th absent pair is located by
  // counting present entries that precede it.
  std::vector<std::uint64_t> present;
  present.reserve(d.event_count());
  for (const auto& e : d.events()) present.push_back(static_cast<std::uint64_t>(e.user) * m + e.badge);
  std::sort(present.begin(), present.end());

  const std::uint64_t absent = total - present.size();
  if (n > absent) {
    throw DataError("requested " + std::to_string(n) + " negative pairs but only " +
                    std::to_string(absent) + " absent pairs exist");
  }

  auto kth_absent = [&present](std::uint64_t k) {
    // present[j] - j counts absent pairs before present[j]; it is nondecreasing.
    std::size_t lo = 0, hi = present.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (present[mid] - mid <= k) lo = mid + 1; else hi = mid;
    }
    return k + lo;
  };

  // Floyd's algorithm: n distinct ranks from [0, absent).
  Rng rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(n * 2);
  std::vector<std::uint64_t> ranks;
  ranks.reserve(n);
  for (std::uint64_t j = absent - n; j < absent; ++j) {
    std::uint64_t t = rng.below(j + 1);
    std::uint64_t pick = chosen.contains(t) ? j : t;
    chosen.insert(pick);
    ranks.push_back(pick);
  }
  std::sort(ranks.begin(), ranks.end());

  std::vector<UserBadge> out;
  out.reserve(n);
  for (auto r : ranks) {
    std::uint64_t flat = kth_absent(r);
    out.push_back({static_cast<UserIndex>(flat / m), static_cast<BadgeIndex>(flat % m)});
  }
  return out;
}


Mechanism Mechanism::all_badges(std::vector<double> thresholds) {
  Mechanism m;
  m.badges.resize(thresholds.size());
  for (std::size_t b = 0; b < thresholds.size(); ++b) m.badges[b] = static_cast<BadgeIndex>(b);
  m.thresholds = std::move(thresholds);
  return m;
}

Mechanism Mechanism::uniform(std::size_t badge_count, double threshold) {
  return all_badges(std::vector<double>(badge_count, threshold));
}

void Mechanism::validate(std::size_t badge_count) const {
  if (badges.size() != thresholds.size()) {
    throw ConfigError("mechanism needs one threshold per badge");
  }
  for (std::size_t k = 0; k < badges.size(); ++k) {
    if (badges[k] >= badge_count) throw ConfigError("mechanism names an unknown badge");
    if (k > 0 && badges[k] <= badges[k - 1]) {
      throw ConfigError("mechanism badges must be strictly ascending");
    }
    if (!(thresholds[k] >= 0.0)) throw ConfigError("mechanism thresholds must be nonnegative");
  }
}

}  // namespace badgesim
