#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace badgesim {

// Users and badges are addressed by their position in the id-sorted tables of
// a Dataset, so index order coincides with lexicographic id order.
using UserIndex = std::uint32_t;
using BadgeIndex = std::uint32_t;
using Timestamp = std::int64_t;

struct Badge {
  std::string id;
  std::string name;
  std::string category;
  int level = 1;
  std::optional<std::string> prev;  // id of the previous level, same category

  bool operator==(const Badge&) const = default;
};

struct AchievementEvent {
  UserIndex user = 0;
  BadgeIndex badge = 0;
  Timestamp ts = 0;

  bool operator==(const AchievementEvent&) const = default;
};

// Deterministic total order on events: (timestamp, user id, badge id).
inline bool event_order(const AchievementEvent& a, const AchievementEvent& b) {
  if (a.ts != b.ts) return a.ts < b.ts;
  if (a.user != b.user) return a.user < b.user;
  return a.badge < b.badge;
}

struct UserBadge {
  UserIndex user = 0;
  BadgeIndex badge = 0;

  auto operator<=>(const UserBadge&) const = default;
};

struct FollowEdge {
  UserIndex src = 0;
  UserIndex dst = 0;

  auto operator<=>(const FollowEdge&) const = default;
};

// Directed follow graph with a precomputed undirected view. Self-loops and
// repeated edges are dropped on construction.
class SocialGraph {
 public:
  SocialGraph() = default;
  SocialGraph(std::size_t user_count, std::vector<FollowEdge> follows);

  std::size_t user_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  // Follow edges sorted by (src, dst).
  const std::vector<FollowEdge>& edges() const { return edges_; }

  // Undirected neighborhood Γ(u), sorted ascending.
  std::span<const UserIndex> neighbors(UserIndex u) const {
    return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
  }

  bool operator==(const SocialGraph& other) const { return edges_ == other.edges_; }

 private:
  std::vector<FollowEdge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<UserIndex> neighbors_;
};

// Event record keyed by external ids, as read from files.
struct EventRecord {
  std::string user;
  std::string badge;
  Timestamp ts = 0;
};

// Immutable badge-achievement dataset: users, badges, sorted events and the
// follow graph, plus lookup tables derived from them.
class Dataset {
 public:
  Dataset() = default;

  // Builds and validates a dataset from id-keyed records. Users are the union
  // of `users`, event users and graph endpoints. Duplicate (user, badge)
  // events collapse to the earliest timestamp. Throws DataError listing every
  // dangling badge reference.
  static Dataset from_records(std::vector<std::string> users, std::vector<Badge> badges,
                              const std::vector<EventRecord>& events,
                              const std::vector<std::pair<std::string, std::string>>& follows);

  std::size_t user_count() const { return user_ids_.size(); }
  std::size_t badge_count() const { return badges_.size(); }
  std::size_t event_count() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<Badge>& badges() const { return badges_; }
  const std::vector<AchievementEvent>& events() const { return events_; }
  const SocialGraph& graph() const { return graph_; }

  const std::string& user_id(UserIndex u) const { return user_ids_[u]; }
  const std::string& badge_id(BadgeIndex b) const { return badges_[b].id; }

  std::optional<UserIndex> find_user(std::string_view id) const;
  std::optional<BadgeIndex> find_badge(std::string_view id) const;
  UserIndex user_index(std::string_view id) const;    // throws DataError
  BadgeIndex badge_index(std::string_view id) const;  // throws DataError

  // Badges of `u` in achievement order.
  std::span<const BadgeIndex> history(UserIndex u) const {
    return {history_.data() + history_offsets_[u], history_.data() + history_offsets_[u + 1]};
  }
  // Users who achieved `b`, sorted ascending.
  std::span<const UserIndex> achievers(BadgeIndex b) const {
    return {achievers_.data() + achiever_offsets_[b],
            achievers_.data() + achiever_offsets_[b + 1]};
  }

  std::optional<Timestamp> achieved_at(UserIndex u, BadgeIndex b) const;
  bool has_achieved(UserIndex u, BadgeIndex b) const { return achieved_at(u, b).has_value(); }

  // Same users, badges and graph with a different event list.
  Dataset with_events(std::vector<AchievementEvent> events) const;

  // Keeps only badges whose mask entry is true; events on dropped badges are
  // removed and dangling level links are cleared.
  Dataset restrict_badges(const std::vector<bool>& keep) const;

  bool operator==(const Dataset& other) const;

 private:
  Dataset(std::vector<std::string> user_ids, std::vector<Badge> badges,
          std::vector<AchievementEvent> events, SocialGraph graph);

  void build_indices();

  std::vector<std::string> user_ids_;
  std::vector<Badge> badges_;
  std::vector<AchievementEvent> events_;
  SocialGraph graph_;

  std::vector<std::size_t> history_offsets_;
  std::vector<BadgeIndex> history_;
  std::vector<std::size_t> achiever_offsets_;
  std::vector<UserIndex> achievers_;
  // Per-user (badge, ts) sorted by badge, laid out like history_.
  std::vector<std::pair<BadgeIndex, Timestamp>> achieved_sorted_;
};

// Undirected neighbor set of the user with the given id. Throws DataError for
// an unknown id.
std::vector<UserIndex> neighbor_set(const Dataset& d, std::string_view user_id);

struct TemporalSplit {
  Dataset train;
  std::vector<UserBadge> test_pairs;  // in event order
};

// The first ceil(train_fraction * |events|) events in the global order form
// the training set; the remaining (user, badge) pairs are test positives.
TemporalSplit temporal_split(const Dataset& d, double train_fraction);

// `n` distinct (user, badge) pairs absent from `d`, uniform without
// replacement over all absent pairs and reproducible from `seed`. Sorted.
std::vector<UserBadge> sample_negatives(const Dataset& d, std::size_t n, std::uint64_t seed);


// Designer configuration: the active badges and their thresholds.
struct Mechanism {
  std::vector<BadgeIndex> badges;  // ascending
  std::vector<double> thresholds;  // aligned with `badges`

  // Every badge of the catalogue with the given per-badge thresholds.
  static Mechanism all_badges(std::vector<double> thresholds);
  // Every badge of the catalogue with one shared threshold.
  static Mechanism uniform(std::size_t badge_count, double threshold);

  // Throws ConfigError on size mismatch, negative thresholds, unknown or
  // repeated badges.
  void validate(std::size_t badge_count) const;

  bool operator==(const Mechanism&) const = default;
};

}  // namespace badgesim
