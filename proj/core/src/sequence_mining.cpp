#include "badgesim/sequence_mining.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "badgesim/error.hpp"

namespace badgesim {

namespace {

bool pattern_order(const Pattern& a, const Pattern& b) {
  if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
  return a.items < b.items;
}

// (sequence, position) pairs: the suffix of `sequence` starting at `position`
// is the projected remainder after the current prefix.
struct Projection {
  std::uint32_t sequence;
  std::uint32_t position;
};

class Miner {
 public:
  Miner(std::span<const BadgeSequence> sequences, std::size_t min_support, std::size_t max_len,
        std::size_t alphabet)
      : sequences_(sequences),
        min_support_(min_support),
        max_len_(max_len),
        counts_(alphabet, 0),
        stamp_(alphabet, UINT32_MAX) {}

  // Frequent items of the projected database, ascending.
  std::vector<BadgeIndex> frequent_items(const std::vector<Projection>& proj) {
    std::vector<BadgeIndex> touched;
    for (const auto& p : proj) {
      const auto& items = sequences_[p.sequence].items;
      for (std::size_t i = p.position; i < items.size(); ++i) {
        BadgeIndex x = items[i];
        if (stamp_[x] == p.sequence) continue;
        stamp_[x] = p.sequence;
        if (counts_[x]++ == 0) touched.push_back(x);
      }
    }
    std::vector<BadgeIndex> frequent;
    for (BadgeIndex x : touched) {
      if (counts_[x] >= min_support_) frequent.push_back(x);
    }
    for (BadgeIndex x : touched) {
      counts_[x] = 0;
      stamp_[x] = UINT32_MAX;
    }
    std::sort(frequent.begin(), frequent.end());
    return frequent;
  }

  std::vector<Projection> project(const std::vector<Projection>& proj, BadgeIndex x) const {
    std::vector<Projection> out;
    for (const auto& p : proj) {
      const auto& items = sequences_[p.sequence].items;
      for (std::size_t i = p.position; i < items.size(); ++i) {
        if (items[i] == x) {
          out.push_back({p.sequence, static_cast<std::uint32_t>(i + 1)});
          break;
        }
      }
    }
    return out;
  }

  void grow(std::vector<BadgeIndex>& prefix, const std::vector<Projection>& proj,
            std::vector<Pattern>& out) {
    if (prefix.size() >= max_len_) return;
    for (BadgeIndex x : frequent_items(proj)) {
      auto next = project(proj, x);
      prefix.push_back(x);
      out.push_back({prefix, next.size()});
      grow(prefix, next, out);
      prefix.pop_back();
    }
  }

 private:
  std::span<const BadgeSequence> sequences_;
  std::size_t min_support_;
  std::size_t max_len_;
  std::vector<std::size_t> counts_;
  std::vector<std::uint32_t> stamp_;
};

}  // namespace

std::vector<BadgeSequence> build_sequences(const Dataset& train) {
  std::vector<BadgeSequence> out;
  for (std::size_t u = 0; u < train.user_count(); ++u) {
    auto h = train.history(static_cast<UserIndex>(u));
    if (h.empty()) continue;
    out.push_back({static_cast<UserIndex>(u), {h.begin(), h.end()}});
  }
  return out;
}

std::size_t default_min_support(std::size_t user_count) {
  auto one_percent = static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(user_count)));
  return std::max<std::size_t>(2, one_percent);
}

bool is_subsequence(std::span<const BadgeIndex> pattern, std::span<const BadgeIndex> sequence) {
  std::size_t i = 0;
  for (std::size_t j = 0; i < pattern.size() && j < sequence.size(); ++j) {
    if (sequence[j] == pattern[i]) ++i;
  }
  return i == pattern.size();
}

std::vector<Pattern> prefixspan(std::span<const BadgeSequence> sequences, std::size_t min_support,
                                std::size_t max_len, std::size_t jobs) {
  if (min_support < 1) throw ConfigError("min_support must be >= 1");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");

  std::size_t alphabet = 0;
  for (const auto& s : sequences) {
    for (BadgeIndex x : s.items) alphabet = std::max<std::size_t>(alphabet, x + 1);
  }

  std::vector<Projection> root;
  root.reserve(sequences.size());
  for (std::size_t s = 0; s < sequences.size(); ++s) root.push_back({static_cast<std::uint32_t>(s), 0});

  Miner top(sequences, min_support, max_len, alphabet);
  const auto first_items = top.frequent_items(root);

  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, first_items.size()));
  std::vector<std::vector<Pattern>> partial(jobs);
  auto work = [&](std::size_t worker) {
    Miner miner(sequences, min_support, max_len, alphabet);
    std::vector<BadgeIndex> prefix;
    for (std::size_t k = worker; k < first_items.size(); k += jobs) {
      BadgeIndex x = first_items[k];
      auto proj = miner.project(root, x);
      prefix.assign(1, x);
      partial[worker].push_back({prefix, proj.size()});
      miner.grow(prefix, proj, partial[worker]);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  std::vector<Pattern> out;
  for (auto& part : partial) {
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  std::sort(out.begin(), out.end(), pattern_order);
  return out;
}

std::vector<Rule> generate_rules(std::span<const Pattern> patterns, const RuleOptions& options) {
  std::map<std::vector<BadgeIndex>, std::size_t> support;
  for (const auto& p : patterns) support.emplace(p.items, p.support);

  std::vector<Rule> rules;
  if (options.base_rate_rules) {
    if (options.sequence_count == 0) throw ConfigError("base-rate rules need the sequence count");
    for (const auto& p : patterns) {
      if (p.items.size() != 1) continue;
      rules.push_back({{}, p.items[0],
                       static_cast<double>(p.support) / static_cast<double>(options.sequence_count)});
    }
  }
  for (const auto& p : patterns) {
    if (p.items.size() < 2) continue;
    std::vector<BadgeIndex> prefix(p.items.begin(), p.items.end() - 1);
    auto it = support.find(prefix);
    if (it == support.end() || it->second == 0) {
      throw DataError("pattern set is not closed under prefixes");
    }
    rules.push_back({std::move(prefix), p.items.back(),
                     static_cast<double>(p.support) / static_cast<double>(it->second)});
  }
  return rules;
}

}  // namespace badgesim
