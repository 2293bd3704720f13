#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "badgesim/dataset.hpp"

namespace badgesim {

struct BadgeSequence {
  UserIndex user = 0;
  std::vector<BadgeIndex> items;  // achievement order, no repeats

  bool operator==(const BadgeSequence&) const = default;
};

struct Pattern {
  std::vector<BadgeIndex> items;
  std::size_t support = 0;

  bool operator==(const Pattern&) const = default;
};

// antecedent -> consequent with confidence support(ant + con) / support(ant).
// An empty antecedent is a base-rate rule.
struct Rule {
  std::vector<BadgeIndex> antecedent;
  BadgeIndex consequent = 0;
  double confidence = 0.0;

  bool operator==(const Rule&) const = default;
};

// One sequence per user with at least one event, ordered by user.
std::vector<BadgeSequence> build_sequences(const Dataset& train);

// max(2, ceil(1% of users)).
std::size_t default_min_support(std::size_t user_count);

// Order-preserving (not necessarily contiguous) containment of `pattern` in
// `sequence`.
bool is_subsequence(std::span<const BadgeIndex> pattern, std::span<const BadgeIndex> sequence);

// All sequential patterns of length <= max_len whose support (number of
// sequences containing them as a subsequence) is at least min_support, sorted
// by length and then lexicographically. `jobs` worker threads split the
// first-level search space; the result does not depend on it.
std::vector<Pattern> prefixspan(std::span<const BadgeSequence> sequences, std::size_t min_support,
                                std::size_t max_len, std::size_t jobs = 1);

struct RuleOptions {
  // Also emit <> -> b with confidence support(<b>) / sequence_count.
  bool base_rate_rules = false;
  std::size_t sequence_count = 0;
};

// One rule per pattern of length >= 2, built against its prefix pattern.
// Throws DataError if a prefix is missing from `patterns`.
std::vector<Rule> generate_rules(std::span<const Pattern> patterns, const RuleOptions& options = {});

}  // namespace badgesim
