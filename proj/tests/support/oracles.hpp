#pragma once

// Slow reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "badgesim/dataset.hpp"
#include "badgesim/peer_fit.hpp"

namespace oracle {

// Events as (user id, badge id, ts); badges are single-level unless given.
inline badgesim::Dataset make_dataset(const std::vector<std::tuple<std::string, std::string, long>>& events,
                                      const std::vector<std::pair<std::string, std::string>>& follows = {},
                                      std::vector<std::string> users = {},
                                      std::vector<badgesim::Badge> badges = {}) {
  std::set<std::string> badge_ids;
  for (const auto& b : badges) badge_ids.insert(b.id);
  std::vector<badgesim::EventRecord> records;
  for (const auto& [u, b, t] : events) {
    records.push_back({u, b, t});
    if (badge_ids.insert(b).second) badges.push_back({b, b, "cat_" + b, 1, std::nullopt});
  }
  return badgesim::Dataset::from_records(std::move(users), std::move(badges), records, follows);
}

inline double auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

struct SubsetBest {
  double net = 0.0;
  std::vector<std::size_t> chosen;
};

// Exhaustive over all 2^m subsets with exact efforts.
inline SubsetBest knapsack(const std::vector<double>& values, const std::vector<double>& efforts, double budget) {
  const std::size_t m = values.size();
  SubsetBest best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double spent = 0.0, net = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask >> j & 1) {
        spent += efforts[j];
        net += values[j] - efforts[j];
      }
    }
    if (spent <= budget + 1e-12 && net > best.net) {
      best.net = net;
      best.chosen.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (mask >> j & 1) best.chosen.push_back(j);
      }
    }
  }
  return best;
}

inline bool contains(const std::vector<int>& seq, const std::vector<int>& pat) {
  std::size_t k = 0;
  for (int x : seq) {
    if (k < pat.size() && pat[k] == x) ++k;
  }
  return k == pat.size();
}

// Every subsequence of every sequence, counted once per sequence.
inline std::map<std::vector<int>, std::size_t> mine(const std::vector<std::vector<int>>& seqs, std::size_t min_support,
                                                    std::size_t max_len) {
  std::set<std::vector<int>> candidates;
  for (const auto& s : seqs) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << s.size()); ++mask) {
      std::vector<int> sub;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (mask >> i & 1) sub.push_back(s[i]);
      }
      if (sub.size() <= max_len) candidates.insert(sub);
    }
  }
  std::map<std::vector<int>, std::size_t> out;
  for (const auto& c : candidates) {
    std::size_t support = 0;
    for (const auto& s : seqs) support += contains(s, c);
    if (support >= min_support) out[c] = support;
  }
  return out;
}

// Grid over every coefficient but the last (the additive constant), which is
// the optimal L1 shift: the median of the residuals.
// `box` holds one (lo, hi) range per gridded coefficient.
inline double grid_fit_objective(const badgesim::PeerCurvePoints& pts, badgesim::PeerFamily family,
                                 const std::vector<std::pair<double, double>>& box, double step) {
  using badgesim::PeerFamily;
  const std::size_t k = badgesim::coefficient_count(family);
  std::vector<std::size_t> steps(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    steps[i] = static_cast<std::size_t>(std::llround((box[i].second - box[i].first) / step));
  }
  std::vector<std::size_t> idx(k - 1, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> resid(pts.x.size());
  while (true) {
    std::vector<double> w(k, 0.0);
    for (std::size_t i = 0; i + 1 < k; ++i) w[i] = box[i].first + step * static_cast<double>(idx[i]);
    for (std::size_t p = 0; p < pts.x.size(); ++p) {
      double x = pts.x[p], f = 0.0;
      switch (family) {
        case PeerFamily::kLinear: f = w[0] * x; break;
        case PeerFamily::kQuadratic: f = w[0] * x * x + w[1] * x; break;
        case PeerFamily::kCubic: f = w[0] * x * x * x + w[1] * x * x + w[2] * x; break;
        case PeerFamily::kExponential: f = w[0] * std::exp(-w[1] * x); break;
      }
      resid[p] = pts.y[p] - f;
    }
    auto sorted = resid;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    double c = sorted[sorted.size() / 2];
    double obj = 0.0;
    for (double r : resid) obj += std::abs(r - c);
    best = std::min(best, obj);

    std::size_t i = 0;
    while (i < idx.size() && idx[i] == steps[i]) idx[i++] = 0;
    if (i == idx.size()) break;
    ++idx[i];
  }
  return best;
}

inline double grid_fit_objective(const badgesim::PeerCurvePoints& pts, badgesim::PeerFamily family, double lo,
                                 double hi, double step) {
  return grid_fit_objective(pts, family, std::vector<std::pair<double, double>>(3, {lo, hi}), step);
}

}  // namespace oracle
