#include "badgesim/knapsack.hpp"

#include <algorithm>
#include <cmath>

#include "badgesim/error.hpp"

namespace badgesim {

namespace {

constexpr double kTie = 1e-12;

bool fits(double effort, double budget) { return effort <= budget + kTie * std::max(1.0, budget); }

bool usable(const KnapsackItem& it, double budget) {
  return it.value - it.effort > 0.0 && fits(it.effort, budget);
}

// Candidate `a` beats incumbent `b`: more net value, or equal net value with
// less effort.
bool better(double net_a, double effort_a, double net_b, double effort_b) {
  if (net_a > net_b + kTie) return true;
  if (net_a < net_b - kTie) return false;
  return effort_a < effort_b - kTie;
}

KnapsackSolution finish(std::span<const KnapsackItem> items, std::vector<std::size_t> chosen, bool exact) {
  std::sort(chosen.begin(), chosen.end());
  KnapsackSolution s;
  for (std::size_t i : chosen) {
    s.net += items[i].value - items[i].effort;
    s.effort += items[i].effort;
  }
  s.chosen = std::move(chosen);
  s.exact = exact;
  return s;
}

class BranchAndBound {
 public:
  BranchAndBound(std::span<const KnapsackItem> items, std::vector<std::size_t> order, double budget,
                 std::size_t node_limit)
      : items_(items), order_(std::move(order)), budget_(budget), node_limit_(node_limit) {}

  void seed(const KnapsackSolution& s) {
    best_net_ = s.net;
    best_effort_ = s.effort;
    best_ = s.chosen;
  }

  void run() {
    std::vector<std::size_t> path;
    dfs(0, 0.0, 0.0, path);
  }

  bool exhausted() const { return nodes_ > node_limit_; }
  const std::vector<std::size_t>& best() const { return best_; }

 private:
  // Fractional relaxation over order_[depth..] with the remaining budget.
  double bound(std::size_t depth, double net, double effort) const {
    double room = budget_ - effort;
    double b = net;
    for (std::size_t k = depth; k < order_.size() && room > 0.0; ++k) {
      const auto& it = items_[order_[k]];
      double gain = it.value - it.effort;
      if (it.effort <= room) {
        b += gain;
        room -= it.effort;
      } else {
        b += gain * (room / it.effort);
        room = 0.0;
      }
    }
    return b;
  }

  void dfs(std::size_t depth, double net, double effort, std::vector<std::size_t>& path) {
    if (++nodes_ > node_limit_) return;
    if (better(net, effort, best_net_, best_effort_)) {
      best_net_ = net;
      best_effort_ = effort;
      best_ = path;
    }
    if (depth == order_.size()) return;
    if (bound(depth, net, effort) <= best_net_ + kTie) return;

    const std::size_t i = order_[depth];
    const auto& it = items_[i];
    if (fits(effort + it.effort, budget_)) {
      path.push_back(i);
      dfs(depth + 1, net + it.value - it.effort, effort + it.effort, path);
      path.pop_back();
    }
    dfs(depth + 1, net, effort, path);
  }

  std::span<const KnapsackItem> items_;
  std::vector<std::size_t> order_;
  double budget_;
  std::size_t node_limit_;
  std::size_t nodes_ = 0;
  double best_net_ = 0.0;
  double best_effort_ = 0.0;
  std::vector<std::size_t> best_;
};

}  // namespace

KnapsackSolution solve_knapsack_dp(std::span<const KnapsackItem> items, double budget,
                                   double resolution) {
  if (!(resolution > 0.0)) throw ConfigError("knapsack resolution must be positive");
  if (!(budget > 0.0)) budget = 0.0;

  std::vector<std::size_t> cand;
  std::vector<std::size_t> weight;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!usable(items[i], budget)) continue;
    cand.push_back(i);
    weight.push_back(static_cast<std::size_t>(std::max(0.0, std::ceil(items[i].effort / resolution - 1e-9))));
  }
  const auto capacity = static_cast<std::size_t>(std::floor(budget / resolution + 1e-9));

  // best[c]: max net value with rounded weight <= c over the items seen so far.
  std::vector<double> best(capacity + 1, 0.0);
  std::vector<std::vector<bool>> take(cand.size(), std::vector<bool>(capacity + 1, false));
  for (std::size_t k = 0; k < cand.size(); ++k) {
    const double gain = items[cand[k]].value - items[cand[k]].effort;
    const std::size_t w = weight[k];
    if (w > capacity) continue;
    for (std::size_t c = capacity + 1; c-- > w;) {
      double with = best[c - w] + gain;
      if (with > best[c]) {
        best[c] = with;
        take[k][c] = true;
      }
    }
  }
  std::vector<std::size_t> chosen;
  std::size_t c = capacity;
  for (std::size_t k = cand.size(); k-- > 0;) {
    if (take[k][c]) {
      chosen.push_back(cand[k]);
      c -= weight[k];
    }
  }
  auto s = finish(items, std::move(chosen), false);
  if (!fits(s.effort, budget)) return finish(items, {}, false);
  return s;
}

KnapsackSolution solve_knapsack(std::span<const KnapsackItem> items, double budget,
                                const KnapsackOptions& options) {
  if (!(budget > 0.0)) budget = 0.0;

  // Free items are always worth taking.
  std::vector<std::size_t> free_items;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!usable(items[i], budget)) continue;
    if (items[i].effort <= 0.0) {
      free_items.push_back(i);
    } else {
      order.push_back(i);
    }
  }
  std::sort(order.begin(), order.end(), [&items](std::size_t a, std::size_t b) {
    // Descending net value per unit effort; cross-multiplied to avoid division.
    double lhs = (items[a].value - items[a].effort) * items[b].effort;
    double rhs = (items[b].value - items[b].effort) * items[a].effort;
    if (lhs != rhs) return lhs > rhs;
    return a < b;
  });

  std::vector<KnapsackItem> paid;
  paid.reserve(order.size());
  for (std::size_t i : order) paid.push_back(items[i]);
  auto incumbent = solve_knapsack_dp(paid, budget, options.resolution);

  std::vector<std::size_t> local(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) local[k] = k;
  BranchAndBound bb(paid, local, budget, options.node_limit);
  bb.seed(incumbent);
  bb.run();

  std::vector<std::size_t> chosen = free_items;
  for (std::size_t k : bb.best()) chosen.push_back(order[k]);
  return finish(items, std::move(chosen), !bb.exhausted());
}

}  // namespace badgesim
