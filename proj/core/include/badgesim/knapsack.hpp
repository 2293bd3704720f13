#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace badgesim {

// A badge a user could win: `value` is its reward, `effort` the minimal
// effort needed to reach its threshold.
struct KnapsackItem {
  double value = 0.0;
  double effort = 0.0;
};

struct KnapsackSolution {
  std::vector<std::size_t> chosen;  // item positions, ascending
  double net = 0.0;                 // sum of value - effort over chosen
  double effort = 0.0;              // sum of effort over chosen
  bool exact = true;                // false if the search hit its node limit
};

struct KnapsackOptions {
  double resolution = 1e-3;  // effort grid of the dynamic program
  std::size_t node_limit = 2'000'000;
};

// Maximizes sum(value - effort) subject to sum(effort) <= budget. Items with
// nonpositive net value or effort above the budget are never chosen. A
// dynamic program over efforts rounded up to `resolution` yields a feasible
// incumbent; a depth-first branch and bound over the exact efforts, bounded by
// the fractional relaxation, then proves or improves it. Ties prefer lower
// total effort.
KnapsackSolution solve_knapsack(std::span<const KnapsackItem> items, double budget,
                                const KnapsackOptions& options = {});

// The dynamic program alone (the incumbent used above).
KnapsackSolution solve_knapsack_dp(std::span<const KnapsackItem> items, double budget,
                                   double resolution);

}  // namespace badgesim
