#pragma once

#include <cstdint>

#include "badgesim/dataset.hpp"

namespace badgesim {

struct SyntheticConfig {
  std::size_t n_users = 500;
  std::size_t n_badges = 100;
  double powerlaw_exponent = 2.5;  // per-user badge counts ~ k^-exponent
  double homophily = 0.7;          // probability an achievement copies a neighbor's badge
  std::uint64_t seed = 1;

  // Shape knobs; defaults are what the CLI and the tests use.
  std::size_t follows_per_user = 4;  // preferential-attachment out-degree
  std::size_t topics = 10;           // latent interest dimensions
  std::size_t levels_per_category = 10;
  double topic_assortativity = 0.7;  // chance a follow stays within the user's main topic
  double level_up_bias = 0.9;        // chance an interest pick continues a started category
  double background_interest = 0.2;  // max weight of a non-main topic (main topic weighs 1)
  std::size_t min_badges_per_user = 3;  // lower end of the power-law support
  std::size_t max_badges_per_user = 20;  // upper end; 0 means n_badges
  double adoption_threshold = 1.0;  // copies need at least this fraction of neighbors holding
  double conformity = 1.0;  // copy weight of a badge is (holder fraction)^conformity
  double pioneer = 1.0;     // interest picks discount badges a neighbor holds by this share
};

// Synthetic stand-in for a crawled badge system. Per-user badge counts follow
// a discrete power law on [min_badges_per_user, max_badges_per_user]. Badges
// come in leveled categories, one topic each, and users carry a latent
// interest vector over topics. Users act at a rate proportional to their
// count. With probability `homophily` an act copies a badge held by at least
// `adoption_threshold` of the user's neighbors (by any neighbor when homophily
// is 1); otherwise the user levels up a started category or picks by
// interest, avoiding badges its neighbors hold (`pioneer`). When homophily is
// 1 a user with nothing to copy stalls until a neighbor achieves something
// new. Timestamps are strictly increasing. Pure function of the config.
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace badgesim
