#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "badgesim/evaluation.hpp"
#include "badgesim/game.hpp"
#include "badgesim/synthetic.hpp"

namespace badgesim::cli {

// Every tunable of every pipeline. The flat text form is one `key = value`
// per line; `#` starts a comment.
struct RunConfig {
  std::string data;  // dataset directory; empty means synthetic from the synth keys
  std::uint64_t seed = 1;

  // synth
  std::size_t n_users = 500;
  std::size_t n_badges = 100;
  double powerlaw_exponent = 2.5;
  double homophily = 0.7;

  // protocol
  double split_fraction = 0.9;
  std::size_t min_achievers = 100;

  // value models
  std::string peer_family = "quadratic";
  double alpha = 1.0 / 3.0;
  double beta = 1.0 / 3.0;
  std::size_t min_support = 0;
  std::size_t max_len = 5;
  bool base_rate_rules = false;
  double trend_fallback = 0.0;

  // inference
  double ability_mix = 0.85;
  bool collapse_levels = true;
  std::string threshold_mode = "index-ratio";
  double eta_cap = 10.0;
  double unachieved_threshold = 10.0;

  // game and mechanisms
  double resolution = 1e-3;
  std::size_t max_rounds = 50;
  std::string refresh = "per-update";
  // Mechanism for equilibrium, rank and top-K sweeps: every badge at its
  // inferred threshold, or every badge at `theta`.
  std::string mechanism = "inferred";
  double theta = 0.1;
  std::string param = "threshold";
  std::string grid = "0:1:0.1";
  std::size_t topk = 10;
  bool re_equilibrate = false;
};

// Keys in canonical order.
const std::vector<std::string>& config_keys();

// Applies `key = value` assignments. Unknown keys and malformed values are
// collected and thrown together as one ConfigError.
void apply_assignments(RunConfig& config, const std::map<std::string, std::string>& values);

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Cross-field checks; throws one ConfigError naming every violated field.
void validate(const RunConfig& config);

// Canonical `key=value` lines in key order.
std::string canonical_text(const RunConfig& config);
// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// "lo:hi:step" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

SyntheticConfig synthetic_config(const RunConfig& config);
ValueModelConfig value_config(const RunConfig& config, std::size_t jobs);
InferenceOptions inference_options(const RunConfig& config);
DynamicsOptions dynamics_options(const RunConfig& config);
ProtocolConfig protocol_config(const RunConfig& config, std::size_t jobs);

}  // namespace badgesim::cli
