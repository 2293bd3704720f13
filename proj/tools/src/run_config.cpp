#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "badgesim/error.hpp"
#include "badgesim/mechanism.hpp"

namespace badgesim::cli {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_size(const std::string& s, std::size_t& out) {
  std::uint64_t v = 0;
  if (!parse_u64(s, v)) return false;
  out = static_cast<std::size_t>(v);
  return true;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0") {
    out = false;
    return true;
  }
  return false;
}

struct Field {
  std::function<bool(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field field(T RunConfig::*member) {
  Field f;
  if constexpr (std::is_same_v<T, double>) {
    f.set = [member](RunConfig& c, const std::string& s) { return parse_real(s, c.*member); };
    f.get = [member](const RunConfig& c) { return format_double(c.*member); };
  } else if constexpr (std::is_same_v<T, bool>) {
    f.set = [member](RunConfig& c, const std::string& s) { return parse_bool(s, c.*member); };
    f.get = [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); };
  } else if constexpr (std::is_same_v<T, std::string>) {
    f.set = [member](RunConfig& c, const std::string& s) {
      c.*member = s;
      return true;
    };
    f.get = [member](const RunConfig& c) { return c.*member; };
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    f.set = [member](RunConfig& c, const std::string& s) { return parse_u64(s, c.*member); };
    f.get = [member](const RunConfig& c) { return std::to_string(c.*member); };
  } else {
    f.set = [member](RunConfig& c, const std::string& s) { return parse_size(s, c.*member); };
    f.get = [member](const RunConfig& c) { return std::to_string(c.*member); };
  }
  return f;
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"data", field(&RunConfig::data)},
      {"seed", field(&RunConfig::seed)},
      {"n_users", field(&RunConfig::n_users)},
      {"n_badges", field(&RunConfig::n_badges)},
      {"powerlaw_exponent", field(&RunConfig::powerlaw_exponent)},
      {"homophily", field(&RunConfig::homophily)},
      {"split_fraction", field(&RunConfig::split_fraction)},
      {"min_achievers", field(&RunConfig::min_achievers)},
      {"peer_family", field(&RunConfig::peer_family)},
      {"alpha", field(&RunConfig::alpha)},
      {"beta", field(&RunConfig::beta)},
      {"min_support", field(&RunConfig::min_support)},
      {"max_len", field(&RunConfig::max_len)},
      {"base_rate_rules", field(&RunConfig::base_rate_rules)},
      {"trend_fallback", field(&RunConfig::trend_fallback)},
      {"ability_mix", field(&RunConfig::ability_mix)},
      {"collapse_levels", field(&RunConfig::collapse_levels)},
      {"threshold_mode", field(&RunConfig::threshold_mode)},
      {"eta_cap", field(&RunConfig::eta_cap)},
      {"unachieved_threshold", field(&RunConfig::unachieved_threshold)},
      {"resolution", field(&RunConfig::resolution)},
      {"max_rounds", field(&RunConfig::max_rounds)},
      {"refresh", field(&RunConfig::refresh)},
      {"mechanism", field(&RunConfig::mechanism)},
      {"theta", field(&RunConfig::theta)},
      {"param", field(&RunConfig::param)},
      {"grid", field(&RunConfig::grid)},
      {"topk", field(&RunConfig::topk)},
      {"re_equilibrate", field(&RunConfig::re_equilibrate)},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_assignments(RunConfig& config, const std::map<std::string, std::string>& values) {
  std::vector<std::string> problems;
  for (const auto& [key, value] : values) {
    auto it = fields().find(key);
    if (it == fields().end()) {
      problems.push_back(key + ": unknown key");
    } else if (!it->second.set(config, value)) {
      problems.push_back(key + ": cannot parse '" + value + "'");
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration";
    for (const auto& p : problems) msg += "; " + p;
    throw ConfigError(msg);
  }
}

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

void validate(const RunConfig& c) {
  std::vector<std::string> problems;
  auto need = [&](bool ok, const char* what) {
    if (!ok) problems.emplace_back(what);
  };
  need(c.n_users >= 1, "n_users: must be >= 1");
  need(c.n_badges >= 1, "n_badges: must be >= 1");
  need(c.powerlaw_exponent > 1.0, "powerlaw_exponent: must exceed 1");
  need(c.homophily >= 0.0 && c.homophily <= 1.0, "homophily: must lie in [0, 1]");
  need(c.split_fraction > 0.0 && c.split_fraction < 1.0, "split_fraction: must lie in (0, 1)");
  need(parse_peer_family(c.peer_family).has_value(),
       "peer_family: must be linear, quadratic, cubic or exponential");
  need(c.alpha >= 0.0, "alpha: must be >= 0");
  need(c.beta >= 0.0, "beta: must be >= 0");
  need(c.alpha + c.beta <= 1.0 + 1e-12, "alpha, beta: alpha + beta must be <= 1");
  need(c.max_len >= 1, "max_len: must be >= 1");
  need(c.ability_mix >= 0.0 && c.ability_mix <= 1.0, "ability_mix: must lie in [0, 1]");
  need(parse_threshold_mode(c.threshold_mode).has_value(), "threshold_mode: must be count-ratio or index-ratio");
  need(c.eta_cap > 0.0, "eta_cap: must be > 0");
  need(c.unachieved_threshold >= 0.0, "unachieved_threshold: must be >= 0");
  need(c.resolution > 0.0, "resolution: must be > 0");
  need(c.max_rounds >= 1, "max_rounds: must be >= 1");
  need(c.refresh == "per-update" || c.refresh == "per-round", "refresh: must be per-update or per-round");
  need(c.param == "threshold" || c.param == "topk", "param: must be threshold or topk");
  need(c.mechanism == "inferred" || c.mechanism == "uniform", "mechanism: must be inferred or uniform");
  need(c.theta >= 0.0, "theta: must be >= 0");
  need(c.topk >= 1, "topk: must be >= 1");
  try {
    auto g = parse_grid(c.grid);
    if (c.param == "topk") {
      for (double k : g) {
        if (k < 1.0 || k != std::floor(k)) throw ConfigError("top-K grid values must be positive integers");
      }
    } else {
      for (double t : g) {
        if (t < 0.0) throw ConfigError("threshold grid values must be >= 0");
      }
    }
  } catch (const ConfigError& e) {
    problems.push_back(std::string("grid: ") + e.what());
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration";
    for (const auto& p : problems) msg += "; " + p;
    throw ConfigError(msg);
  }
}

std::string canonical_text(const RunConfig& config) {
  std::string out;
  for (const auto& [key, f] : fields()) out += key + "=" + f.get(config) + "\n";
  return out;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_text(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
      double v = 0.0;
      if (!parse_real(trim(item), v)) throw ConfigError("bad grid '" + text + "'");
      parts.push_back(v);
    }
    if (parts.size() != 3) throw ConfigError("grid needs lo:hi:step, got '" + text + "'");
    return threshold_grid(parts[0], parts[1], parts[2]);
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_real(trim(item), v)) throw ConfigError("bad grid '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty grid");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw ConfigError("grid values must increase");
  }
  return out;
}

SyntheticConfig synthetic_config(const RunConfig& c) {
  SyntheticConfig s;
  s.n_users = c.n_users;
  s.n_badges = c.n_badges;
  s.powerlaw_exponent = c.powerlaw_exponent;
  s.homophily = c.homophily;
  s.seed = c.seed;
  return s;
}

ValueModelConfig value_config(const RunConfig& c, std::size_t jobs) {
  ValueModelConfig v;
  v.family = *parse_peer_family(c.peer_family);
  v.weights = {c.alpha, c.beta};
  v.min_support = c.min_support;
  v.max_len = c.max_len;
  v.base_rate_rules = c.base_rate_rules;
  v.trend_fallback = c.trend_fallback;
  v.jobs = jobs;
  return v;
}

InferenceOptions inference_options(const RunConfig& c) {
  InferenceOptions o;
  o.ability.mix = c.ability_mix;
  o.ability.seed = c.seed;
  o.ability.collapse_levels = c.collapse_levels;
  o.threshold.mode = *parse_threshold_mode(c.threshold_mode);
  o.threshold.eta_cap = c.eta_cap;
  o.threshold.unachieved_threshold = c.unachieved_threshold;
  return o;
}

DynamicsOptions dynamics_options(const RunConfig& c) {
  DynamicsOptions d;
  d.max_rounds = c.max_rounds;
  d.seed = c.seed;
  d.refresh = c.refresh == "per-round" ? ValueRefresh::kPerRound : ValueRefresh::kPerUpdate;
  d.best_response.resolution = c.resolution;
  return d;
}

ProtocolConfig protocol_config(const RunConfig& c, std::size_t jobs) {
  ProtocolConfig p;
  p.train_fraction = c.split_fraction;
  p.min_achievers = c.min_achievers;
  p.negative_seed = c.seed;
  p.values = value_config(c, jobs);
  p.inference = inference_options(c);
  p.jobs = jobs;
  return p;
}

}  // namespace badgesim::cli
