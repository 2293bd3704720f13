#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "badgesim/dataset_io.hpp"
#include "badgesim/error.hpp"
#include "badgesim/evaluation.hpp"
#include "badgesim/game.hpp"
#include "badgesim/inference.hpp"
#include "badgesim/mechanism.hpp"
#include "badgesim/peer_fit.hpp"
#include "badgesim/rules_io.hpp"
#include "badgesim/sequence_mining.hpp"
#include "badgesim/synthetic.hpp"
#include "badgesim/value_model.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace badgesim;
using nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNotConverged = 4;

struct Invocation {
  cli::RunConfig config;
  std::string hash;
  std::string out;
  std::size_t jobs = 1;
  bool strict = false;
};

// Thrown after outputs are written when --strict sees a non-converged run.
struct NotConverged {
  std::string message;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

ordered_json config_record(const Invocation& inv) {
  ordered_json j;
  j["config_hash"] = inv.hash;
  auto& cfg = j["config"] = ordered_json::object();
  std::istringstream lines(cli::canonical_text(inv.config));
  std::string line;
  while (std::getline(lines, line)) {
    auto eq = line.find('=');
    cfg[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

// Formats without a place for metadata get a run.json next to them.
void write_sidecar(const Invocation& inv, const fs::path& target) {
  if (inv.out.empty() || inv.out == "-") return;
  fs::path sidecar = fs::is_directory(target) ? target / "run.json" : fs::path(target.string() + ".run.json");
  write_text(sidecar.string(), config_record(inv).dump(2) + "\n");
}

std::string csv_with_hash(const Invocation& inv, const std::string& csv) {
  return "# config_hash=" + inv.hash + "\n" + csv;
}

std::string json_with_hash(const Invocation& inv, const std::string& json) {
  auto parsed = ordered_json::parse(json);
  ordered_json j;
  j["config_hash"] = inv.hash;
  for (auto it = parsed.begin(); it != parsed.end(); ++it) j[it.key()] = it.value();
  return j.dump(2) + "\n";
}

Dataset load_input(const Invocation& inv) {
  if (inv.config.data.empty()) return generate_synthetic(cli::synthetic_config(inv.config));
  return load_dataset(DatasetPaths::in_directory(inv.config.data));
}

struct GameSetup {
  Dataset data;
  std::unique_ptr<ValueModel> values;
  InferredParams params;
};

// Rare badges are dropped, then values and parameters are fitted on the
// whole remaining history.
GameSetup game_setup(const Invocation& inv) {
  GameSetup s;
  s.data = filter_rare_badges(load_input(inv), inv.config.min_achievers);
  if (s.data.badge_count() == 0) throw DataError("no badge has min_achievers achievers");
  s.values = std::make_unique<ValueModel>(ValueModel::build(s.data, cli::value_config(inv.config, inv.jobs)));
  s.params = infer_params(s.data, cli::inference_options(inv.config));
  return s;
}

Mechanism chosen_mechanism(const Invocation& inv, const GameSetup& s) {
  if (inv.config.mechanism == "uniform") return Mechanism::uniform(s.data.badge_count(), inv.config.theta);
  return Mechanism::all_badges(s.params.thresholds.theta);
}

void check_converged(const Invocation& inv, bool converged, const std::string& what) {
  if (inv.strict && !converged) throw NotConverged{what + " did not converge within max_rounds"};
}

void cmd_synth(const Invocation& inv) {
  if (inv.out.empty()) throw ConfigError("synth needs --out DIR");
  Dataset d = generate_synthetic(cli::synthetic_config(inv.config));
  fs::create_directories(inv.out);
  write_dataset(d, DatasetPaths::in_directory(inv.out));
  write_sidecar(inv, inv.out);
}

void cmd_ingest(const Invocation& inv) {
  if (inv.config.data.empty()) throw ConfigError("ingest needs --data DIR");
  Dataset d = load_dataset(DatasetPaths::in_directory(inv.config.data));
  if (!inv.out.empty()) {
    fs::create_directories(inv.out);
    write_dataset(d, DatasetPaths::in_directory(inv.out));
    write_sidecar(inv, inv.out);
    return;
  }
  ordered_json j;
  j["config_hash"] = inv.hash;
  j["users"] = d.user_count();
  j["badges"] = d.badge_count();
  j["events"] = d.event_count();
  j["follows"] = d.graph().edges().size();
  write_text("", j.dump(2) + "\n");
}

Dataset training_split(const Invocation& inv) {
  Dataset d = filter_rare_badges(load_input(inv), inv.config.min_achievers);
  return temporal_split(d, inv.config.split_fraction).train;
}

void cmd_fit(const Invocation& inv) {
  Dataset train = training_split(inv);
  PeerCurvePoints points = empirical_ratio_curve(train);
  PeerFit fit = fit_peer_function(points, *parse_peer_family(inv.config.peer_family));
  ordered_json j;
  j["config_hash"] = inv.hash;
  j["family"] = std::string(to_string(fit.model.family));
  j["omega"] = fit.model.omega;
  j["objective"] = fit.objective;
  j["converged"] = fit.converged;
  j["curve"] = {{"x", points.x}, {"y", points.y}};
  write_text(inv.out, j.dump(2) + "\n");
}

void cmd_mine(const Invocation& inv) {
  Dataset train = training_split(inv);
  auto sequences = build_sequences(train);
  std::size_t support =
      inv.config.min_support == 0 ? default_min_support(train.user_count()) : inv.config.min_support;
  auto patterns = prefixspan(sequences, support, inv.config.max_len, inv.jobs);
  auto rules = generate_rules(patterns, {inv.config.base_rate_rules, sequences.size()});
  std::ostringstream out;
  write_rules(rules, train, out);
  write_text(inv.out, out.str());
  write_sidecar(inv, inv.out);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void cmd_eval(const Invocation& inv) {
  Dataset d = load_input(inv);
  auto scorers = default_scorers();
  EvalReport report = run_protocol(d, scorers, cli::protocol_config(inv.config, inv.jobs));
  if (ends_with(inv.out, ".csv")) {
    write_text(inv.out, csv_with_hash(inv, report_to_csv(report)));
  } else {
    write_text(inv.out, report_to_json(report, inv.hash));
  }
}

void cmd_equilibrium(const Invocation& inv) {
  GameSetup s = game_setup(inv);
  BadgeGame game(*s.values, s.params, chosen_mechanism(inv, s));
  auto opts = cli::dynamics_options(inv.config);
  EquilibriumResult eq = run_dynamics(game, opts);
  auto nash = epsilon_nash_check(game, eq, inv.config.resolution * static_cast<double>(game.badge_count()),
                                 opts.best_response);
  auto j = ordered_json::parse(json_with_hash(inv, equilibrium_to_json(eq, s.data)));
  j["total_contribution"] = contribution_report(game, eq).total;
  j["nash"] = {{"max_improvement", nash.max_improvement}, {"passed", nash.passed}};
  write_text(inv.out, j.dump(2) + "\n");
  check_converged(inv, eq.converged, "equilibrium");
}

std::vector<std::size_t> topk_grid(const std::vector<double>& grid) {
  std::vector<std::size_t> ks;
  for (double k : grid) ks.push_back(static_cast<std::size_t>(k));
  return ks;
}

void cmd_sweep(const Invocation& inv) {
  GameSetup s = game_setup(inv);
  auto grid = cli::parse_grid(inv.config.grid);
  auto opts = cli::dynamics_options(inv.config);
  SweepCurve curve;
  if (inv.config.param == "threshold") {
    curve = sweep_thresholds(*s.values, s.params, grid, opts, inv.jobs);
  } else {
    BadgeGame game(*s.values, s.params, chosen_mechanism(inv, s));
    EquilibriumResult eq = run_dynamics(game, opts);
    auto ks = topk_grid(grid);
    curve = sweep_topk(contribution_report(game, eq).per_badge, ks);
    for (auto& p : curve.points) {
      p.converged = eq.converged;
      p.rounds = eq.rounds;
    }
  }
  write_text(inv.out, csv_with_hash(inv, sweep_to_csv(curve)));
  bool all = true;
  for (const auto& p : curve.points) all = all && p.converged;
  check_converged(inv, all, "sweep");
}

void cmd_rank(const Invocation& inv) {
  GameSetup s = game_setup(inv);
  auto opts = cli::dynamics_options(inv.config);
  Mechanism base = chosen_mechanism(inv, s);
  ContributionReport report;
  std::vector<RankedBadge> ranking;
  if (inv.config.re_equilibrate) {
    report = dominant_category_set(*s.values, s.params, base, inv.config.topk, true, opts);
    ranking = rank_categories(report.per_badge, report.mechanism.badges.size());
  } else {
    BadgeGame game(*s.values, s.params, base);
    EquilibriumResult eq = run_dynamics(game, opts);
    report = contribution_report(game, eq);
    ranking = rank_categories(report.per_badge, inv.config.topk);
  }
  write_text(inv.out, csv_with_hash(inv, ranking_to_csv(ranking, s.data)));
  check_converged(inv, report.converged, "rank");
}

void fail(int code, const std::string& kind, const std::string& message) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
  std::exit(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Badge achievement modeling and mechanism evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::string out;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  bool strict = false;
  app.add_option("--config", config_file, "Flat key = value config file");
  app.add_option("--out", out, "Output file or directory (stdout when omitted)");
  app.add_option("--jobs", jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "Exit 4 when dynamics do not converge");

  std::map<std::string, std::string> flag_values;
  for (const auto& key : cli::config_keys()) {
    app.add_option("--" + key, flag_values[key], "Config key " + key);
  }

  using Command = void (*)(const Invocation&);
  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands = {
      {"synth", {"Generate a synthetic dataset into --out DIR", cmd_synth}},
      {"ingest", {"Validate a dataset directory and optionally rewrite it canonically", cmd_ingest}},
      {"fit", {"Fit the peer-leadership curve on the training split", cmd_fit}},
      {"mine", {"Mine sequential rules on the training split", cmd_mine}},
      {"eval", {"Score held-out pairs and report AUC per scorer", cmd_eval}},
      {"equilibrium", {"Solve the user game under the inferred mechanism", cmd_equilibrium}},
      {"sweep", {"Total contribution over a threshold or top-K grid", cmd_sweep}},
      {"rank", {"Badges ranked by equilibrium contribution", cmd_rank}},
  };
  Command chosen = nullptr;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->fallthrough();
    Command fn = entry.second;
    sub->callback([&chosen, fn] { chosen = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail(kExitConfig, "config", e.what());
  }

  try {
    Invocation inv;
    std::map<std::string, std::string> assignments;
    if (!config_file.empty()) assignments = cli::read_config_file(config_file);
    for (const auto& [key, value] : flag_values) {
      if (app.count("--" + key) > 0) assignments[key] = value;
    }
    cli::apply_assignments(inv.config, assignments);
    cli::validate(inv.config);
    inv.hash = cli::config_hash(inv.config);
    inv.out = out;
    inv.jobs = jobs;
    inv.strict = strict;
    chosen(inv);
  } catch (const NotConverged& e) {
    fail(kExitNotConverged, "not_converged", e.message);
  } catch (const ConfigError& e) {
    fail(kExitConfig, "config", e.what());
  } catch (const ParseError& e) {
    fail(kExitData, "data", e.what());
  } catch (const DataError& e) {
    fail(kExitData, "data", e.what());
  } catch (const std::exception& e) {
    fail(1, "internal", e.what());
  }
  return 0;
}
