// Acceptance run: one PASS/FAIL line per criterion, measured values inline.
// Exit status is the number of failed criteria.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "badgesim/evaluation.hpp"
#include "badgesim/game.hpp"
#include "badgesim/inference.hpp"
#include "badgesim/mechanism.hpp"
#include "badgesim/peer_fit.hpp"
#include "badgesim/rng.hpp"
#include "badgesim/sequence_mining.hpp"
#include "badgesim/synthetic.hpp"
#include "badgesim/value_model.hpp"
#include "oracles.hpp"

using namespace badgesim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << "C" << id << " " << (o.pass ? "PASS" : "FAIL") << " " << name << ": " << o.detail << std::endl;
}

// Synthetic game of the acceptance family: every badge kept, values and
// parameters estimated on the whole dataset.
struct Family {
  Dataset data;
  std::unique_ptr<ValueModel> values;
  InferredParams params;

  explicit Family(std::uint64_t seed) {
    SyntheticConfig c;
    c.n_users = 500;
    c.n_badges = 100;
    c.seed = seed;
    data = generate_synthetic(c);
    values = std::make_unique<ValueModel>(ValueModel::build(data, {}));
    params = infer_params(data, {});
  }
};

Outcome knapsack_oracle() {
  Rng rng(101);
  const BestResponseOptions opts;
  double worst = 0.0;
  double budget_s = 0.0;
  std::size_t bad = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + rng.below(15);
    std::vector<double> values(m), ability(m), theta(m);
    for (std::size_t j = 0; j < m; ++j) {
      values[j] = rng.uniform01();
      ability[j] = rng.bernoulli(0.1) ? 0.0 : 0.05 + 0.95 * rng.uniform01();
      theta[j] = rng.bernoulli(0.1) ? 0.0 : 0.5 * rng.uniform01();
    }
    const double budget = rng.uniform01();

    auto t0 = Clock::now();
    Strategy s = best_response(values, ability, budget, theta, opts);
    budget_s += seconds_since(t0);
    double got = overall_utility(s, values, theta, ability);

    std::vector<double> v, e;
    for (std::size_t j = 0; j < m; ++j) {
      auto need = min_effort(theta[j], ability[j]);
      if (!need) continue;
      v.push_back(values[j]);
      e.push_back(*need);
    }
    double want = oracle::knapsack(v, e, budget).net;
    double gap = std::abs(got - want);
    worst = std::max(worst, gap);
    if (gap > opts.resolution * static_cast<double>(m) || s.total() > budget + 1e-9) ++bad;
  }
  return {bad == 0 && budget_s < 1.0, "200 instances, max |utility - exhaustive| = " + fmt("%.3g", worst) +
                                         ", violations " + std::to_string(bad) + ", solver time " +
                                         fmt("%.3f", budget_s) + " s"};
}

Outcome mining_oracle() {
  Rng rng(202);
  std::size_t bad = 0, patterns = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<BadgeSequence> seqs;
    std::vector<std::vector<int>> plain;
    const std::size_t n = 1 + rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<BadgeIndex> perm = {0, 1, 2, 3, 4, 5, 6, 7};
      rng.shuffle(perm);
      perm.resize(rng.below(7));
      seqs.push_back({static_cast<UserIndex>(i), perm});
      plain.emplace_back(perm.begin(), perm.end());
    }
    const std::size_t support = 1 + rng.below(3);
    const std::size_t max_len = 1 + rng.below(6);
    std::map<std::vector<int>, std::size_t> got;
    for (const auto& p : prefixspan(seqs, support, max_len)) got[{p.items.begin(), p.items.end()}] = p.support;
    auto want = oracle::mine(plain, support, max_len);
    patterns += want.size();
    if (got != want) ++bad;
  }
  return {bad == 0, "100 corpora, " + std::to_string(patterns) + " patterns, mismatching corpora " +
                        std::to_string(bad)};
}

Outcome auc_oracle() {
  Rng rng(303);
  std::size_t bad = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> pos(1 + rng.below(500)), neg(1 + rng.below(500));
    const double coarse = t % 2 == 0 ? 10.0 : 1e6;  // half the sets are tie-heavy
    for (auto& x : pos) x = std::floor(rng.uniform01() * coarse) / coarse + 0.1;
    for (auto& x : neg) x = std::floor(rng.uniform01() * coarse) / coarse;
    if (auc(pos, neg) != oracle::auc(pos, neg)) ++bad;
  }

  SyntheticConfig c;
  c.n_users = 4240;
  Dataset d = generate_synthetic(c);
  ProtocolConfig pc;
  pc.min_achievers = 5;
  std::string randoms;
  bool random_ok = true;
  std::size_t pairs = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto r = run_protocol(d, std::vector<ScorerSpec>{random_scorer(seed)}, pc);
    pairs = r.positives + r.negatives;
    double a = r.scorers[0].auc;
    random_ok = random_ok && pairs >= 2000 && a >= 0.45 && a <= 0.55;
    randoms += (randoms.empty() ? "" : " ") + fmt("%.4f", a);
  }
  return {bad == 0 && random_ok, "exact on " + std::to_string(50 - bad) + "/50 sets; random scorer AUC " + randoms +
                                     " on " + std::to_string(pairs) + " pairs"};
}

Outcome fitting_oracle() {
  Rng rng(404);
  const std::vector<std::pair<PeerFamily, std::vector<std::pair<double, double>>>> boxes = {
      {PeerFamily::kLinear, {{-3, 3}}},
      {PeerFamily::kQuadratic, {{-3, 3}, {-3, 3}}},
      {PeerFamily::kCubic, {{-1, 1}, {-1, 1}, {-1, 1}}},
      {PeerFamily::kExponential, {{-2, 2}, {-5, 5}}},
  };
  std::size_t bad = 0;
  double slack = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 20; ++t) {
    std::array<double, kPeerBins> y{};
    double s = 0.0;
    for (auto& v : y) s += (v = rng.uniform01());
    for (auto& v : y) v /= s;
    auto pts = PeerCurvePoints::from_y(y);
    for (const auto& [family, box] : boxes) {
      double got = fit_peer_function(pts, family).objective;
      double grid = oracle::grid_fit_objective(pts, family, box, 0.01);
      slack = std::max(slack, got - grid);
      if (got > grid + 1e-6) ++bad;
    }
  }
  auto fig = PeerCurvePoints::from_y({0.55, 0.12, 0.06, 0.04, 0.03, 0.02, 0.02, 0.02, 0.02, 0.02, 0.10});
  double lin = fit_peer_function(fig, PeerFamily::kLinear).objective;
  double quad = fit_peer_function(fig, PeerFamily::kQuadratic).objective;
  return {bad == 0 && quad <= lin, "80 fits, max (fit - grid) = " + fmt("%.3g", slack) + ", violations " +
                                       std::to_string(bad) + "; skewed fixture quadratic " + fmt("%.4f", quad) +
                                       " vs linear " + fmt("%.4f", lin)};
}

Outcome equilibrium_validity() {
  auto t0 = Clock::now();
  std::size_t converged = 0, nash_fail = 0;
  double worst_gain = 0.0;
  std::string rounds;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Family f(seed);
    BadgeGame game(*f.values, f.params, Mechanism::uniform(f.data.badge_count(), 0.1));
    DynamicsOptions opts;
    opts.seed = seed;
    auto eq = run_dynamics(game, opts);
    rounds += (rounds.empty() ? "" : ",") + std::to_string(eq.rounds);
    if (!eq.converged) continue;
    ++converged;
    double eps = opts.best_response.resolution * static_cast<double>(game.badge_count());
    auto nash = epsilon_nash_check(game, eq, eps, opts.best_response);
    worst_gain = std::max(worst_gain, nash.max_improvement);
    if (!nash.passed) ++nash_fail;
  }
  double secs = seconds_since(t0);
  return {converged >= 9 && nash_fail == 0 && secs < 60.0,
          std::to_string(converged) + "/10 converged (rounds " + rounds + "), max deviation gain " +
              fmt("%.3g", worst_gain) + ", epsilon-Nash failures " + std::to_string(nash_fail) + ", " +
              fmt("%.1f", secs) + " s"};
}

Outcome threshold_sweep() {
  Family f(1);
  auto t0 = Clock::now();
  auto grid = threshold_grid(0.0, 1.0, 0.1);
  auto curve = sweep_thresholds(*f.values, f.params, grid, {}, 1);
  double secs = seconds_since(t0);
  std::string totals;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    totals += (i ? " " : "") + fmt("%.2f", curve.points[i].total);
    if (curve.points[i].total > curve.points[argmax].total) argmax = i;
  }
  const auto& p = curve.points;
  bool interior = argmax > 0 && argmax + 1 < p.size() && p[argmax].total > 0.0;
  return {p.size() == 11 && p.front().total == 0.0 && p.back().total == 0.0 && interior && secs < 600.0,
          "totals [" + totals + "], max at theta " + fmt("%.1f", grid[argmax]) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome topk_curve() {
  const std::vector<std::size_t> ks = {1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 100};
  bool ok = true;
  std::string shape;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Family f(seed);
    BadgeGame game(*f.values, f.params, Mechanism::uniform(f.data.badge_count(), 0.1));
    DynamicsOptions opts;
    opts.seed = seed;
    auto report_ = contribution_report(game, run_dynamics(game, opts));
    auto curve = sweep_topk(report_.per_badge, ks);
    const auto& p = curve.points;
    // Marginal gain per added badge between consecutive K.
    double last_rate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
      double prev = i ? p[i - 1].total : 0.0;
      double width = static_cast<double>(ks[i] - (i ? ks[i - 1] : 0));
      double rate = (p[i].total - prev) / width;
      if (p[i].total < prev || rate > last_rate + 1e-12) ok = false;
      last_rate = rate;
    }
    ok = ok && p.back().total > 0.0;
    shape += (shape.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " K=1 " +
             fmt("%.2f", p.front().total) + " K=10 " + fmt("%.2f", p[5].total) + " K=100 " + fmt("%.2f", p.back().total);
  }
  return {ok, "nondecreasing, concave per added badge: " + shape};
}

Outcome scorer_ordering() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SyntheticConfig c;
    c.seed = seed;
    c.homophily = 0.7;
    c.powerlaw_exponent = 2.5;
    ProtocolConfig pc;
    pc.min_achievers = 5;
    pc.negative_seed = seed;
    pc.inference.ability.seed = seed;
    auto r = run_protocol(generate_synthetic(c), default_scorers(), pc);
    std::map<std::string, double> a;
    for (const auto& s : r.scorers) a[s.name] = s.auc;
    double isolated = std::max({a["v_pi"], a["v_ps"], a["v_nt"]});
    ok = ok && a["v_c"] >= isolated - 0.02 && a["utility"] >= a["v_c"] - 0.02;
    detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " pi " +
              fmt("%.3f", a["v_pi"]) + " ps " + fmt("%.3f", a["v_ps"]) + " nt " + fmt("%.3f", a["v_nt"]) + " c " +
              fmt("%.3f", a["v_c"]) + " u " + fmt("%.3f", a["utility"]);
  }
  return {ok, detail};
}

Outcome inference_invariants() {
  double worst_l1 = 0.0;
  std::size_t infeasible = 0, checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticConfig c;
    c.seed = seed;
    Dataset d = generate_synthetic(c);
    for (auto mode : {ThresholdMode::kIndexRatio, ThresholdMode::kCountRatio}) {
      InferenceOptions o;
      o.ability.seed = seed;
      o.threshold.mode = mode;
      auto p = infer_params(d, o);
      auto group = ability_groups(d, o.ability.collapse_levels);
      for (UserIndex u = 0; u < d.user_count(); ++u) {
        std::vector<bool> seen(d.badge_count(), false);
        double s = 0.0;
        for (BadgeIndex b = 0; b < d.badge_count(); ++b) {
          if (seen[group[b]]) continue;
          seen[group[b]] = true;
          s += p.abilities.at(u, b);
        }
        worst_l1 = std::max(worst_l1, std::abs(s - 1.0));
      }
      for (BadgeIndex b = 0; b < d.badge_count(); ++b) {
        for (UserIndex u : d.achievers(b)) {
          ++checked;
          if (p.abilities.at(u, b) * p.budgets[u] < p.thresholds.theta[b]) ++infeasible;
        }
      }
    }
  }
  return {worst_l1 <= 1e-9 && infeasible == 0, "10 seeds, max |L1 - 1| = " + fmt("%.3g", worst_l1) + ", " +
                                                   std::to_string(infeasible) + " infeasible of " +
                                                   std::to_string(checked) + " achiever checks over both modes"};
}

int shell(const std::string& cmd) {
  int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string tree_digest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    std::ifstream in(dir / f, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    all += f.string() + "\n" + s.str() + "\n";
  }
  return all;
}

Outcome cli_determinism() {
  const std::string cli = BADGESIM_CLI;
  const fs::path root = fs::temp_directory_path() / "badgesim_acceptance";
  const std::string common = " --seed 4 --min_achievers 5 --jobs 2";
  const std::vector<std::pair<std::string, std::string>> pipelines = {
      {"synth", "synth" + common + " --out {}/data"},
      {"fit", "fit" + common + " --out {}/fit.json"},
      {"mine", "mine" + common + " --out {}/rules.jsonl"},
      {"eval", "eval" + common + " --out {}/eval.json"},
      {"equilibrium", "equilibrium" + common + " --mechanism uniform --out {}/eq.json"},
      {"sweep-threshold", "sweep" + common + " --param threshold --out {}/sweep.csv"},
      {"sweep-topk", "sweep" + common + " --param topk --grid 1,2,3,4,5,10,20 --mechanism uniform --out {}/topk.csv"},
      {"rank", "rank" + common + " --mechanism uniform --topk 10 --re_equilibrate true --out {}/rank.csv"},
  };
  std::vector<std::string> digests;
  for (const char* run : {"a", "b"}) {
    fs::path dir = root / run;
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& [name, args] : pipelines) {
      std::string a = args;
      a.replace(a.find("{}"), 2, dir.string());
      if (int code = shell(cli + " " + a); code != 0) {
        return {false, name + " exited " + std::to_string(code)};
      }
    }
    digests.push_back(tree_digest(dir));
  }
  bool same = digests[0] == digests[1] && !digests[0].empty();
  return {same, std::to_string(pipelines.size()) + " pipelines run twice, outputs " +
                    (same ? "byte-identical" : "differ") + " (" + std::to_string(digests[0].size()) + " bytes)"};
}

}  // namespace

int main() {
  report(1, "best response vs exhaustive subsets", knapsack_oracle);
  report(2, "prefixspan vs brute-force enumeration", mining_oracle);
  report(3, "AUC vs all pairs, random scorer", auc_oracle);
  report(4, "L1 fit vs grid search", fitting_oracle);
  report(5, "equilibrium convergence and epsilon-Nash", equilibrium_validity);
  report(6, "threshold sweep shape", threshold_sweep);
  report(7, "top-K contribution curve", topk_curve);
  report(8, "scorer ordering on planted data", scorer_ordering);
  report(9, "inference invariants", inference_invariants);
  report(10, "CLI determinism", cli_determinism);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures;
}
