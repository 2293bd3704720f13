#include "badgesim/peer_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "badgesim/error.hpp"

namespace badgesim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Solves the n x n system in place by Gaussian elimination with partial
// pivoting. Returns false for a (numerically) singular matrix.
bool solve_dense(std::vector<double>& a, std::vector<double>& rhs, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-12) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * rhs[c];
    rhs[i] = s / a[i * n + i];
  }
  return true;
}

// Exact L1 regression y ~ sum_c coef_c * basis_c(x) over the 11 points: some
// optimal solution interpolates `p` of them, so every p-subset is tried.
struct LadSolution {
  std::vector<double> coef;
  double objective = kInf;
};

template <typename Basis>
LadSolution lad_by_bases(const PeerCurvePoints& pts, std::size_t p, Basis basis) {
  std::array<std::vector<double>, kPeerBins> rows;
  for (std::size_t k = 0; k < kPeerBins; ++k) rows[k] = basis(pts.x[k]);

  LadSolution best;
  std::vector<std::size_t> pick(p);
  for (std::size_t i = 0; i < p; ++i) pick[i] = i;
  std::vector<double> a(p * p), rhs(p);
  while (true) {
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) a[r * p + c] = rows[pick[r]][c];
      rhs[r] = pts.y[pick[r]];
    }
    if (solve_dense(a, rhs, p)) {
      double obj = 0.0;
      for (std::size_t k = 0; k < kPeerBins; ++k) {
        double f = 0.0;
        for (std::size_t c = 0; c < p; ++c) f += rhs[c] * rows[k][c];
        obj += std::abs(f - pts.y[k]);
      }
      if (obj < best.objective) {
        best.objective = obj;
        best.coef = rhs;
      }
    }
    // Next combination in lexicographic order.
    std::size_t i = p;
    while (i > 0 && pick[i - 1] == kPeerBins - p + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < p; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Best (a, c) for a fixed exponential rate b.
LadSolution exponential_for_rate(const PeerCurvePoints& pts, double rate) {
  if (rate == 0.0) {
    // exp(0) is constant: only a + c is identified; put it all in c.
    std::vector<double> ys(pts.y.begin(), pts.y.end());
    double c = median_of(ys);
    LadSolution s;
    s.coef = {0.0, c};
    s.objective = 0.0;
    for (double y : pts.y) s.objective += std::abs(y - c);
    return s;
  }
  return lad_by_bases(pts, 2, [rate](double x) { return std::vector<double>{std::exp(-rate * x), 1.0}; });
}

}  // namespace

PeerCurvePoints PeerCurvePoints::from_y(const std::array<double, kPeerBins>& y) {
  PeerCurvePoints p;
  for (std::size_t k = 0; k < kPeerBins; ++k) p.x[k] = static_cast<double>(k) / 10.0;
  p.y = y;
  return p;
}

std::string_view to_string(PeerFamily family) {
  switch (family) {
    case PeerFamily::kLinear: return "linear";
    case PeerFamily::kQuadratic: return "quadratic";
    case PeerFamily::kCubic: return "cubic";
    case PeerFamily::kExponential: return "exponential";
  }
  return "unknown";
}

std::optional<PeerFamily> parse_peer_family(std::string_view name) {
  for (auto f : {PeerFamily::kLinear, PeerFamily::kQuadratic, PeerFamily::kCubic,
                 PeerFamily::kExponential}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::size_t coefficient_count(PeerFamily family) {
  switch (family) {
    case PeerFamily::kLinear: return 2;
    case PeerFamily::kQuadratic: return 3;
    case PeerFamily::kCubic: return 4;
    case PeerFamily::kExponential: return 3;
  }
  return 0;
}

double PeerLeadershipModel::raw(double x) const {
  const auto& w = omega;
  switch (family) {
    case PeerFamily::kLinear: return w[0] * x + w[1];
    case PeerFamily::kQuadratic: return (w[0] * x + w[1]) * x + w[2];
    case PeerFamily::kCubic: return ((w[0] * x + w[1]) * x + w[2]) * x + w[3];
    case PeerFamily::kExponential: return w[0] * std::exp(-w[1] * x) + w[2];
  }
  return 0.0;
}

double eval_peer_value(const PeerLeadershipModel& model, double ratio) {
  return std::max(0.0, model.raw(ratio));
}

double l1_objective(const PeerLeadershipModel& model, const PeerCurvePoints& points) {
  double s = 0.0;
  for (std::size_t k = 0; k < kPeerBins; ++k) s += std::abs(model.raw(points.x[k]) - points.y[k]);
  return s;
}

PeerFit fit_peer_function(const PeerCurvePoints& points, PeerFamily family,
                          const PeerFitOptions& options) {
  PeerFit fit;
  fit.model.family = family;

  if (family != PeerFamily::kExponential) {
    const std::size_t p = coefficient_count(family);
    // Highest power first, matching the coefficient order of the formulas.
    auto sol = lad_by_bases(points, p, [p](double x) {
      std::vector<double> row(p);
      double v = 1.0;
      for (std::size_t c = p; c-- > 0;) {
        row[c] = v;
        v *= x;
      }
      return row;
    });
    fit.model.omega = sol.coef;
    fit.objective = l1_objective(fit.model, points);
    return fit;
  }

  if (!(options.exp_rate_step > 0.0) || !(options.exp_rate_bound > 0.0)) {
    throw ConfigError("exponential fit needs a positive rate grid");
  }
  const auto steps = static_cast<long>(std::llround(options.exp_rate_bound / options.exp_rate_step));
  double best_rate = 0.0;
  LadSolution best = exponential_for_rate(points, 0.0);
  for (long i = -steps; i <= steps; ++i) {
    double rate = static_cast<double>(i) * options.exp_rate_step;
    auto s = exponential_for_rate(points, rate);
    if (s.objective < best.objective) {
      best = s;
      best_rate = rate;
    }
  }

  // Golden-section refinement inside the neighboring grid cells.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_rate - options.exp_rate_step;
  double hi = best_rate + options.exp_rate_step;
  auto g = [&points](double rate) { return exponential_for_rate(points, rate).objective; };
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  int it = 0;
  for (; it < options.refine_iterations && hi - lo > 1e-10; ++it) {
    if (g1 <= g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = g(x2);
    }
  }
  fit.converged = hi - lo <= 1e-10;
  double mid = 0.5 * (lo + hi);
  auto refined = exponential_for_rate(points, mid);
  if (refined.objective < best.objective) {
    best = refined;
    best_rate = mid;
  }
  fit.model.omega = {best.coef[0], best_rate, best.coef[1]};
  fit.objective = l1_objective(fit.model, points);
  return fit;
}

std::string peer_model_to_json(const PeerLeadershipModel& model) {
  nlohmann::ordered_json j;
  j["family"] = std::string(to_string(model.family));
  j["omega"] = model.omega;
  return j.dump();
}

PeerLeadershipModel peer_model_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    auto family = parse_peer_family(j.at("family").get<std::string>());
    if (!family) throw DataError("unknown peer family");
    PeerLeadershipModel m{*family, j.at("omega").get<std::vector<double>>()};
    if (m.omega.size() != coefficient_count(*family)) {
      throw DataError("peer model has the wrong number of coefficients");
    }
    for (double w : m.omega) {
      if (!std::isfinite(w)) throw DataError("peer model coefficient is not finite");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad peer model JSON: ") + e.what());
  }
}

}  // namespace badgesim
