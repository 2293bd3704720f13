#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace badgesim {

inline constexpr std::size_t kPeerBins = 11;

// Fraction of achievements per friend-ratio bin; x_k = k / 10.
struct PeerCurvePoints {
  std::array<double, kPeerBins> x{};
  std::array<double, kPeerBins> y{};

  static PeerCurvePoints from_y(const std::array<double, kPeerBins>& y);
};

enum class PeerFamily { kLinear, kQuadratic, kCubic, kExponential };

std::string_view to_string(PeerFamily family);
std::optional<PeerFamily> parse_peer_family(std::string_view name);
std::size_t coefficient_count(PeerFamily family);

// Coefficients in the order of the family formula:
//   linear       a*x + b
//   quadratic    a*x^2 + b*x + c
//   cubic        a*x^3 + b*x^2 + c*x + d
//   exponential  a*exp(-b*x) + c
struct PeerLeadershipModel {
  PeerFamily family = PeerFamily::kQuadratic;
  std::vector<double> omega;

  // Unclamped family formula.
  double raw(double ratio) const;
};

// f(ratio; omega) clamped below at 0.
double eval_peer_value(const PeerLeadershipModel& model, double ratio);

// Sum over bins of |f(x_k) - y_k|.
double l1_objective(const PeerLeadershipModel& model, const PeerCurvePoints& points);

struct PeerFitOptions {
  double exp_rate_bound = 20.0;  // grid over b in [-bound, bound]
  double exp_rate_step = 0.01;
  int refine_iterations = 100;
};

struct PeerFit {
  PeerLeadershipModel model;
  double objective = 0.0;
  bool converged = true;  // false if the exponential refinement hit its cap
};

// Least-absolute-deviation fit over the 11 points. Polynomial families are
// solved exactly by enumerating interpolating bases (an LP vertex search);
// the exponential family grids over the rate b, solves (a, c) exactly for
// each b, then refines b by golden-section search around the best grid
// point.
PeerFit fit_peer_function(const PeerCurvePoints& points, PeerFamily family,
                          const PeerFitOptions& options = {});

// {"family": str, "omega": [float]}
std::string peer_model_to_json(const PeerLeadershipModel& model);
PeerLeadershipModel peer_model_from_json(std::string_view text);

}  // namespace badgesim
