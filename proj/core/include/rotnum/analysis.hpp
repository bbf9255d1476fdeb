#pragma once

// Regularity of E -> rho(E): log-log Holder fits, and the Morse-Smale
// example whose rotation number is not Holder at E = 0.

#include <cstdint>
#include <optional>
#include <vector>

#include "rotnum/rotation.hpp"

namespace rotnum {

struct CurvePoint {
  double e = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

enum class PairRule {
  adjacent,  // consecutive grid points
  anchored,  // every point against the first
  all,       // every pair
};

struct HolderPair {
  double delta_e = 0.0;
  double delta_value = 0.0;  // |difference|
  double std_error = 0.0;
};

struct HolderFit {
  std::vector<HolderPair> pairs;  // pairs that entered the fit
  double fitted_alpha = 0.0;
  double intercept = 0.0;
  double fit_r2 = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

struct HolderFitOptions {
  PairRule rule = PairRule::adjacent;
  double signal_sigmas = 4.0;
  std::optional<double> delta_min;
  std::optional<double> delta_max;
};

/// Slope of log|d value| against log dE over pairs whose difference exceeds
/// signal_sigmas combined standard errors. Needs at least 6 points and
/// 5 usable pairs (InsufficientSignal otherwise).
HolderFit holder_fit(std::vector<CurvePoint> curve, const HolderFitOptions& opt = {});

/// M(M+1) - j(j+1).
double walk_expected_hitting_exact(std::int64_t m, std::int64_t j);

/// Mean time for a fair +-1 walk from j to reach m, with steps below 0 held at 0.
Estimate walk_expected_hitting_mc(std::int64_t m, std::int64_t j, std::int64_t trials,
                                  std::uint64_t seed, unsigned workers = 1);

struct Example53Config {
  double s = 0.5;
  std::vector<double> e_grid{0.0, 1e-2, 1e-3, 1e-4, 1e-5};
  std::int64_t n = 10000000;
  std::int64_t burn_in = 10000;
  int replicas = 16;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct Example53FixedPoints {
  double a1, r1;  // attractor and repeller of R_E o f
  double a2, r2;  // attractor and repeller of R_E o f^{-1}
};

struct Example53Row {
  double e = 0.0;
  double rho = 0.0;
  double std_error = 0.0;
  std::int64_t m_e = 0;         // 0 when E = 0
  double compensated = 0.0;     // rho * log(1/E)^2, 0 when E = 0
};

/// Fixed points of both maps in [0,1), found by bisection of g(y) - y.
/// Throws RootFindingError when a map has no fixed point.
Example53FixedPoints example53_fixed_points(double s, double e);

/// min{j : f^j(A_2) in [R_2, A_1]} on the circle.
std::int64_t example53_m(double s, double e);

std::vector<Example53Row> example53_run(const Example53Config& config);

}  // namespace rotnum
