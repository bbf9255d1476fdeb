#include "rotnum/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rotnum/errors.hpp"
#include "rotnum/parallel.hpp"

namespace rotnum {

namespace {

constexpr int kRootScanCells = 256;
constexpr int kBisectionSteps = 80;
constexpr std::int64_t kMaxOrbitSteps = 10000000;

struct Root {
  double y;
  bool attracting;
};

std::vector<Root> fixed_points(const LiftedCircleMap& g) {
  const auto h = [&g](double y) { return g.eval(y) - y; };
  std::vector<Root> roots;
  double lo = 0.0;
  double h_lo = h(lo);
  for (int k = 1; k <= kRootScanCells; ++k) {
    const double hi = static_cast<double>(k) / kRootScanCells;
    const double h_hi = h(hi);
    if (h_lo == 0.0) {
      roots.push_back({lo, g.deriv(lo) < 1.0});
    } else if (h_hi != 0.0 && (h_lo < 0.0) != (h_hi < 0.0)) {
      double a = lo, b = hi;
      const bool rising = h_lo < 0.0;
      for (int it = 0; it < kBisectionSteps; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        ((h(mid) < 0.0) == rising ? a : b) = mid;
      }
      const double y = 0.5 * (a + b);
      roots.push_back({circle_point(y), g.deriv(y) < 1.0});
    }
    lo = hi;
    h_lo = h_hi;
  }
  return roots;
}

void split_roots(const std::vector<Root>& roots, double& attractor, double& repeller,
                 const char* which) {
  int na = 0, nr = 0;
  for (const auto& r : roots) {
    if (r.attracting) {
      attractor = r.y;
      ++na;
    } else {
      repeller = r.y;
      ++nr;
    }
  }
  if (na != 1 || nr != 1) {
    throw RootFindingError(std::string("expected one attractor and one repeller for ") + which +
                           ", found " + std::to_string(na) + " and " + std::to_string(nr));
  }
}

}  // namespace

HolderFit holder_fit(std::vector<CurvePoint> curve, const HolderFitOptions& opt) {
  if (curve.size() < 6) throw ParameterError("holder_fit needs at least 6 energy points");
  std::sort(curve.begin(), curve.end(),
            [](const CurvePoint& a, const CurvePoint& b) { return a.e < b.e; });
  std::vector<std::pair<std::size_t, std::size_t>> index_pairs;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    for (std::size_t j = i + 1; j < curve.size(); ++j) {
      const bool take = opt.rule == PairRule::all || (opt.rule == PairRule::adjacent && j == i + 1) ||
                        (opt.rule == PairRule::anchored && i == 0);
      if (take) index_pairs.emplace_back(i, j);
    }
  }
  HolderFit fit;
  std::vector<double> lx, ly;
  for (const auto& [i, j] : index_pairs) {
    HolderPair p;
    p.delta_e = curve[j].e - curve[i].e;
    p.delta_value = std::abs(curve[j].value - curve[i].value);
    p.std_error = std::hypot(curve[i].std_error, curve[j].std_error);
    if (!(p.delta_e > 0.0) || !(p.delta_value > opt.signal_sigmas * p.std_error)) continue;
    if (p.delta_value == 0.0) continue;
    if (opt.delta_min && p.delta_e < *opt.delta_min) continue;
    if (opt.delta_max && p.delta_e > *opt.delta_max) continue;
    fit.pairs.push_back(p);
    lx.push_back(std::log(p.delta_e));
    ly.push_back(std::log(p.delta_value));
  }
  if (fit.pairs.size() < 5) {
    throw InsufficientSignal("holder_fit: only " + std::to_string(fit.pairs.size()) +
                             " pairs above the signal threshold, need 5");
  }
  const LineFit line = fit_line(lx, ly);
  fit.fitted_alpha = line.slope;
  fit.intercept = line.intercept;
  fit.fit_r2 = line.r2;
  fit.window_lo = fit.pairs.front().delta_e;
  fit.window_hi = fit.pairs.front().delta_e;
  for (const auto& p : fit.pairs) {
    fit.window_lo = std::min(fit.window_lo, p.delta_e);
    fit.window_hi = std::max(fit.window_hi, p.delta_e);
  }
  return fit;
}

double walk_expected_hitting_exact(std::int64_t m, std::int64_t j) {
  if (m < 0 || j < 0 || j > m) {
    throw ParameterError("walk_expected_hitting_exact needs 0 <= j <= M, got M = " +
                         std::to_string(m) + ", j = " + std::to_string(j));
  }
  std::int64_t mm = 0, jj = 0;
  if (__builtin_mul_overflow(m, m + 1, &mm) || __builtin_mul_overflow(j, j + 1, &jj)) {
    throw ParameterError("walk_expected_hitting_exact: M(M+1) overflows");
  }
  return static_cast<double>(mm - jj);
}

Estimate walk_expected_hitting_mc(std::int64_t m, std::int64_t j, std::int64_t trials,
                                  std::uint64_t seed, unsigned workers) {
  if (m < 0 || j < 0 || j > m) throw ParameterError("walk_expected_hitting_mc needs 0 <= j <= M");
  if (trials < 1000) throw ParameterError("walk_expected_hitting_mc needs trials >= 1000");
  constexpr int kBatches = 16;
  std::vector<double> sums(kBatches), means(kBatches);
  parallel_for(kBatches, workers, [&](std::size_t b) {
    const std::uint64_t stream = stream_id(StreamPurpose::walk, static_cast<std::uint32_t>(b));
    const std::int64_t lo = trials * static_cast<std::int64_t>(b) / kBatches;
    const std::int64_t hi = trials * static_cast<std::int64_t>(b + 1) / kBatches;
    std::int64_t counter = 0;
    double total = 0.0;
    for (std::int64_t t = lo; t < hi; ++t) {
      std::int64_t pos = j;
      std::int64_t steps = 0;
      while (pos < m) {
        const bool up = uniform01(seed, stream, counter++) < 0.5;
        pos = up ? pos + 1 : std::max<std::int64_t>(pos - 1, 0);
        ++steps;
      }
      total += static_cast<double>(steps);
    }
    sums[b] = total;
    means[b] = total / static_cast<double>(hi - lo);
  });
  Estimate out;
  out.value = pairwise_sum(sums) / static_cast<double>(trials);
  out.std_error = mean_and_stderr(means).std_error;
  out.n = trials;
  out.replicas = kBatches;
  out.seed = seed;
  return out;
}

Example53FixedPoints example53_fixed_points(double s, double e) {
  const LiftedCircleMap f = morse_smale(s);
  const LiftedCircleMap r = LiftedCircleMap::rotation(e);
  Example53FixedPoints out{};
  split_roots(fixed_points(compose(r, f)), out.a1, out.r1, "R_E o f");
  split_roots(fixed_points(compose(r, f.inverse())), out.a2, out.r2, "R_E o f^-1");
  return out;
}

std::int64_t example53_m(double s, double e) {
  const auto fp = example53_fixed_points(s, e);
  const LiftedCircleMap f = morse_smale(s);
  const double arc = circle_point(fp.a1 - fp.r2);
  double p = fp.a2;
  for (std::int64_t j = 0; j < kMaxOrbitSteps; ++j) {
    if (circle_point(p - fp.r2) <= arc) return j;
    p = f.eval(p);
  }
  throw RootFindingError("orbit of A_2 never reached [R_2, A_1]");
}

std::vector<Example53Row> example53_run(const Example53Config& config) {
  if (!(config.s > 0.0 && config.s < 1.0)) throw ParameterError("example53 needs 0 < s < 1");
  for (double e : config.e_grid) {
    if (!(e >= 0.0 && e <= 0.1)) throw ParameterError("example53 energies must lie in [0, 0.1]");
  }
  const CocycleFamily family =
      morse_smale_family(config.s, Distribution::atoms({{1.0, 0.5}, {2.0, 0.5}}));
  BirkhoffOptions opt;
  opt.n = config.n;
  opt.burn_in = config.burn_in;
  opt.replicas = config.replicas;
  opt.seed = config.seed;
  opt.workers = config.workers;
  std::vector<Example53Row> rows;
  for (double e : config.e_grid) {
    const Estimate rho = birkhoff_rho(family, e, opt);
    Example53Row row;
    row.e = e;
    row.rho = rho.value;
    row.std_error = rho.std_error;
    if (e > 0.0) {
      row.m_e = example53_m(config.s, e);
      const double l = std::log(1.0 / e);
      row.compensated = rho.value * l * l;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rotnum
