#include "validate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "rotnum/analysis.hpp"
#include "rotnum/circle_maps.hpp"
#include "rotnum/drivers.hpp"
#include "rotnum/measures.hpp"
#include "rotnum/rotation.hpp"
#include "rotnum/schrodinger.hpp"

namespace rotnum::tools {

namespace {

constexpr double kExact = 1e-12;

class Draws {
 public:
  Draws(std::uint64_t seed, std::uint32_t check) : seed_(seed), stream_(stream_id(StreamPurpose::user, check)) {}
  double uniform() { return uniform01(seed_, stream_, counter_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform() * static_cast<double>(hi - lo + 1));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::int64_t counter_ = 0;
};

// Dyadic positions keep p + k and p + k + 1 exact in double precision.
EmpiricalCircleMeasure random_measure(Draws& d, std::int64_t max_atoms, bool dyadic = false) {
  const std::int64_t n = d.integer(1, max_atoms);
  std::vector<double> pos(n), w(n);
  for (std::int64_t i = 0; i < n; ++i) {
    pos[i] = dyadic ? std::ldexp(std::floor(std::ldexp(d.uniform(), 30)), -30) : d.uniform();
    w[i] = d.uniform(0.01, 1.0);
  }
  return EmpiricalCircleMeasure(pos, w);
}

SL2Matrix random_sl2(Draws& d) {
  double a = d.uniform(0.3, 2.0);
  if (d.uniform() < 0.5) a = -a;
  const double b = d.uniform(-2.0, 2.0);
  const double c = d.uniform(-2.0, 2.0);
  return {a, b, c, (1.0 + b * c) / a};
}

LiftedCircleMap random_map(Draws& d, int depth = 0) {
  switch (d.integer(0, depth < 1 ? 3 : 2)) {
    case 0:
      return LiftedCircleMap::rotation(d.uniform(-3.0, 3.0)).shifted(d.integer(-2, 2));
    case 1:
      return projectivize(random_sl2(d), d.uniform(-2.0, 2.0));
    case 2:
      return morse_smale(d.uniform(0.05, 0.95)).shifted(d.integer(-2, 2));
    default: {
      LiftedCircleMap g = random_map(d, depth + 1);
      const std::int64_t parts = d.integer(1, 3);
      for (std::int64_t k = 0; k < parts; ++k) g = compose(random_map(d, depth + 1), g);
      return g;
    }
  }
}

CheckResult finish(std::string name, double worst, double tol, std::int64_t cases,
                   std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.worst = worst;
  r.tolerance = tol;
  r.passed = worst <= tol;
  r.cases = cases;
  r.detail = std::move(detail);
  return r;
}

// Two fibers over a period-2 base whose return map at E = 0 is hyperbolic.
CocycleFamily two_fiber_family() {
  const SL2Matrix m0{2.0, 0.0, 0.0, 0.5};
  const SL2Matrix m1 = SL2Matrix::rotation(0.7) * SL2Matrix{1.5, 0.0, 0.0, 1.0 / 1.5};
  return moebius_periodic_family(PeriodicBase({0, 1}), {m0, m1});
}

InvariantMeasureField random_field(Draws& d, const PeriodicBase& base) {
  InvariantMeasureField f{base, {}, 0};
  for (std::size_t j = 0; j < base.period(); ++j) f.fiber_measures.push_back(random_measure(d, 40));
  return f;
}

}  // namespace

CheckResult check_phi_additivity(const SuiteOptions& opt) {
  Draws d(opt.seed, 1);
  double worst = 0.0;
  for (std::int64_t i = 0; i < opt.cases; ++i) {
    const auto nu = random_measure(d, 50, i % 4 == 0);
    const double a = d.uniform(-5.0, 5.0), c = d.uniform(-5.0, 5.0);
    // Every fourth case puts b on an atom.
    const double b = i % 4 == 0 ? nu.positions()[d.integer(0, nu.size() - 1)] + d.integer(-3, 3)
                                : d.uniform(-5.0, 5.0);
    const double err =
        std::abs(phi_points(nu, a, c) - phi_points(nu, a, b) - phi_points(nu, b, c));
    worst = std::max(worst, err);
  }
  return finish("phi additivity", worst, kExact, opt.cases);
}

CheckResult check_phi_unit_period(const SuiteOptions& opt) {
  Draws d(opt.seed, 2);
  double worst = 0.0;
  for (std::int64_t i = 0; i < opt.cases; ++i) {
    const auto nu = random_measure(d, 50, i % 4 == 0);
    const double a = i % 4 == 0 ? nu.positions()[d.integer(0, nu.size() - 1)] + d.integer(-3, 3)
                                : d.uniform(-5.0, 5.0);
    worst = std::max(worst, std::abs(phi_points(nu, a, a + 1.0) - 1.0));
  }
  return finish("phi unit period", worst, kExact, opt.cases);
}

CheckResult check_phi_shift(const SuiteOptions& opt) {
  Draws d(opt.seed, 3);
  double worst = 0.0;
  for (std::int64_t i = 0; i < opt.cases; ++i) {
    const auto nu = random_measure(d, 50);
    const double a = d.uniform(-5.0, 5.0), b = d.uniform(-5.0, 5.0);
    const double k = static_cast<double>(d.integer(-10, 10));
    worst = std::max(worst, std::abs(phi_points(nu, a + k, b + k) - phi_points(nu, a, b)));
  }
  return finish("phi shift equivariance", worst, kExact, opt.cases);
}

CheckResult check_coupling_identity(const SuiteOptions& opt) {
  Draws d(opt.seed, 4);
  double worst = 0.0;
  constexpr int kAtoms = 50;
  for (std::int64_t i = 0; i < opt.cases; ++i) {
    const auto nu = random_measure(d, 50);
    std::vector<double> a(kAtoms), b(kAtoms);
    for (auto& v : a) v = d.uniform(-2.0, 3.0);
    for (auto& v : b) v = d.uniform(-2.0, 3.0);
    // Even cases: product coupling. Odd cases: arbitrary joint weights.
    std::vector<double> joint(kAtoms * kAtoms);
    if (i % 2 == 0) {
      std::vector<double> p(kAtoms), q(kAtoms);
      for (auto& v : p) v = d.uniform(0.01, 1.0);
      for (auto& v : q) v = d.uniform(0.01, 1.0);
      for (int r = 0; r < kAtoms; ++r)
        for (int c = 0; c < kAtoms; ++c) joint[r * kAtoms + c] = p[r] * q[c];
    } else {
      for (auto& v : joint) v = d.uniform() < 0.9 ? 0.0 : d.uniform(0.01, 1.0);
      for (int r = 0; r < kAtoms; ++r) joint[r * kAtoms + r] += 1e-3;
    }
    double total = 0.0;
    for (double v : joint) total += v;
    std::vector<double> wa(kAtoms, 0.0), wb(kAtoms, 0.0);
    double brute = 0.0;
    for (int r = 0; r < kAtoms; ++r) {
      for (int c = 0; c < kAtoms; ++c) {
        const double w = joint[r * kAtoms + c] / total;
        wa[r] += w;
        wb[c] += w;
        brute += w * phi_points(nu, a[r], b[c]);
      }
    }
    const double direct = phi_measures(nu, MeasureOnLine(a, wa), MeasureOnLine(b, wb));
    worst = std::max(worst, std::abs(direct - brute));
  }
  return finish("coupling identity", worst, kExact, opt.cases);
}

CheckResult check_lift_degree_one(const SuiteOptions& opt) {
  Draws d(opt.seed, 5);
  double worst = 0.0;
  for (std::int64_t i = 0; i < opt.cases; ++i) {
    const auto f = random_map(d);
    const double y = d.uniform(-10.0, 10.0);
    const double k = static_cast<double>(d.integer(-5, 5));
    worst = std::max(worst, std::abs(f.eval(y + k) - f.eval(y) - k));
  }
  return finish("lift degree one", worst, kExact, opt.cases);
}

CheckResult check_lift_monotone(const SuiteOptions& opt) {
  Draws d(opt.seed, 6);
  double worst = 0.0;
  for (std::int64_t i = 0; i < opt.cases; ++i) {
    const auto f = random_map(d);
    double prev_y = d.uniform(-3.0, -2.0);
    double prev = f.eval(prev_y);
    for (int s = 0; s < 64; ++s) {
      const double y = prev_y + d.uniform(0.0, 0.1);
      const double v = f.eval(y);
      worst = std::max(worst, prev - v);  // positive when the lift decreases
      prev_y = y;
      prev = v;
    }
  }
  return finish("lift monotone", std::max(worst, 0.0), kExact, opt.cases);
}

CheckResult check_lift_independence(const SuiteOptions& opt) {
  Draws d(opt.seed, 7);
  const CocycleFamily family = two_fiber_family();
  const PeriodicBase base({0, 1});
  const auto field1 = random_field(d, base);
  const auto field2 = random_field(d, base);
  const double e1 = 0.0, e2 = 0.05;
  const auto increment = [&](const CocycleFamily& f) {
    return increment_thm1_periodic(f, e1, e2, field1, field2);
  };
  double worst = 0.0;
  for (std::int64_t i = 0; i < opt.cases; ++i) {
    const std::map<int, std::int64_t> offsets{{0, d.integer(-5, 5)}, {1, d.integer(-5, 5)}};
    const LiftCheck c = lift_independence_check(family, offsets, increment, kExact);
    worst = std::max(worst, std::abs(c.reference - c.shifted));
  }
  return finish("lift independence", worst, kExact, opt.cases);
}

CheckResult check_rigid_rotation(const SuiteOptions& opt) {
  const double alpha = std::sqrt(2.0) - 1.0;
  BirkhoffOptions b;
  b.n = 1000;
  b.burn_in = 100;
  b.replicas = 4;
  b.seed = opt.seed;
  b.workers = opt.workers;
  const Estimate rho = birkhoff_rho(rigid_rotation_family(alpha), 0.0, b);
  return finish("rigid rotation", std::abs(rho.value - alpha), kExact, 1);
}

CheckResult check_sturm_dense(const SuiteOptions& opt) {
  Draws d(opt.seed, 8);
  const std::int64_t potentials = std::max<std::int64_t>(1, opt.cases / 10);
  std::int64_t mismatches = 0, cases = 0;
  for (std::int64_t p = 0; p < potentials; ++p) {
    for (int l : {8, 16, 32, 64}) {
      std::vector<double> v(l);
      for (auto& x : v) x = d.uniform(-3.0, 3.0);
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(l, l);
      for (int i = 0; i < l; ++i) {
        h(i, i) = v[i];
        if (i + 1 < l) h(i, i + 1) = h(i + 1, i) = 1.0;
      }
      const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
      for (int k = 0; k < 10; ++k) {
        const double e = d.uniform(-5.5, 5.5);
        const auto dense = static_cast<std::int64_t>((eig.array() < e).count());
        if (sturm_count(v, e) != dense) ++mismatches;
        ++cases;
      }
    }
  }
  return finish("sturm vs dense", static_cast<double>(mismatches), 0.0, cases);
}

CheckResult check_translation_linearity(const SuiteOptions& opt) {
  Draws d(opt.seed, 9);
  const CocycleFamily family = two_fiber_family();
  const PeriodicBase base({0, 1});
  const auto nu1 = invariant_field_periodic(family, 0.0, base, 10000);
  double worst_ratio = 0.0;
  std::int64_t cases = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto nu2 = random_field(d, base);
    const double t1 = translation_value(family, 0.0, nu1, nu2, 1);
    for (int n = 1; n <= 20; ++n) {
      const double err = std::abs(translation_value(family, 0.0, nu1, nu2, n) - n * t1);
      worst_ratio = std::max(worst_ratio, err / n);
      ++cases;
    }
  }
  return finish("translation value linear in n", worst_ratio, 1e-9, cases,
                "cycle period " + std::to_string(nu1.cycle_period));
}

CheckResult check_cocycle_relation(const SuiteOptions& opt) {
  Draws d(opt.seed, 10);
  const CocycleFamily family = two_fiber_family();
  const PeriodicBase base({0, 1});
  double worst = 0.0;
  std::int64_t cases = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto nu1 = random_field(d, base);
    const auto nu2 = random_field(d, base);
    const auto pushed = push_field(family, 0.0, nu1);
    const double t1 = translation_value(family, 0.0, nu1, nu2, 1);
    for (int n = 2; n <= 20; ++n) {
      const double lhs = translation_value(family, 0.0, nu1, nu2, n);
      const double rhs = t1 + translation_value(family, 0.0, pushed, nu2, n - 1);
      worst = std::max(worst, std::abs(lhs - rhs));
      ++cases;
    }
  }
  return finish("cocycle relation", worst, 1e-9, cases);
}

CheckResult check_walk_exact(const SuiteOptions&) {
  double worst = 0.0;
  std::int64_t cases = 0;
  for (std::int64_t m = 1; m <= 1000; ++m) {
    const auto h = [m](std::int64_t j) { return walk_expected_hitting_exact(m, j); };
    worst = std::max(worst, std::abs(h(m)));
    worst = std::max(worst, std::abs(h(0) - 1.0 - 0.5 * (h(1) + h(0))));
    for (std::int64_t j = 1; j < m; ++j) {
      worst = std::max(worst, std::abs(h(j) - 1.0 - 0.5 * (h(j + 1) + h(j - 1))));
      ++cases;
    }
  }
  return finish("hitting time difference equation", worst, 0.0, cases);
}

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& opt) {
  using Check = CheckResult (*)(const SuiteOptions&);
  const Check checks[] = {check_phi_additivity,    check_phi_unit_period,  check_phi_shift,
                          check_coupling_identity, check_lift_degree_one,  check_lift_monotone,
                          check_lift_independence, check_rigid_rotation,   check_sturm_dense,
                          check_translation_linearity, check_cocycle_relation, check_walk_exact};
  std::vector<CheckResult> out;
  for (Check c : checks) out.push_back(c(opt));
  return out;
}

std::string format_check(const CheckResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s (worst %.3g <= %.3g, %lld cases)",
                r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst, r.tolerance,
                static_cast<long long>(r.cases));
  std::string s = buf;
  if (!r.detail.empty()) s += ", " + r.detail;
  return s;
}

}  // namespace rotnum::tools
