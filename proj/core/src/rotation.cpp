#include "rotnum/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rotnum/errors.hpp"
#include "rotnum/parallel.hpp"

namespace rotnum {

namespace {

constexpr int kCycleBurnIn = 1000;
constexpr int kMaxCyclePeriod = 1000;
constexpr double kCycleTolerance = 1e-10;

struct Orbit {
  std::int64_t whole = 0;
  double part = 0.0;

  double lifted() const noexcept { return static_cast<double>(whole) + part; }
};

void advance(const FiberAt& maps, const Base& base, const PathSpec& path, std::int64_t from,
             std::int64_t count, Orbit& orbit) {
  for (std::int64_t i = from; i < from + count; ++i) {
    const double v = maps(symbol_at(base, path, i)).eval(orbit.part);
    if (!std::isfinite(v)) {
      throw NumericOverflow("non-finite lift value at step " + std::to_string(i));
    }
    const auto [w, p] = split(v);
    orbit.whole += static_cast<std::int64_t>(w);
    orbit.part = p;
  }
}

double circle_gap(double a, double b) noexcept {
  const double d = std::abs(circle_point(a) - circle_point(b));
  return std::min(d, 1.0 - d);
}

std::vector<BaseSymbol> probe_symbols(const Base& base) {
  struct Visitor {
    std::vector<BaseSymbol> operator()(const IidBase& b) const {
      std::vector<BaseSymbol> out;
      if (b.law.kind() == Distribution::Kind::atoms) {
        for (double v : b.law.values()) out.push_back({v, 0.0, 0});
      } else {
        for (double u : {0.0, 0.5, 0.999999}) out.push_back({b.law.quantile(u), 0.0, 0});
      }
      return out;
    }
    std::vector<BaseSymbol> operator()(const PeriodicBase& b) const {
      std::vector<int> labels = b.labels;
      std::sort(labels.begin(), labels.end());
      labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
      std::vector<BaseSymbol> out;
      for (int l : labels) out.push_back({0.0, 0.0, l});
      return out;
    }
    std::vector<BaseSymbol> operator()(const RotationBase&) const {
      return {{0.0, 0.0, 0}, {0.0, 0.25, 0}, {0.0, 0.5, 0}, {0.0, 0.75, 0}};
    }
    std::vector<BaseSymbol> operator()(const NoisyRotationBase& b) const {
      std::vector<BaseSymbol> out;
      for (double x : {0.0, 0.5}) {
        for (double u : {0.0, 0.5, 0.999999}) out.push_back({b.noise.quantile(u), x, 0});
      }
      return out;
    }
  };
  return std::visit(Visitor{}, base);
}

void require_iid(const CocycleFamily& family, const char* op) {
  if (!is_iid(family.base)) {
    throw StructuralError(std::string(op) + " needs an iid base, family '" + family.kind +
                          "' has none");
  }
}

struct BatchResult {
  double sum = 0.0;
  std::int64_t count = 0;
  int orientation = 0;
  double witness_omega = 0.0;
  double witness_y = 0.0;
  bool mixed = false;
};

Estimate reduce_batches(const std::vector<BatchResult>& batches, std::int64_t n,
                        std::uint64_t seed) {
  std::vector<double> sums, means;
  for (const auto& b : batches) {
    sums.push_back(b.sum);
    means.push_back(b.count ? b.sum / static_cast<double>(b.count) : 0.0);
  }
  Estimate out;
  out.value = pairwise_sum(sums) / static_cast<double>(n);
  out.std_error = mean_and_stderr(means).std_error;
  out.n = n;
  out.replicas = static_cast<std::int64_t>(batches.size());
  out.seed = seed;
  return out;
}

void check_mc(const McOptions& opt) {
  if (opt.batches < 2 || opt.n_mc < opt.batches) {
    throw ParameterError("Monte Carlo needs batches >= 2 and n_mc >= batches");
  }
}

std::int64_t batch_begin(std::int64_t n, int batches, int b) {
  return n * b / batches;
}

}  // namespace

BaseSymbol symbol_at(const Base& base, const PathSpec& path, std::int64_t n) {
  struct Visitor {
    const PathSpec& path;
    std::int64_t n;
    BaseSymbol operator()(const IidBase& b) const {
      return {b.law.quantile(uniform01(path.seed, path.stream, n, 0)), 0.0, 0};
    }
    BaseSymbol operator()(const PeriodicBase& b) const {
      return {0.0, 0.0, b.at(path.phase + n)};
    }
    BaseSymbol operator()(const RotationBase& b) const {
      return {0.0, b.at(path.phase + n), 0};
    }
    BaseSymbol operator()(const NoisyRotationBase& b) const {
      return {b.noise.quantile(uniform01(path.seed, path.stream, n, 0)),
              b.background.at(path.phase + n), 0};
    }
  };
  return std::visit(Visitor{path, n}, base);
}

bool is_iid(const Base& base) noexcept { return std::holds_alternative<IidBase>(base); }

FiberAt CocycleFamily::at(double e) const {
  FiberAt maps = fiber_at(e);
  std::int64_t k = 0;
  if (calibration && !calibration->empty()) {
    const auto& fa = fiber_at;
    const BaseSymbol p = probe;
    k = calibration->offset_at(e, [&fa, p](double ee) { return fa(ee)(p); });
  }
  if (k == 0 && label_offsets.empty()) return maps;
  return [maps = std::move(maps), k, offsets = label_offsets](const BaseSymbol& s) {
    const auto it = offsets.find(s.label);
    return maps(s).shifted(k + (it == offsets.end() ? 0 : it->second));
  };
}

CocycleFamily calibrate_family(CocycleFamily family, const std::vector<double>& grid,
                               double base_anchor) {
  const auto probes = probe_symbols(family.base);
  const auto raw_family = [&family](const BaseSymbol& s) {
    auto fa = family.fiber_at;
    return MapFamily{family.kind, {}, [fa, s](double e) { return fa(e)(s); }};
  };
  const MapFamily main = raw_family(probes.front());
  auto calibration = std::make_shared<LiftCalibration>(calibrate_lifts(main, grid, base_anchor));
  const std::int64_t k0 = calibration->nodes().front().offset;
  for (std::size_t i = 1; i < probes.size(); ++i) {
    const MapFamily other = raw_family(probes[i]);
    const double start = std::floor(other.at(grid.front()).eval(0.0)) + static_cast<double>(k0);
    const LiftCalibration c = calibrate_lifts(other, grid, start);
    for (double e : grid) {
      if (c.offset_at(e, other.at) != calibration->offset_at(e, main.at)) {
        std::ostringstream os;
        os.precision(17);
        os << family.kind << ": probe symbols need different lift offsets at E = " << e;
        throw ContinuityFailure(os.str(), grid.front(), e);
      }
    }
  }
  family.calibration = std::move(calibration);
  family.probe = probes.front();
  return family;
}

CocycleFamily with_label_offsets(CocycleFamily family, std::map<int, std::int64_t> offsets) {
  for (const auto& [label, k] : offsets) family.label_offsets[label] += k;
  return family;
}

CocycleFamily rigid_rotation_family(double alpha) {
  CocycleFamily f;
  f.kind = "rigid";
  f.base = PeriodicBase({0});
  f.fiber_at = [alpha](double e) -> FiberAt {
    const auto m = LiftedCircleMap::rotation(alpha + e);
    return [m](const BaseSymbol&) { return m; };
  };
  return f;
}

CocycleFamily iid_rotation_family(Distribution beta) {
  CocycleFamily f;
  f.kind = "iid_rotation";
  f.base = IidBase{std::move(beta)};
  f.fiber_at = [](double e) -> FiberAt {
    return [e](const BaseSymbol& s) { return LiftedCircleMap::rotation(e + s.omega); };
  };
  return f;
}

CocycleFamily rotation_periodic_family(PeriodicBase base, std::vector<double> alphas) {
  for (int l : base.labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= alphas.size()) {
      throw ParameterError("periodic label without a rotation amount");
    }
  }
  CocycleFamily f;
  f.kind = "rotation_periodic";
  f.base = std::move(base);
  f.fiber_at = [alphas = std::move(alphas)](double e) -> FiberAt {
    return [alphas, e](const BaseSymbol& s) {
      return LiftedCircleMap::rotation(alphas[static_cast<std::size_t>(s.label)] + e);
    };
  };
  return f;
}

CocycleFamily moebius_periodic_family(PeriodicBase base, std::vector<SL2Matrix> matrices) {
  for (int l : base.labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= matrices.size()) {
      throw ParameterError("periodic label without a matrix");
    }
  }
  auto projective = std::make_shared<std::vector<LiftedCircleMap>>();
  for (const auto& m : matrices) projective->push_back(projectivize(m));
  CocycleFamily f;
  f.kind = "moebius_periodic";
  f.base = std::move(base);
  f.fiber_at = [projective](double e) -> FiberAt {
    auto maps = std::make_shared<std::vector<LiftedCircleMap>>();
    for (const auto& p : *projective) maps->push_back(compose(p, LiftedCircleMap::rotation(e)));
    return [maps](const BaseSymbol& s) { return (*maps)[static_cast<std::size_t>(s.label)]; };
  };
  return f;
}

CocycleFamily morse_smale_family(double s, Distribution law) {
  for (double v : law.values()) {
    if (v != 1.0 && v != 2.0) throw ParameterError("morse_smale family symbols must be 1 or 2");
  }
  if (law.kind() != Distribution::Kind::atoms) {
    throw ParameterError("morse_smale family needs an atomic law on {1,2}");
  }
  const LiftedCircleMap f = morse_smale(s);
  const LiftedCircleMap f_inv = f.inverse();
  CocycleFamily fam;
  fam.kind = "morse_smale";
  fam.base = IidBase{std::move(law)};
  fam.fiber_at = [f, f_inv](double e) -> FiberAt {
    const auto r = LiftedCircleMap::rotation(e);
    const auto g1 = compose(r, f);
    const auto g2 = compose(r, f_inv);
    return [g1, g2](const BaseSymbol& sym) { return sym.omega < 1.5 ? g1 : g2; };
  };
  return fam;
}

double combined_error(const Estimate& a, const Estimate& b) noexcept {
  return std::hypot(a.std_error, b.std_error);
}

double iterate_shift(const CocycleFamily& family, double e, const PathSpec& path, double y,
                     std::int64_t n) {
  if (n < 1) throw ParameterError("iterate_shift needs n >= 1");
  Orbit orbit{0, circle_point(y)};
  const double start = orbit.part;
  advance(family.at(e), family.base, path, 0, n, orbit);
  return orbit.lifted() - start;
}

RotationEstimate birkhoff_rho(const CocycleFamily& family, double e, const BirkhoffOptions& opt) {
  if (opt.n < 1 || opt.burn_in < 0 || opt.replicas < 1) {
    throw ParameterError("birkhoff_rho needs n >= 1, burn_in >= 0, replicas >= 1");
  }
  if (opt.n < 10 * opt.burn_in) throw ParameterError("birkhoff_rho needs n >= 10 * burn_in");
  const FiberAt maps = family.at(e);
  std::vector<double> values(static_cast<std::size_t>(opt.replicas));
  parallel_for(values.size(), opt.workers, [&](std::size_t r) {
    const PathSpec path{opt.seed, stream_id(StreamPurpose::forward, static_cast<std::uint32_t>(r)),
                        static_cast<std::int64_t>(r) * (opt.n + opt.burn_in)};
    Orbit orbit;
    advance(maps, family.base, path, 0, opt.burn_in, orbit);
    const Orbit start = orbit;
    advance(maps, family.base, path, opt.burn_in, opt.n, orbit);
    const double shift =
        static_cast<double>(orbit.whole - start.whole) + (orbit.part - start.part);
    values[r] = shift / static_cast<double>(opt.n);
  });
  const auto stats = mean_and_stderr(values);
  return {stats.mean, stats.std_error, opt.n, opt.replicas, opt.seed};
}

StationaryEstimate estimate_stationary(const CocycleFamily& family, double e, Direction direction,
                                       const StationaryOptions& opt) {
  require_iid(family, "estimate_stationary");
  if (opt.n_samples < 1000) throw ParameterError("estimate_stationary needs n_samples >= 1000");
  const FiberAt maps = family.at(e);
  const bool forward = direction == Direction::forward;
  const std::uint64_t stream = forward ? stream_id(StreamPurpose::stationary, 0)
                                       : stream_id(StreamPurpose::backward, 0);
  const std::uint64_t residual_stream =
      stream_id(StreamPurpose::residual, forward ? 0u : 1u);
  const PathSpec path{opt.seed, stream, 0};
  const PathSpec residual_path{opt.seed, residual_stream, 0};

  std::int64_t n_burn = opt.n_burn;
  std::int64_t n_samples = opt.n_samples;
  for (int attempt = 0;; ++attempt) {
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(n_samples));
    // A random start avoids sitting on a common fixed point of the maps.
    double y = uniform01(opt.seed, stream, 0, 1);
    for (std::int64_t i = 0; i < n_burn + n_samples; ++i) {
      const std::int64_t index = forward ? i : -1 - i;
      const auto g = maps(symbol_at(family.base, path, index));
      y = circle_point(forward ? g.eval(y) : g.inv_eval(y));
      if (i >= n_burn) samples.push_back(y);
    }
    std::vector<double> pushed(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto g = maps(symbol_at(family.base, residual_path, static_cast<std::int64_t>(i)));
      pushed[i] = forward ? g.eval(samples[i]) : g.inv_eval(samples[i]);
    }
    auto measure = EmpiricalCircleMeasure::from_samples(std::move(samples));
    const double residual =
        kolmogorov_distance(measure, EmpiricalCircleMeasure::from_samples(std::move(pushed)));
    const bool converged = residual <= opt.tolerance;
    if (converged || attempt >= opt.max_refinements) {
      return {std::move(measure), residual, converged, n_samples};
    }
    n_burn *= 2;
    n_samples *= 2;
  }
}

Estimate increment_thm2(const CocycleFamily& family, double e1, double e2,
                        const EmpiricalCircleMeasure& nu_plus,
                        const EmpiricalCircleMeasure& nu_minus, const McOptions& opt) {
  require_iid(family, "increment_thm2");
  check_mc(opt);
  const FiberAt g1 = family.at(e1);
  const FiberAt g2 = family.at(e2);
  const PathSpec path{opt.seed, stream_id(StreamPurpose::monte_carlo, 0), 0};
  std::vector<BatchResult> batches(static_cast<std::size_t>(opt.batches));
  parallel_for(batches.size(), opt.workers, [&](std::size_t b) {
    const auto lo = batch_begin(opt.n_mc, opt.batches, static_cast<int>(b));
    const auto hi = batch_begin(opt.n_mc, opt.batches, static_cast<int>(b) + 1);
    BatchResult r;
    for (std::int64_t i = lo; i < hi; ++i) {
      const BaseSymbol s = symbol_at(family.base, path, i);
      const double y = nu_plus.sample(uniform01(opt.seed, path.stream, i, 1));
      r.sum += phi_points(nu_minus, g1(s).eval(y), g2(s).eval(y));
    }
    r.count = hi - lo;
    batches[b] = r;
  });
  return reduce_batches(batches, opt.n_mc, opt.seed);
}

Estimate increment_corollary(const CocycleFamily& family, double e1, double e2,
                             const EmpiricalCircleMeasure& nu_plus,
                             const EmpiricalCircleMeasure& nu_minus, const McOptions& opt) {
  require_iid(family, "increment_corollary");
  check_mc(opt);
  if (!(e1 <= e2)) throw ParameterError("increment_corollary needs E1 <= E2");
  const double em = 0.5 * (e1 + e2);
  const FiberAt g1 = family.at(e1);
  const FiberAt g2 = family.at(e2);
  const FiberAt gm = family.at(em);
  const PathSpec path{opt.seed, stream_id(StreamPurpose::corollary, 0), 0};
  const std::uint64_t z_stream = stream_id(StreamPurpose::corollary, 1);
  std::vector<BatchResult> batches(static_cast<std::size_t>(opt.batches));
  parallel_for(batches.size(), opt.workers, [&](std::size_t b) {
    const auto lo = batch_begin(opt.n_mc, opt.batches, static_cast<int>(b));
    const auto hi = batch_begin(opt.n_mc, opt.batches, static_cast<int>(b) + 1);
    BatchResult r;
    for (std::int64_t i = lo; i < hi; ++i) {
      const BaseSymbol s = symbol_at(family.base, path, i);
      const double y = nu_plus.sample(uniform01(opt.seed, path.stream, i, 1));
      const double z = nu_minus.sample(uniform01(opt.seed, z_stream, i, 0));
      const double a = g1(s).eval(y);
      const double c = g2(s).eval(y);
      if (a == c) continue;
      const double m = gm(s).eval(y);
      int sign = 0;
      if (a < c && a <= m && m <= c) sign = 1;
      if (a > c && c <= m && m <= a) sign = -1;
      if (sign == 0 || (r.orientation != 0 && sign != r.orientation)) {
        r.mixed = true;
        r.witness_omega = s.omega;
        r.witness_y = y;
        break;
      }
      r.orientation = sign;
      const double lower = std::min(a, c);
      const double width = std::abs(c - a);
      if (width >= 1.0) {
        throw ParameterError("increment_corollary: image arc wraps the whole circle");
      }
      if (circle_point(z - lower) < width) r.sum += sign;
    }
    r.count = hi - lo;
    batches[b] = r;
  });
  int orientation = 0;
  for (const auto& b : batches) {
    const bool clash = b.orientation != 0 && orientation != 0 && b.orientation != orientation;
    if (b.mixed || clash) {
      std::ostringstream os;
      os.precision(17);
      os << family.kind << ": fiber maps not monotone in E on [" << e1 << ", " << e2
         << "] at omega = " << b.witness_omega << ", y = " << b.witness_y;
      throw MonotonicityViolation(os.str(), b.witness_omega, b.witness_y, em);
    }
    if (b.orientation != 0) orientation = b.orientation;
  }
  return reduce_batches(batches, opt.n_mc, opt.seed);
}

InvariantMeasureField invariant_field_periodic(const CocycleFamily& family, double e,
                                               const PeriodicBase& base, std::int64_t n) {
  if (n < 1) throw ParameterError("invariant_field_periodic needs n >= 1");
  const FiberAt maps = family.at(e);
  const std::size_t p = base.period();
  std::vector<LiftedCircleMap> fibers;
  for (std::size_t j = 0; j < p; ++j) fibers.push_back(maps({0.0, 0.0, base.labels[j]}));
  const auto ret = [&fibers](double y) {
    for (const auto& f : fibers) y = f.eval(y);
    return circle_point(y);
  };

  double y = 0.0;
  for (int i = 0; i < kCycleBurnIn; ++i) y = ret(y);
  int period = 0;
  {
    const double y0 = y;
    double z = y;
    for (int q = 1; q <= kMaxCyclePeriod; ++q) {
      z = ret(z);
      if (circle_gap(z, y0) < kCycleTolerance) {
        period = q;
        break;
      }
    }
  }
  std::vector<double> atoms;
  if (period > 0) {
    for (int i = 0; i < 100 * period; ++i) y = ret(y);
    for (int i = 0; i < period; ++i) {
      y = ret(y);
      atoms.push_back(y);
    }
  } else {
    atoms.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      y = ret(y);
      atoms.push_back(y);
    }
  }
  InvariantMeasureField field{base, {}, period};
  field.fiber_measures.push_back(EmpiricalCircleMeasure::from_samples(std::move(atoms)));
  for (std::size_t j = 0; j + 1 < p; ++j) {
    field.fiber_measures.push_back(pushforward(field.fiber_measures.back(), fibers[j]));
  }
  return field;
}

InvariantMeasureField push_field(const CocycleFamily& family, double e,
                                 const InvariantMeasureField& field) {
  const FiberAt maps = family.at(e);
  const std::size_t p = field.base.period();
  std::vector<EmpiricalCircleMeasure> pushed(field.fiber_measures);
  for (std::size_t j = 0; j < p; ++j) {
    pushed[(j + 1) % p] =
        pushforward(field.fiber_measures[j], maps({0.0, 0.0, field.base.labels[j]}));
  }
  return {field.base, std::move(pushed), 0};
}

double pushforward_residual(const CocycleFamily& family, double e,
                            const InvariantMeasureField& field) {
  const InvariantMeasureField pushed = push_field(family, e, field);
  double worst = 0.0;
  for (std::size_t j = 0; j < field.fiber_measures.size(); ++j) {
    worst = std::max(worst, kolmogorov_distance(pushed.fiber_measures[j], field.fiber_measures[j]));
  }
  return worst;
}

double theta(const CocycleFamily& family, double e1, double e2, const BaseSymbol& x,
             const EmpiricalCircleMeasure& nu, double y) {
  return phi_points(nu, family.fiber(e1, x).eval(y), family.fiber(e2, x).eval(y));
}

double increment_thm1_periodic(const CocycleFamily& family, double e1, double e2,
                               const InvariantMeasureField& field_e1,
                               const InvariantMeasureField& field_e2) {
  if (!(field_e1.base == field_e2.base)) {
    throw StructuralError("increment_thm1_periodic: fields live over different bases");
  }
  const std::size_t p = field_e1.base.period();
  if (field_e1.fiber_measures.size() != p || field_e2.fiber_measures.size() != p) {
    throw StructuralError("increment_thm1_periodic: field size differs from the period");
  }
  const FiberAt g1 = family.at(e1);
  const FiberAt g2 = family.at(e2);
  std::vector<double> per_fiber(p);
  for (std::size_t j = 0; j < p; ++j) {
    const BaseSymbol s{0.0, 0.0, field_e1.base.labels[j]};
    const auto f1 = g1(s);
    const auto f2 = g2(s);
    const auto& nu = field_e2.fiber_measures[(j + 1) % p];
    const auto& mu = field_e1.fiber_measures[j];
    std::vector<double> terms(mu.size());
    for (std::size_t a = 0; a < mu.size(); ++a) {
      const double y = mu.positions()[a];
      terms[a] = mu.weights()[a] * phi_points(nu, f1.eval(y), f2.eval(y));
    }
    per_fiber[j] = pairwise_sum(terms);
  }
  return pairwise_sum(per_fiber) / static_cast<double>(p);
}

double translation_value(const CocycleFamily& family, double e, const InvariantMeasureField& nu1,
                         const InvariantMeasureField& nu2, int n) {
  if (n < 1) throw ParameterError("translation_value needs n >= 1");
  if (!(nu1.base == nu2.base)) {
    throw StructuralError("translation_value: fields live over different bases");
  }
  const FiberAt maps = family.at(e);
  const std::size_t p = nu1.base.period();
  std::vector<double> per_fiber(p);
  for (std::size_t j = 0; j < p; ++j) {
    MeasureOnLine image = canonical_lift(nu1.fiber_measures[j]);
    for (int k = 0; k < n; ++k) {
      const int label = nu1.base.labels[(j + static_cast<std::size_t>(k)) % p];
      image = pushforward(image, maps({0.0, 0.0, label}));
    }
    const std::size_t target = (j + static_cast<std::size_t>(n)) % p;
    per_fiber[j] = phi_measures(nu2.fiber_measures[target],
                                canonical_lift(nu1.fiber_measures[target]), image);
  }
  return pairwise_sum(per_fiber) / static_cast<double>(p);
}

LiftCheck lift_independence_check(const CocycleFamily& family,
                                  const std::map<int, std::int64_t>& offsets,
                                  const std::function<double(const CocycleFamily&)>& increment,
                                  double tolerance) {
  LiftCheck out;
  out.reference = increment(family);
  out.shifted = increment(with_label_offsets(family, offsets));
  out.passed = std::abs(out.reference - out.shifted) <= tolerance;
  return out;
}

}  // namespace rotnum
