#include "rotnum/schrodinger.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rotnum/errors.hpp"
#include "rotnum/parallel.hpp"

namespace rotnum {

namespace {

double background_value(const PotentialSpec& spec, std::int64_t n) noexcept {
  return spec.background ? spec.background->sample(n) : 0.0;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return out;
}

}  // namespace

SL2Matrix transfer_matrix(double e, double v) noexcept { return {e - v, -1.0, 1.0, 0.0}; }

std::int64_t sturm_count(std::span<const double> v, double e) noexcept {
  const double tiny = -std::numeric_limits<double>::epsilon() * (1.0 + std::abs(e));
  std::int64_t negatives = 0;
  double d = 1.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    d = n == 0 ? v[0] - e : v[n] - e - 1.0 / d;
    if (d == 0.0) d = tiny;
    negatives += d < 0.0;
  }
  return negatives;
}

double PotentialSpec::bound() const noexcept {
  const double bg = background ? background->sampler().bound() : 0.0;
  return bg + std::max(std::abs(noise.lower()), std::abs(noise.upper())) + std::abs(offset);
}

PotentialSpec PotentialSpec::shifted(double c) const {
  PotentialSpec out = *this;
  out.offset += c;
  return out;
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (background) {
    os << "background=rotation(" << background->frequency() << "," << background->x0() << ",["
       << background->sampler().constant;
    for (const auto& [a, b] : background->sampler().harmonics) os << ";" << a << "," << b;
    os << "]) ";
  }
  os << "noise=" << noise.to_string();
  if (offset != 0.0) os << " offset=" << offset;
  return os.str();
}

std::vector<double> sample_potential(const PotentialSpec& spec, std::int64_t length,
                                     const PathSpec& path) {
  if (length < 1) throw ParameterError("potential length must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(length));
  for (std::int64_t n = 0; n < length; ++n) {
    v[static_cast<std::size_t>(n)] = background_value(spec, path.phase + n) +
                                      spec.noise.quantile(uniform01(path.seed, path.stream, n)) +
                                      spec.offset;
  }
  return v;
}

IdsCurve ids_spectral_curve(const PotentialSpec& spec, const std::vector<double>& energies,
                            const SpectralOptions& opt) {
  if (opt.length < 1000) throw ParameterError("ids_spectral needs L >= 1000");
  if (opt.replicas < 1) throw ParameterError("ids_spectral needs replicas >= 1");
  const std::size_t ne = energies.size();
  const auto nr = static_cast<std::size_t>(opt.replicas);
  std::vector<double> counts(ne * nr);
  parallel_for(nr, opt.workers, [&](std::size_t r) {
    const PathSpec path{opt.seed, stream_id(StreamPurpose::spectral, static_cast<std::uint32_t>(r)),
                        static_cast<std::int64_t>(r) * opt.length};
    const auto v = sample_potential(spec, opt.length, path);
    for (std::size_t i = 0; i < ne; ++i) {
      counts[i * nr + r] =
          static_cast<double>(sturm_count(v, energies[i])) / static_cast<double>(opt.length);
    }
  });
  IdsCurve curve{energies, {}, {}, "spectral", opt.length, opt.seed};
  for (std::size_t i = 0; i < ne; ++i) {
    const auto stats = mean_and_stderr(std::span<const double>(counts).subspan(i * nr, nr));
    curve.ids.push_back(stats.mean);
    curve.std_errors.push_back(stats.std_error);
  }
  return curve;
}

Estimate ids_spectral(const PotentialSpec& spec, double e, const SpectralOptions& opt) {
  const IdsCurve c = ids_spectral_curve(spec, {e}, opt);
  return {c.ids[0], c.std_errors[0], opt.length, opt.replicas, opt.seed};
}

SchrodingerCocycle make_schrodinger_cocycle(const PotentialSpec& spec, double e_lo, double e_hi) {
  if (!(e_lo < e_hi)) throw ParameterError("energy window needs e_lo < e_hi");
  SchrodingerCocycle c;
  c.potential = spec;
  c.e_lo = e_lo;
  c.e_hi = e_hi;
  CocycleFamily& f = c.family;
  f.e_lo = e_lo;
  f.e_hi = e_hi;
  const double offset = spec.offset;
  if (spec.background) {
    f.kind = "schrodinger_background";
    f.base = NoisyRotationBase{*spec.background, spec.noise};
    const TrigPolynomial phi = spec.background->sampler();
    f.fiber_at = [phi, offset](double e) -> FiberAt {
      return [phi, offset, e](const BaseSymbol& s) {
        return projectivize(transfer_matrix(e, phi(s.x) + s.omega + offset));
      };
    };
  } else {
    f.kind = "anderson";
    f.base = IidBase{spec.noise};
    f.fiber_at = [offset](double e) -> FiberAt {
      return [offset, e](const BaseSymbol& s) {
        return projectivize(transfer_matrix(e, s.omega + offset));
      };
    };
  }
  return c;
}

CocycleFamily anderson_family(Distribution noise) {
  PotentialSpec spec;
  spec.noise = std::move(noise);
  return make_schrodinger_cocycle(spec, -1e300, 1e300).family;
}

SchrodingerCocycle calibrate_ids_anchor(SchrodingerCocycle cocycle, double e_ref,
                                        const AnchorOptions& opt) {
  const double floor_energy = -2.0 - cocycle.potential.bound();
  if (!(e_ref <= floor_energy)) {
    std::ostringstream os;
    os.precision(17);
    os << "reference energy " << e_ref << " is not below the spectrum bound " << floor_energy;
    throw ParameterError(os.str());
  }
  if (opt.grid_points < 2) throw ParameterError("anchor grid needs at least 2 points");
  CocycleFamily raw = cocycle.family;
  raw.calibration.reset();
  const double rho = birkhoff_rho(raw, e_ref, opt.birkhoff).value;
  // Below the spectrum the projective rotation number is 1 (no states).
  const auto k = static_cast<std::int64_t>(std::llround(1.0 - rho));
  const auto grid = linspace(e_ref, std::max(cocycle.e_hi, e_ref + 1e-9), opt.grid_points);
  BaseSymbol probe;
  if (const auto* iid = std::get_if<IidBase>(&raw.base)) {
    probe.omega = iid->law.quantile(0.0);
  } else if (const auto* noisy = std::get_if<NoisyRotationBase>(&raw.base)) {
    probe.omega = noisy->noise.quantile(0.0);
  }
  const double start = std::floor(raw.fiber_at(e_ref)(probe).eval(0.0));
  cocycle.family = calibrate_family(raw, grid, start + static_cast<double>(k));
  cocycle.anchored = true;
  cocycle.e_ref = e_ref;
  const double residual = 1.0 - birkhoff_rho(cocycle.family, e_ref, opt.birkhoff).value;
  if (std::abs(residual) > 0.02) {
    cocycle.anchored = false;
    throw CalibrationError("IDS at the reference energy is " + std::to_string(residual) +
                           " after calibration");
  }
  return cocycle;
}

Estimate angle_rotation_number(const SchrodingerCocycle& cocycle, double e,
                               const BirkhoffOptions& opt) {
  Estimate r = birkhoff_rho(cocycle.family, e, opt);
  r.value *= 0.5;
  r.std_error *= 0.5;
  return r;
}

Estimate ids_dynamical(const SchrodingerCocycle& cocycle, double e, const BirkhoffOptions& opt) {
  if (!cocycle.anchored) {
    throw CalibrationError("ids_dynamical needs a cocycle anchored by calibrate_ids_anchor");
  }
  Estimate r = angle_rotation_number(cocycle, e, opt);
  r.value = 1.0 - 2.0 * r.value;
  r.std_error *= 2.0;
  return r;
}

IdsCurve ids_dynamical_curve(const SchrodingerCocycle& cocycle,
                             const std::vector<double>& energies, const BirkhoffOptions& opt) {
  IdsCurve curve{energies, {}, {}, "dynamical", opt.n, opt.seed};
  for (double e : energies) {
    const Estimate r = ids_dynamical(cocycle, e, opt);
    curve.ids.push_back(r.value);
    curve.std_errors.push_back(r.std_error);
  }
  return curve;
}

Estimate increment_ergodic_background(const SchrodingerCocycle& cocycle, double e1, double e2,
                                      const BackgroundIncrementOptions& opt) {
  const auto* base = std::get_if<NoisyRotationBase>(&cocycle.family.base);
  if (base == nullptr) {
    throw StructuralError("increment_ergodic_background needs a rotation background");
  }
  if (opt.n_path < 1 || opt.fiber_samples < 1 || opt.batches < 2 || opt.n_base < opt.batches) {
    throw ParameterError(
        "increment_ergodic_background needs n_path, fiber_samples >= 1 and n_base >= batches >= 2");
  }
  const FiberAt g1 = cocycle.family.at(e1);
  const FiberAt g2 = cocycle.family.at(e2);
  const RotationBase& rot = base->background;
  const Distribution& noise = base->noise;
  const auto k_samples = static_cast<std::size_t>(opt.fiber_samples);

  std::vector<double> per_base(static_cast<std::size_t>(opt.n_base));
  parallel_for(per_base.size(), opt.workers, [&](std::size_t b) {
    const auto t = static_cast<std::int64_t>(b);
    const auto tag = static_cast<std::uint32_t>(b);
    const std::uint64_t plus_stream = stream_id(StreamPurpose::fiber_plus, tag);
    const std::uint64_t minus_stream = stream_id(StreamPurpose::fiber_minus, tag);
    const std::uint64_t now_stream = stream_id(StreamPurpose::monte_carlo, tag);
    std::vector<double> plus(k_samples), minus(k_samples);
    for (std::size_t k = 0; k < k_samples; ++k) {
      const auto row = static_cast<std::int64_t>(k) * opt.n_path;
      double y = 0.0;
      for (std::int64_t step = 0; step < opt.n_path; ++step) {
        const std::int64_t m = t - opt.n_path + step;
        const BaseSymbol s{noise.quantile(uniform01(opt.seed, plus_stream, row + step)), rot.at(m),
                           0};
        y = circle_point(g1(s).eval(y));
      }
      plus[k] = y;
      y = 0.0;
      for (std::int64_t step = 0; step < opt.n_path; ++step) {
        const std::int64_t m = t + opt.n_path - step;
        const BaseSymbol s{noise.quantile(uniform01(opt.seed, minus_stream, row + step)),
                           rot.at(m), 0};
        y = circle_point(g2(s).inv_eval(y));
      }
      minus[k] = y;
    }
    const auto nu_minus = EmpiricalCircleMeasure::from_samples(minus);
    std::vector<double> terms(k_samples);
    for (std::size_t k = 0; k < k_samples; ++k) {
      const BaseSymbol s{
          noise.quantile(uniform01(opt.seed, now_stream, static_cast<std::int64_t>(k))), rot.at(t),
          0};
      const double a = g1(s).eval(plus[k]);
      const double c = g2(s).eval(plus[k]);
      terms[k] = opt.orientation == PhiOrientation::derived ? phi_points(nu_minus, a, c)
                                                            : phi_points(nu_minus, c, a);
    }
    per_base[b] = pairwise_sum(terms) / static_cast<double>(k_samples);
  });

  std::vector<double> batch_means;
  for (int bt = 0; bt < opt.batches; ++bt) {
    const auto lo = static_cast<std::size_t>(opt.n_base * bt / opt.batches);
    const auto hi = static_cast<std::size_t>(opt.n_base * (bt + 1) / opt.batches);
    batch_means.push_back(pairwise_sum(std::span<const double>(per_base).subspan(lo, hi - lo)) /
                          static_cast<double>(hi - lo));
  }
  Estimate out;
  out.value = pairwise_sum(per_base) / static_cast<double>(per_base.size());
  out.std_error = mean_and_stderr(batch_means).std_error;
  out.n = opt.n_base * opt.fiber_samples;
  out.replicas = opt.batches;
  out.seed = opt.seed;
  return out;
}

}  // namespace rotnum
