#pragma once

// Circle cocycles over a base driver: lifted iteration, Birkhoff rotation
// numbers, stationary and invariant fiber measures, the translation value and
// the measure-based increment formulas for rho(E2) - rho(E1).

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rotnum/circle_maps.hpp"
#include "rotnum/drivers.hpp"
#include "rotnum/measures.hpp"

namespace rotnum {

struct IidBase {
  Distribution law;
};

/// Rotation background sampled through its trigonometric polynomial, plus iid
/// noise.
struct NoisyRotationBase {
  RotationBase background;
  Distribution noise;
};

using Base = std::variant<IidBase, PeriodicBase, RotationBase, NoisyRotationBase>;

/// What a fiber map may depend on at one time step.
struct BaseSymbol {
  double omega = 0.0;  // iid draw
  double x = 0.0;      // rotation base point
  int label = 0;       // periodic label
};

/// Selects one realization of the base sequence.
struct PathSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::int64_t phase = 0;  // time offset for periodic and rotation bases
};

BaseSymbol symbol_at(const Base& base, const PathSpec& path, std::int64_t n);
bool is_iid(const Base& base) noexcept;

using FiberAt = std::function<LiftedCircleMap(const BaseSymbol&)>;

/// Base driver plus E -> (symbol -> lifted fiber map).
struct CocycleFamily {
  std::string kind;
  Base base;
  std::function<FiberAt(double)> fiber_at;  // canonical lifts
  double e_lo = -1e300;
  double e_hi = 1e300;
  std::shared_ptr<const LiftCalibration> calibration;
  BaseSymbol probe;  // symbol whose lift continuation defines the calibration
  std::map<int, std::int64_t> label_offsets;  // applied after calibration

  /// Fiber maps at E with calibrated branch offsets applied.
  FiberAt at(double e) const;
  LiftedCircleMap fiber(double e, const BaseSymbol& s) const { return at(e)(s); }
};

/// Runs calibrate_lifts along `grid` for a set of probe symbols and stores the
/// result. Throws ContinuityFailure when probes disagree on the offsets.
CocycleFamily calibrate_family(CocycleFamily family, const std::vector<double>& grid,
                               double base_anchor = 0.0);

/// Every fiber lift over label l moved by offsets[l] (missing labels: 0).
CocycleFamily with_label_offsets(CocycleFamily family, std::map<int, std::int64_t> offsets);

CocycleFamily rigid_rotation_family(double alpha);
/// Fibers R_{E + omega}.
CocycleFamily iid_rotation_family(Distribution beta);
/// Fibers R_{alpha[label] + E}.
CocycleFamily rotation_periodic_family(PeriodicBase base, std::vector<double> alphas);
/// Fibers projectivize(matrices[label]) o R_E.
CocycleFamily moebius_periodic_family(PeriodicBase base, std::vector<SL2Matrix> matrices);
/// omega = 1 selects R_E o f, omega = 2 selects R_E o f^{-1}, f = morse_smale(s).
CocycleFamily morse_smale_family(double s, Distribution law);

/// Value with standard error. `replicas` counts the independent replicas or
/// batches the error was computed from.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;
};
using RotationEstimate = Estimate;

double combined_error(const Estimate& a, const Estimate& b) noexcept;

/// S_n(y) = f~_{n-1} o ... o f~_0 (y~) - y~ with y~ the lift of y in [0,1).
double iterate_shift(const CocycleFamily& family, double e, const PathSpec& path, double y,
                     std::int64_t n);

struct BirkhoffOptions {
  std::int64_t n = 1000000;
  std::int64_t burn_in = 1000;
  int replicas = 16;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Mean of S_n / n over replicas started at y = 0; stderr over replicas.
RotationEstimate birkhoff_rho(const CocycleFamily& family, double e, const BirkhoffOptions& opt);

enum class Direction { forward, backward };

struct StationaryOptions {
  std::int64_t n_burn = 1000;
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0;
  double tolerance = 0.05;
  int max_refinements = 2;  // each doubles n_burn and n_samples
};

struct StationaryEstimate {
  EmpiricalCircleMeasure measure;
  double residual = 0.0;  // distance to a Monte Carlo pushforward of itself
  bool converged = false;
  std::int64_t n_samples = 0;
};

/// Empirical measure of one random orbit (iid bases only). Backward orbits use
/// the inverse maps on their own stream.
StationaryEstimate estimate_stationary(const CocycleFamily& family, double e, Direction direction,
                                       const StationaryOptions& opt);

/// The forward and backward stationary measures together.
struct StationaryPair {
  StationaryEstimate forward;
  StationaryEstimate backward;
};

struct McOptions {
  std::int64_t n_mc = 1000000;
  int batches = 16;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// E over (omega, y ~ nu_plus) of Phi_{nu_minus}(g~_{E1,omega}(y), g~_{E2,omega}(y)).
Estimate increment_thm2(const CocycleFamily& family, double e1, double e2,
                        const EmpiricalCircleMeasure& nu_plus,
                        const EmpiricalCircleMeasure& nu_minus, const McOptions& opt);

/// Product-measure mass of {g~_{E1}(y) <= z~ < g~_{E2}(y)} by sampling
/// (omega, y, z). Fibers decreasing in E use the reflected region with sign -1.
/// Throws MonotonicityViolation on mixed orientation.
Estimate increment_corollary(const CocycleFamily& family, double e1, double e2,
                             const EmpiricalCircleMeasure& nu_plus,
                             const EmpiricalCircleMeasure& nu_minus, const McOptions& opt);

struct InvariantMeasureField {
  PeriodicBase base;
  std::vector<EmpiricalCircleMeasure> fiber_measures;
  int cycle_period = 0;  // period of the detected attracting cycle, 0 if none
};

/// Invariant measure of the return map over x_0, pushed to the other fibers.
InvariantMeasureField invariant_field_periodic(const CocycleFamily& family, double e,
                                               const PeriodicBase& base, std::int64_t n);

/// Field x -> (f_{E,T^{-1}x})_* nu_{T^{-1}x}.
InvariantMeasureField push_field(const CocycleFamily& family, double e,
                                 const InvariantMeasureField& field);

/// max_x kolmogorov_distance((f_{E,x})_* nu_x, nu_{Tx}).
double pushforward_residual(const CocycleFamily& family, double e,
                            const InvariantMeasureField& field);

/// Phi_nu(f~_{E1,x}(y), f~_{E2,x}(y)).
double theta(const CocycleFamily& family, double e1, double e2, const BaseSymbol& x,
             const EmpiricalCircleMeasure& nu, double y);

/// (1/p) sum_x sum_atoms w * theta_{E1,E2,x; nu_{E2,Tx}}(y).
double increment_thm1_periodic(const CocycleFamily& family, double e1, double e2,
                               const InvariantMeasureField& field_e1,
                               const InvariantMeasureField& field_e2);

/// T(F~^n; nu1, nu2) with the lifts of nu1 supported on [0,1).
double translation_value(const CocycleFamily& family, double e, const InvariantMeasureField& nu1,
                         const InvariantMeasureField& nu2, int n);

struct LiftCheck {
  double reference = 0.0;
  double shifted = 0.0;
  bool passed = false;
};

/// Recomputes `increment` on the family with label offsets applied.
LiftCheck lift_independence_check(const CocycleFamily& family,
                                  const std::map<int, std::int64_t>& offsets,
                                  const std::function<double(const CocycleFamily&)>& increment,
                                  double tolerance = 1e-12);

}  // namespace rotnum
