#pragma once

// Atomic probability measures on the circle R/Z and on the line, with exact
// step-function CDFs.

#include <cstddef>
#include <utility>
#include <vector>

namespace rotnum {

class LiftedCircleMap;

/// Weighted atoms on [0,1). F(t) = nu([0,t)).
class EmpiricalCircleMeasure {
 public:
  /// Positions are reduced mod 1, sorted and merged; weights are normalized.
  EmpiricalCircleMeasure(std::vector<double> positions, std::vector<double> weights);
  /// Equal weights.
  static EmpiricalCircleMeasure from_samples(std::vector<double> positions);
  static EmpiricalCircleMeasure point(double position);
  /// Atoms at k/n, k = 0..n-1.
  static EmpiricalCircleMeasure uniform_grid(std::size_t n);

  std::size_t size() const noexcept { return positions_.size(); }
  const std::vector<double>& positions() const noexcept { return positions_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// nu([0,t)) for t in [0,1].
  double cdf(double t) const noexcept;
  /// floor(t) + F(frac t): the mass of [0,t) under the periodic lift.
  double lifted_cdf(double t) const noexcept;
  /// Atom index with cumulative weight covering u in [0,1).
  std::size_t atom_for(double u) const noexcept;
  double sample(double u) const noexcept { return positions_[atom_for(u)]; }

 private:
  EmpiricalCircleMeasure() = default;
  void finalize();

  std::vector<double> positions_;
  std::vector<double> weights_;
  std::vector<double> prefix_;  // prefix_[i] = weight of atoms 0..i-1
};

/// Compactly supported atomic probability measure on R.
class MeasureOnLine {
 public:
  MeasureOnLine(std::vector<double> positions, std::vector<double> weights);
  static MeasureOnLine point(double position);

  const std::vector<double>& positions() const noexcept { return positions_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// m((-inf, y])
  double cdf(double y) const noexcept;

 private:
  std::vector<double> positions_;
  std::vector<double> weights_;
  std::vector<double> prefix_;
};

/// Signed lifted mass of [a,b): F~(b) - F~(a).
double phi_points(const EmpiricalCircleMeasure& nu, double a, double b) noexcept;

/// Integral of F_m1 - F_m2 against the lifted measure.
double phi_measures(const EmpiricalCircleMeasure& nu, const MeasureOnLine& m1,
                    const MeasureOnLine& m2);

struct HolderProfile {
  std::vector<double> scales;    // decreasing
  std::vector<double> max_mass;  // largest mass of a closed arc of that length
  double fitted_alpha = 0.0;
  double fit_r2 = 0.0;
};

/// Needs at least 3 scales in (0,1).
HolderProfile holder_profile(const EmpiricalCircleMeasure& nu, std::vector<double> scales);

/// Rotation-invariant distance min_c sup_t |F1(t) - F2(t) - c|.
double kolmogorov_distance(const EmpiricalCircleMeasure& nu1, const EmpiricalCircleMeasure& nu2);

/// Image of the measure under the circle map.
EmpiricalCircleMeasure pushforward(const EmpiricalCircleMeasure& nu, const LiftedCircleMap& f);
/// Atoms as points of [0,1) on the line.
MeasureOnLine canonical_lift(const EmpiricalCircleMeasure& nu);
MeasureOnLine pushforward(const MeasureOnLine& m, const LiftedCircleMap& f);

/// Least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rotnum
