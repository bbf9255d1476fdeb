#pragma once

// Orientation-preserving circle homeomorphisms represented by monotone
// degree-one lifts R -> R, with the circle taken as R/Z.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace rotnum {

/// Real 2x2 matrix of unit determinant.
struct SL2Matrix {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const noexcept { return a * d - b * c; }
  SL2Matrix inverse() const noexcept { return {d, -b, -c, a}; }
  SL2Matrix operator*(const SL2Matrix& o) const noexcept {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }

  /// Validating constructor; throws InvalidMatrix when |det - 1| >= 1e-12.
  static SL2Matrix checked(double a, double b, double c, double d);
  /// Rotation of R^2 by `angle` radians.
  static SL2Matrix rotation(double angle) noexcept;
};

/// Integer and fractional parts of a lifted coordinate, y = whole + part with
/// part in [0,1).
struct SplitPoint {
  double whole;
  double part;
};
SplitPoint split(double y) noexcept;
/// Fractional part in [0,1).
double circle_point(double y) noexcept;

class LiftedCircleMap;

namespace detail {

struct RotationLift {
  double shift;
};

// Projective action of an SL2 matrix on RP^1 in the coordinate
// y = (direction angle)/pi. `base` is the lift value at y = 0.
struct ProjectiveLift {
  SL2Matrix m;
  double base;
};

// y - (s / 2 pi) sin(2 pi y), or its inverse when `inverted`.
struct MorseSmaleLift {
  double s;
  bool inverted;
};

// Applied front to back.
struct ComposedLift {
  std::shared_ptr<const std::vector<LiftedCircleMap>> maps;
};

}  // namespace detail

/// Monotone degree-one lift of an orientation-preserving circle homeomorphism.
///
/// Values are immutable; evaluation is const and thread-safe. The map carries
/// an integer branch offset added on top of its canonical lift.
class LiftedCircleMap {
 public:
  enum class Kind { rotation, projective, morse_smale, composed };

  LiftedCircleMap() : rep_(detail::RotationLift{0.0}) {}

  static LiftedCircleMap identity() { return rotation(0.0); }
  static LiftedCircleMap rotation(double alpha) {
    return LiftedCircleMap(detail::RotationLift{alpha});
  }

  double eval(double y) const noexcept;
  double inv_eval(double y) const noexcept;
  /// Derivative of the lift, always positive.
  double deriv(double y) const noexcept;

  std::int64_t branch_offset() const noexcept { return offset_; }
  /// Same circle map, lift moved by k.
  LiftedCircleMap shifted(std::int64_t k) const;
  LiftedCircleMap inverse() const;
  Kind kind() const noexcept;
  std::string describe() const;

 private:
  using Rep = std::variant<detail::RotationLift, detail::ProjectiveLift, detail::MorseSmaleLift,
                           detail::ComposedLift>;
  explicit LiftedCircleMap(Rep rep, std::int64_t offset = 0)
      : rep_(std::move(rep)), offset_(offset) {}

  friend LiftedCircleMap projectivize(const SL2Matrix& m, double anchor);
  friend LiftedCircleMap morse_smale(double s);
  friend LiftedCircleMap compose(const LiftedCircleMap& g, const LiftedCircleMap& h);

  Rep rep_;
  std::int64_t offset_ = 0;
};

/// Lift of the projective action of `m` in the coordinate y = theta/pi, with
/// eval(0) in [anchor, anchor + 1). Throws InvalidMatrix for det != 1.
LiftedCircleMap projectivize(const SL2Matrix& m, double anchor = 0.0);

/// f(y) = y - (s / 2 pi) sin(2 pi y): attractor at 0 (multiplier 1 - s),
/// repeller at 1/2 (multiplier 1 + s). Requires 0 < s < 1.
LiftedCircleMap morse_smale(double s);

/// g o h.
LiftedCircleMap compose(const LiftedCircleMap& g, const LiftedCircleMap& h);

/// One-parameter family E -> lifted map.
struct MapFamily {
  std::string kind;
  std::vector<double> params;
  std::function<LiftedCircleMap(double)> at;
};

MapFamily rotation_family(double alpha0 = 0.0);
/// E -> projectivize(m) o R_E.
MapFamily moebius_family(const SL2Matrix& m);

/// Piecewise-constant branch offsets making E -> eval_E(0) continuous.
class LiftCalibration {
 public:
  struct Node {
    double e;
    std::int64_t offset;
    double value;  // calibrated eval_E(0)
  };

  LiftCalibration() = default;
  explicit LiftCalibration(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  bool empty() const noexcept { return nodes_.empty(); }
  /// Offset for an arbitrary E, continued from the nearest node at or below E.
  std::int64_t offset_at(double e, const std::function<LiftedCircleMap(double)>& raw) const;

 private:
  std::vector<Node> nodes_;
};

/// Assigns branch offsets along the sorted grid by continuation at the probe
/// point y = 0. A step is accepted when the continued values differ by less
/// than 1/2 and agree with the two-hop continuation through the midpoint;
/// otherwise it is bisected (depth <= 40). The first grid point is placed in
/// [base_anchor, base_anchor + 1). Throws ContinuityFailure.
LiftCalibration calibrate_lifts(const MapFamily& family, const std::vector<double>& e_grid,
                                double base_anchor = 0.0);

/// The family with calibrated offsets applied.
MapFamily calibrated(const MapFamily& family, std::shared_ptr<const LiftCalibration> calibration);

}  // namespace rotnum
