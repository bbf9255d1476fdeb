#include "rotnum/circle_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rotnum/errors.hpp"

namespace rotnum {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxBisectionDepth = 40;

double morse_smale_forward(double s, double t) noexcept {
  return t - s / kTwoPi * std::sin(kTwoPi * t);
}

// Solves t - (s/2pi) sin(2 pi t) = z by bracketed Newton.
double morse_smale_solve(double s, double z) noexcept {
  const double half_width = s / kTwoPi;
  double lo = z - half_width;
  double hi = z + half_width;
  // First-order inverse as the starting guess.
  double x = z + half_width * std::sin(kTwoPi * z);
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z));
  for (int it = 0; it < 100; ++it) {
    const double g = morse_smale_forward(s, x) - z;
    if (g == 0.0) return x;
    if (g > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double slope = 1.0 - s * std::cos(kTwoPi * x);
    double next = x - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= tol) return next;
    x = next;
  }
  return x;
}

}  // namespace

SplitPoint split(double y) noexcept {
  double whole = std::floor(y);
  double part = y - whole;
  if (part >= 1.0) {
    whole += 1.0;
    part = 0.0;
  }
  return {whole, part};
}

double circle_point(double y) noexcept { return split(y).part; }

SL2Matrix SL2Matrix::checked(double a, double b, double c, double d) {
  const SL2Matrix m{a, b, c, d};
  if (!std::isfinite(m.det()) || std::abs(m.det() - 1.0) >= 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix (" << a << ", " << b << "; " << c << ", " << d << ") has determinant "
       << m.det() << ", expected 1";
    throw InvalidMatrix(os.str());
  }
  return m;
}

SL2Matrix SL2Matrix::rotation(double angle) noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

namespace {

struct EvalVisitor {
  double y;
  double operator()(const detail::RotationLift& r) const noexcept { return y + r.shift; }
  double operator()(const detail::ProjectiveLift& p) const noexcept {
    const auto [k, t] = split(y);
    const double theta = kPi * t;
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    const double w1 = p.m.a * cs + p.m.b * sn;
    const double w2 = p.m.c * cs + p.m.d * sn;
    // Angle swept from m e1 to m u(theta); cross product is det(m) sin(theta).
    const double dot = p.m.a * w1 + p.m.c * w2;
    return k + p.base + std::atan2(sn, dot) / kPi;
  }
  double operator()(const detail::MorseSmaleLift& f) const noexcept {
    const auto [k, t] = split(y);
    return k + (f.inverted ? morse_smale_solve(f.s, t) : morse_smale_forward(f.s, t));
  }
  double operator()(const detail::ComposedLift& c) const noexcept {
    double v = y;
    for (const auto& m : *c.maps) v = m.eval(v);
    return v;
  }
};

struct InverseVisitor {
  double z;
  double operator()(const detail::RotationLift& r) const noexcept { return z - r.shift; }
  double operator()(const detail::ProjectiveLift& p) const noexcept {
    // Angles are measured from the direction u(pi base) = sigma m e1 / |m e1|,
    // which the inverse sends to sigma e1 / |m e1|.
    const double c0 = std::cos(kPi * p.base);
    const double s0 = std::sin(kPi * p.base);
    const double sigma = p.m.a * c0 + p.m.c * s0 < 0.0 ? -1.0 : 1.0;
    const double scale = sigma / std::hypot(p.m.a, p.m.c);
    const auto [k, t] = split(z - p.base);
    const double cs = std::cos(kPi * t);
    const double sn = std::sin(kPi * t);
    // u(pi (base + t)) by the angle addition formula.
    const double u1 = c0 * cs - s0 * sn;
    const double u2 = s0 * cs + c0 * sn;
    const double first = (p.m.d * u1 - p.m.b * u2) * scale;
    return k + std::atan2(sn, first) / kPi;
  }
  double operator()(const detail::MorseSmaleLift& f) const noexcept {
    const auto [k, t] = split(z);
    return k + (f.inverted ? morse_smale_forward(f.s, t) : morse_smale_solve(f.s, t));
  }
  double operator()(const detail::ComposedLift& c) const noexcept {
    double v = z;
    for (auto it = c.maps->rbegin(); it != c.maps->rend(); ++it) v = it->inv_eval(v);
    return v;
  }
};

struct DerivVisitor {
  double y;
  double operator()(const detail::RotationLift&) const noexcept { return 1.0; }
  double operator()(const detail::ProjectiveLift& p) const noexcept {
    const double theta = kPi * y;
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    const double w1 = p.m.a * cs + p.m.b * sn;
    const double w2 = p.m.c * cs + p.m.d * sn;
    return 1.0 / (w1 * w1 + w2 * w2);
  }
  double operator()(const detail::MorseSmaleLift& f) const noexcept {
    if (!f.inverted) return 1.0 - f.s * std::cos(kTwoPi * y);
    const double x = morse_smale_solve(f.s, split(y).part);
    return 1.0 / (1.0 - f.s * std::cos(kTwoPi * x));
  }
  double operator()(const detail::ComposedLift& c) const noexcept {
    double d = 1.0;
    double v = y;
    for (const auto& m : *c.maps) {
      d *= m.deriv(v);
      v = m.eval(v);
    }
    return d;
  }
};

detail::ProjectiveLift make_projective(const SL2Matrix& m, double base) { return {m, base}; }

}  // namespace

double LiftedCircleMap::eval(double y) const noexcept {
  return std::visit(EvalVisitor{y}, rep_) + static_cast<double>(offset_);
}

double LiftedCircleMap::inv_eval(double y) const noexcept {
  return std::visit(InverseVisitor{y - static_cast<double>(offset_)}, rep_);
}

double LiftedCircleMap::deriv(double y) const noexcept { return std::visit(DerivVisitor{y}, rep_); }

LiftedCircleMap LiftedCircleMap::shifted(std::int64_t k) const {
  return LiftedCircleMap(rep_, offset_ + k);
}

LiftedCircleMap LiftedCircleMap::inverse() const {
  // For a degree-one lift L, (L + k)^{-1}(z) = L^{-1}(z) - k.
  struct Visitor {
    Rep operator()(const detail::RotationLift& r) const { return detail::RotationLift{-r.shift}; }
    Rep operator()(const detail::ProjectiveLift& p) const {
      return make_projective(p.m.inverse(), InverseVisitor{0.0}(p));
    }
    Rep operator()(const detail::MorseSmaleLift& f) const {
      return detail::MorseSmaleLift{f.s, !f.inverted};
    }
    Rep operator()(const detail::ComposedLift& c) const {
      auto maps = std::make_shared<std::vector<LiftedCircleMap>>();
      maps->reserve(c.maps->size());
      for (auto it = c.maps->rbegin(); it != c.maps->rend(); ++it) maps->push_back(it->inverse());
      return detail::ComposedLift{std::move(maps)};
    }
  };
  return LiftedCircleMap(std::visit(Visitor{}, rep_), -offset_);
}

LiftedCircleMap::Kind LiftedCircleMap::kind() const noexcept {
  return static_cast<Kind>(rep_.index());
}

std::string LiftedCircleMap::describe() const {
  std::ostringstream os;
  os.precision(17);
  struct Visitor {
    std::ostringstream& os;
    void operator()(const detail::RotationLift& r) const { os << "rotation(" << r.shift << ")"; }
    void operator()(const detail::ProjectiveLift& p) const {
      os << "projective(" << p.m.a << "," << p.m.b << "," << p.m.c << "," << p.m.d
         << "; base=" << p.base << ")";
    }
    void operator()(const detail::MorseSmaleLift& f) const {
      os << (f.inverted ? "morse_smale_inverse(" : "morse_smale(") << f.s << ")";
    }
    void operator()(const detail::ComposedLift& c) const {
      os << "compose[";
      for (std::size_t i = 0; i < c.maps->size(); ++i) {
        os << (i ? ", " : "") << (*c.maps)[i].describe();
      }
      os << "]";
    }
  };
  std::visit(Visitor{os}, rep_);
  if (offset_ != 0) os << "+" << offset_;
  return os.str();
}

LiftedCircleMap projectivize(const SL2Matrix& m, double anchor) {
  const SL2Matrix checked = SL2Matrix::checked(m.a, m.b, m.c, m.d);
  // Image of the horizontal direction, as a point of [0,1).
  double image = std::atan2(checked.c, checked.a) / kPi;
  if (image < 0.0) image += 1.0;
  if (image >= 1.0) image = 0.0;
  const double lift_shift = std::ceil(anchor - image);
  return LiftedCircleMap(make_projective(checked, image + lift_shift));
}

LiftedCircleMap morse_smale(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw ParameterError("morse_smale strength must lie in (0,1), got " + std::to_string(s));
  }
  return LiftedCircleMap(detail::MorseSmaleLift{s, false});
}

LiftedCircleMap compose(const LiftedCircleMap& g, const LiftedCircleMap& h) {
  auto maps = std::make_shared<std::vector<LiftedCircleMap>>();
  auto append = [&](const LiftedCircleMap& m) {
    const auto* c = std::get_if<detail::ComposedLift>(&m.rep_);
    if (c != nullptr && m.offset_ == 0) {
      maps->insert(maps->end(), c->maps->begin(), c->maps->end());
    } else {
      maps->push_back(m);
    }
  };
  append(h);
  append(g);
  return LiftedCircleMap(detail::ComposedLift{std::move(maps)});
}

MapFamily rotation_family(double alpha0) {
  return {"rotation", {alpha0},
          [alpha0](double e) { return LiftedCircleMap::rotation(alpha0 + e); }};
}

MapFamily moebius_family(const SL2Matrix& m) {
  const LiftedCircleMap base = projectivize(m, 0.0);
  return {"moebius", {m.a, m.b, m.c, m.d},
          [base](double e) { return compose(base, LiftedCircleMap::rotation(e)); }};
}

std::int64_t LiftCalibration::offset_at(
    double e, const std::function<LiftedCircleMap(double)>& raw) const {
  if (nodes_.empty()) return 0;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), e,
                             [](double v, const Node& n) { return v < n.e; });
  const Node& ref = it == nodes_.begin() ? nodes_.front() : *std::prev(it);
  if (ref.e == e) return ref.offset;
  return static_cast<std::int64_t>(std::llround(ref.value - raw(e).eval(0.0)));
}

namespace {

struct Continuation {
  const MapFamily& family;
  std::vector<LiftCalibration::Node>& nodes;

  LiftCalibration::Node continue_to(double e, double from_value) const {
    const double raw = family.at(e).eval(0.0);
    const auto k = static_cast<std::int64_t>(std::llround(from_value - raw));
    return {e, k, raw + static_cast<double>(k)};
  }

  void step(const LiftCalibration::Node& from, double e_to, int depth) const {
    const double e_mid = 0.5 * (from.e + e_to);
    const auto direct = continue_to(e_to, from.value);
    const auto mid = continue_to(e_mid, from.value);
    const auto two_hop = continue_to(e_to, mid.value);
    const bool accepted = std::abs(direct.value - from.value) < 0.5 &&
                          std::abs(mid.value - from.value) < 0.5 &&
                          std::abs(two_hop.value - mid.value) < 0.5 &&
                          two_hop.offset == direct.offset;
    if (accepted) {
      nodes.push_back(direct);
      return;
    }
    if (depth >= kMaxBisectionDepth || !(e_mid > from.e && e_mid < e_to)) {
      std::ostringstream os;
      os.precision(17);
      os << "lift continuation failed on [" << from.e << ", " << e_to << "]";
      throw ContinuityFailure(os.str(), from.e, e_to);
    }
    step(from, e_mid, depth + 1);
    step(nodes.back(), e_to, depth + 1);
  }
};

}  // namespace

LiftCalibration calibrate_lifts(const MapFamily& family, const std::vector<double>& e_grid,
                                double base_anchor) {
  if (e_grid.empty()) throw ParameterError("calibrate_lifts needs a non-empty grid");
  if (!std::is_sorted(e_grid.begin(), e_grid.end())) {
    throw ParameterError("calibrate_lifts needs a sorted grid");
  }
  std::vector<LiftCalibration::Node> nodes;
  const double raw0 = family.at(e_grid.front()).eval(0.0);
  const auto k0 = static_cast<std::int64_t>(std::ceil(base_anchor - raw0));
  nodes.push_back({e_grid.front(), k0, raw0 + static_cast<double>(k0)});
  const Continuation cont{family, nodes};
  for (std::size_t i = 1; i < e_grid.size(); ++i) {
    if (e_grid[i] == nodes.back().e) continue;
    cont.step(nodes.back(), e_grid[i], 0);
  }
  return LiftCalibration(std::move(nodes));
}

MapFamily calibrated(const MapFamily& family, std::shared_ptr<const LiftCalibration> calibration) {
  auto raw = family.at;
  MapFamily out = family;
  out.at = [raw, calibration](double e) {
    return raw(e).shifted(calibration->offset_at(e, raw));
  };
  return out;
}

}  // namespace rotnum
