#include "rotnum/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rotnum/circle_maps.hpp"
#include "rotnum/errors.hpp"

namespace rotnum {

namespace {

void check_weights(const std::vector<double>& positions, const std::vector<double>& weights) {
  if (positions.empty()) throw ParameterError("measure needs at least one atom");
  if (positions.size() != weights.size()) {
    throw ParameterError("measure positions and weights differ in length");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!std::isfinite(positions[i])) throw ParameterError("measure atom is not finite");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw ParameterError("measure weights must be positive");
    }
  }
}

// Sorts atoms by position, merges exact duplicates and normalizes.
void sort_and_merge(std::vector<double>& pos, std::vector<double>& w) {
  std::vector<std::size_t> order(pos.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return pos[i] < pos[j]; });
  std::vector<double> p2;
  std::vector<double> w2;
  p2.reserve(pos.size());
  w2.reserve(pos.size());
  for (std::size_t i : order) {
    if (!p2.empty() && p2.back() == pos[i]) {
      w2.back() += w[i];
    } else {
      p2.push_back(pos[i]);
      w2.push_back(w[i]);
    }
  }
  const double total = std::accumulate(w2.begin(), w2.end(), 0.0);
  for (double& x : w2) x /= total;
  pos = std::move(p2);
  w = std::move(w2);
}

std::vector<double> prefix_sums(const std::vector<double>& w) {
  std::vector<double> prefix(w.size() + 1, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) prefix[i + 1] = prefix[i] + w[i];
  prefix.back() = 1.0;
  return prefix;
}

}  // namespace

EmpiricalCircleMeasure::EmpiricalCircleMeasure(std::vector<double> positions,
                                               std::vector<double> weights) {
  check_weights(positions, weights);
  for (double& p : positions) p = circle_point(p);
  positions_ = std::move(positions);
  weights_ = std::move(weights);
  finalize();
}

void EmpiricalCircleMeasure::finalize() {
  sort_and_merge(positions_, weights_);
  prefix_ = prefix_sums(weights_);
}

EmpiricalCircleMeasure EmpiricalCircleMeasure::from_samples(std::vector<double> positions) {
  std::vector<double> w(positions.size(), 1.0);
  return EmpiricalCircleMeasure(std::move(positions), std::move(w));
}

EmpiricalCircleMeasure EmpiricalCircleMeasure::point(double position) {
  return EmpiricalCircleMeasure({position}, {1.0});
}

EmpiricalCircleMeasure EmpiricalCircleMeasure::uniform_grid(std::size_t n) {
  if (n == 0) throw ParameterError("uniform_grid needs n >= 1");
  EmpiricalCircleMeasure m;
  m.positions_.resize(n);
  m.weights_.assign(n, 1.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    m.positions_[k] = static_cast<double>(k) / static_cast<double>(n);
  }
  m.prefix_ = prefix_sums(m.weights_);
  return m;
}

double EmpiricalCircleMeasure::cdf(double t) const noexcept {
  const auto it = std::lower_bound(positions_.begin(), positions_.end(), t);
  return prefix_[static_cast<std::size_t>(it - positions_.begin())];
}

double EmpiricalCircleMeasure::lifted_cdf(double t) const noexcept {
  const auto [whole, part] = split(t);
  return whole + cdf(part);
}

std::size_t EmpiricalCircleMeasure::atom_for(double u) const noexcept {
  const auto it = std::upper_bound(prefix_.begin() + 1, prefix_.end(), u);
  const auto i = static_cast<std::size_t>(it - (prefix_.begin() + 1));
  return std::min(i, positions_.size() - 1);
}

MeasureOnLine::MeasureOnLine(std::vector<double> positions, std::vector<double> weights) {
  check_weights(positions, weights);
  sort_and_merge(positions, weights);
  positions_ = std::move(positions);
  weights_ = std::move(weights);
  prefix_ = prefix_sums(weights_);
}

MeasureOnLine MeasureOnLine::point(double position) { return MeasureOnLine({position}, {1.0}); }

double MeasureOnLine::cdf(double y) const noexcept {
  const auto it = std::upper_bound(positions_.begin(), positions_.end(), y);
  return prefix_[static_cast<std::size_t>(it - positions_.begin())];
}

double phi_points(const EmpiricalCircleMeasure& nu, double a, double b) noexcept {
  if (a == b) return 0.0;
  return nu.lifted_cdf(b) - nu.lifted_cdf(a);
}

double phi_measures(const EmpiricalCircleMeasure& nu, const MeasureOnLine& m1,
                    const MeasureOnLine& m2) {
  // F_m1 - F_m2 is constant on [p_i, p_{i+1}) between consecutive breakpoints
  // and vanishes outside the joint hull.
  std::vector<double> breaks;
  breaks.reserve(m1.positions().size() + m2.positions().size());
  std::merge(m1.positions().begin(), m1.positions().end(), m2.positions().begin(),
             m2.positions().end(), std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double diff = m1.cdf(breaks[i]) - m2.cdf(breaks[i]);
    if (diff != 0.0) sum += diff * phi_points(nu, breaks[i], breaks[i + 1]);
  }
  return sum;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("line fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

HolderProfile holder_profile(const EmpiricalCircleMeasure& nu, std::vector<double> scales) {
  if (scales.size() < 3) throw ParameterError("holder_profile needs at least 3 scales");
  for (double r : scales) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("holder_profile scales must lie in (0,1)");
  }
  std::sort(scales.begin(), scales.end(), std::greater<>());
  const auto& pos = nu.positions();
  const auto& w = nu.weights();
  const std::size_t n = pos.size();
  HolderProfile out;
  out.scales = scales;
  for (double r : scales) {
    // Arcs [pos_i, pos_i + r] over the doubled atom list.
    double best = 0.0;
    double window = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (j < i) {
        j = i;
        window = 0.0;
      }
      while (j < i + n) {
        const double pj = j < n ? pos[j] : pos[j - n] + 1.0;
        if (pj - pos[i] > r) break;
        window += w[j < n ? j : j - n];
        ++j;
      }
      best = std::max(best, window);
      window -= w[i];
    }
    out.max_mass.push_back(std::min(best, 1.0));
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    lx.push_back(std::log(scales[k]));
    ly.push_back(std::log(out.max_mass[k]));
  }
  const LineFit fit = fit_line(lx, ly);
  out.fitted_alpha = fit.slope;
  out.fit_r2 = fit.r2;
  return out;
}

double kolmogorov_distance(const EmpiricalCircleMeasure& nu1, const EmpiricalCircleMeasure& nu2) {
  const auto& p1 = nu1.positions();
  const auto& w1 = nu1.weights();
  const auto& p2 = nu2.positions();
  const auto& w2 = nu2.weights();
  std::size_t i = 0, j = 0;
  double c1 = 0.0, c2 = 0.0;
  double hi = 0.0, lo = 0.0;
  while (i < p1.size() || j < p2.size()) {
    const double t = std::min(i < p1.size() ? p1[i] : 2.0, j < p2.size() ? p2[j] : 2.0);
    while (i < p1.size() && p1[i] == t) c1 += w1[i++];
    while (j < p2.size() && p2[j] == t) c2 += w2[j++];
    const double d = c1 - c2;
    hi = std::max(hi, d);
    lo = std::min(lo, d);
  }
  return 0.5 * (hi - lo);
}

EmpiricalCircleMeasure pushforward(const EmpiricalCircleMeasure& nu, const LiftedCircleMap& f) {
  std::vector<double> pos;
  pos.reserve(nu.size());
  for (double p : nu.positions()) pos.push_back(f.eval(p));
  return EmpiricalCircleMeasure(std::move(pos), nu.weights());
}

MeasureOnLine canonical_lift(const EmpiricalCircleMeasure& nu) {
  return MeasureOnLine(nu.positions(), nu.weights());
}

MeasureOnLine pushforward(const MeasureOnLine& m, const LiftedCircleMap& f) {
  std::vector<double> pos;
  pos.reserve(m.positions().size());
  for (double p : m.positions()) pos.push_back(f.eval(p));
  return MeasureOnLine(std::move(pos), m.weights());
}

}  // namespace rotnum
