#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "rotnum/circle_maps.hpp"
#include "rotnum/drivers.hpp"
#include "rotnum/errors.hpp"
#include "rotnum/measures.hpp"

using namespace rotnum;

namespace {

std::vector<double> uniforms(std::uint64_t stream, std::size_t n) {
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = uniform01(7, stream, static_cast<std::int64_t>(i));
  return u;
}

}  // namespace

TEST(EmpiricalMeasure, NormalizesSortsAndMerges) {
  const EmpiricalCircleMeasure nu({0.7, -0.25, 1.3, 0.7}, {1, 1, 1, 1});
  ASSERT_EQ(nu.size(), 3u);
  EXPECT_DOUBLE_EQ(nu.positions()[0], 0.3);
  EXPECT_DOUBLE_EQ(nu.positions()[1], 0.7);
  EXPECT_DOUBLE_EQ(nu.positions()[2], 0.75);
  EXPECT_DOUBLE_EQ(nu.weights()[1], 0.5);
  const double total = std::accumulate(nu.weights().begin(), nu.weights().end(), 0.0);
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(nu.cdf(0.0), 0.0);
  EXPECT_NEAR(nu.cdf(1.0), 1.0, 1e-15);
}

TEST(EmpiricalMeasure, CdfIsHalfOpen) {
  const auto nu = EmpiricalCircleMeasure::point(0.4);
  EXPECT_EQ(nu.cdf(0.4), 0.0);
  EXPECT_EQ(nu.cdf(std::nextafter(0.4, 1.0)), 1.0);
  EXPECT_EQ(nu.lifted_cdf(2.4), 2.0);
  EXPECT_EQ(nu.lifted_cdf(-0.5), 0.0);
  EXPECT_EQ(nu.lifted_cdf(-0.7), -1.0);
}

TEST(EmpiricalMeasure, RejectsBadWeights) {
  EXPECT_THROW(EmpiricalCircleMeasure({0.1, 0.2}, {1.0, -1.0}), ParameterError);
  EXPECT_THROW(EmpiricalCircleMeasure({}, {}), ParameterError);
  EXPECT_THROW(EmpiricalCircleMeasure({0.1}, {1.0, 2.0}), ParameterError);
}

TEST(Phi, LebesgueMeasuresLength) {
  const auto nu = EmpiricalCircleMeasure::uniform_grid(1000000);
  EXPECT_NEAR(phi_points(nu, 0.2, 0.7), 0.5, 1e-6);
  EXPECT_NEAR(phi_points(nu, 0.7, 0.2), -0.5, 1e-6);
  EXPECT_NEAR(phi_points(nu, -1.3, 2.1), 3.4, 2e-6);
}

TEST(Phi, EqualEndpointsGiveZero) {
  const EmpiricalCircleMeasure nu(uniforms(1, 20), uniforms(2, 20));
  for (double a : {-3.0, 0.0, nu.positions()[3], 7.25}) EXPECT_EQ(phi_points(nu, a, a), 0.0);
}

TEST(Phi, PointMassCountsLiftedAtoms) {
  const auto delta0 = EmpiricalCircleMeasure::point(0.0);
  EXPECT_EQ(phi_points(delta0, -0.5, 0.5), 1.0);
  EXPECT_EQ(phi_points(delta0, 0.0, 1.0), 1.0);   // atom at a is in
  EXPECT_EQ(phi_points(delta0, -1.0, 0.0), 1.0);  // atom at b is out, -1 is in
  EXPECT_EQ(phi_points(delta0, 0.5, 3.5), 3.0);
}

TEST(Phi, MeasuresReduceToPoints) {
  const EmpiricalCircleMeasure nu(uniforms(3, 30), uniforms(4, 30));
  EXPECT_NEAR(phi_measures(nu, MeasureOnLine::point(-0.3), MeasureOnLine::point(1.9)),
              phi_points(nu, -0.3, 1.9), 1e-14);
  const MeasureOnLine m({-0.2, 0.5, 1.4}, {0.2, 0.3, 0.5});
  EXPECT_EQ(phi_measures(nu, m, m), 0.0);
}

TEST(Phi, ProductCouplingBruteForce) {
  const EmpiricalCircleMeasure nu(uniforms(5, 40), uniforms(6, 40));
  const auto ua = uniforms(7, 50), ub = uniforms(8, 50), wa = uniforms(9, 50), wb = uniforms(10, 50);
  std::vector<double> a(50), b(50);
  for (int i = 0; i < 50; ++i) {
    a[i] = 4 * ua[i] - 2;
    b[i] = 4 * ub[i] - 1;
  }
  const MeasureOnLine m1(a, wa), m2(b, wb);
  const double sa = std::accumulate(wa.begin(), wa.end(), 0.0);
  const double sb = std::accumulate(wb.begin(), wb.end(), 0.0);
  double brute = 0.0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) brute += wa[i] / sa * wb[j] / sb * phi_points(nu, a[i], b[j]);
  EXPECT_NEAR(phi_measures(nu, m1, m2), brute, 1e-12);
}

TEST(HolderProfile, LebesgueIsLipschitz) {
  const auto nu = EmpiricalCircleMeasure::uniform_grid(10000);
  const auto prof = holder_profile(nu, {0.1, 0.01, 0.001});
  EXPECT_NEAR(prof.max_mass[0], 0.1, 2e-4);
  EXPECT_NEAR(prof.max_mass[1], 0.01, 2e-4);
  EXPECT_NEAR(prof.fitted_alpha, 1.0, 0.05);
}

TEST(HolderProfile, AtomHasExponentZero) {
  const auto prof = holder_profile(EmpiricalCircleMeasure::point(0.3), {0.1, 0.01, 0.001});
  for (double m : prof.max_mass) EXPECT_EQ(m, 1.0);
  EXPECT_NEAR(prof.fitted_alpha, 0.0, 1e-12);
}

TEST(HolderProfile, BoundedDensity) {
  auto u = uniforms(11, 100000);
  for (auto& x : u) x = std::sqrt(x);  // density 2y
  const auto prof = holder_profile(EmpiricalCircleMeasure::from_samples(u), {0.1, 0.03, 0.01});
  EXPECT_NEAR(prof.fitted_alpha, 1.0, 0.1);
}

TEST(HolderProfile, NeedsThreeScales) {
  EXPECT_THROW(holder_profile(EmpiricalCircleMeasure::point(0.0), {0.1, 0.01}), ParameterError);
}

TEST(Kolmogorov, Basics) {
  const EmpiricalCircleMeasure nu(uniforms(12, 30), uniforms(13, 30));
  EXPECT_EQ(kolmogorov_distance(nu, nu), 0.0);
  EXPECT_NEAR(kolmogorov_distance(EmpiricalCircleMeasure::point(0.0), EmpiricalCircleMeasure::point(0.5)),
              0.5, 1e-15);
}

TEST(Kolmogorov, RotationInvariant) {
  const EmpiricalCircleMeasure nu(uniforms(14, 30), uniforms(15, 30));
  const auto rotated = pushforward(nu, LiftedCircleMap::rotation(0.37));
  const auto grid = EmpiricalCircleMeasure::uniform_grid(1000);
  EXPECT_NEAR(kolmogorov_distance(nu, grid), kolmogorov_distance(rotated, grid), 2e-3);
}

TEST(Kolmogorov, IndependentLebesgueSamplesClose) {
  const auto a = EmpiricalCircleMeasure::from_samples(uniforms(16, 10000));
  const auto b = EmpiricalCircleMeasure::from_samples(uniforms(17, 10000));
  EXPECT_LT(kolmogorov_distance(a, b), 0.03);
}

TEST(Pushforward, MovesAtomsThroughTheMap) {
  const EmpiricalCircleMeasure nu({0.1, 0.6}, {0.25, 0.75});
  const auto f = LiftedCircleMap::rotation(0.5);
  const auto img = pushforward(nu, f);
  EXPECT_NEAR(img.positions()[0], 0.1, 1e-15);
  EXPECT_NEAR(img.weights()[0], 0.75, 1e-15);
  const auto line = pushforward(canonical_lift(nu), f);
  EXPECT_NEAR(line.positions()[1], 1.1, 1e-15);
}

TEST(LineFit, ExactLine) {
  const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(fit.slope, 2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-14);
  EXPECT_NEAR(fit.r2, 1.0, 1e-14);
}
