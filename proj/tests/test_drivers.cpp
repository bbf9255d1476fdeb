#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rotnum/drivers.hpp"
#include "rotnum/errors.hpp"

using namespace rotnum;

TEST(Philox, KnownAnswer) {
  // Random123 known-answer vector for philox4x32-10.
  const auto out = philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
  const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero[0], 0x6627e8d5u);
  EXPECT_EQ(zero[1], 0xe169c58du);
  EXPECT_EQ(zero[2], 0xbc57ac4cu);
  EXPECT_EQ(zero[3], 0x9b00dbd8u);
}

TEST(Uniform, DeterministicAndInRange) {
  for (std::int64_t i = -1000; i < 1000; ++i) {
    const double u = uniform01(3, 9, i);
    EXPECT_EQ(u, uniform01(3, 9, i));
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(uniform01(3, 9, 5), uniform01(4, 9, 5));
  EXPECT_NE(uniform01(3, 9, 5), uniform01(3, 10, 5));
  EXPECT_NE(uniform01(3, 9, 5, 0), uniform01(3, 9, 5, 1));
}

TEST(IidDriver, PointLawIsConstant) {
  const IidDriver d{Distribution::atoms({{2.5, 1.0}}), 1, 1};
  for (std::int64_t i = 0; i < 100; ++i) EXPECT_EQ(d.draw(i), 2.5);
}

TEST(IidDriver, SymmetricSignMeanNearZero) {
  const IidDriver d{Distribution::atoms({{-1.0, 0.5}, {1.0, 0.5}}), 0, 1};
  double sum = 0.0;
  constexpr int n = 1000000;
  for (int i = 0; i < n; ++i) sum += d.draw(i);
  EXPECT_LT(std::abs(sum / n), 4e-3);
}

TEST(Distribution, ParseGrammar) {
  const auto u = Distribution::parse("uniform(0,1)");
  EXPECT_EQ(u.kind(), Distribution::Kind::uniform);
  EXPECT_EQ(u.lower(), 0.0);
  EXPECT_EQ(u.upper(), 1.0);
  EXPECT_DOUBLE_EQ(u.quantile(0.25), 0.25);
  const auto a = Distribution::parse(" atoms( (1, 0.5), (2,0.5) ) ");
  EXPECT_EQ(a.values().size(), 2u);
  EXPECT_EQ(a.quantile(0.49), 1.0);
  EXPECT_EQ(a.quantile(0.51), 2.0);
  const auto b = Distribution::parse("bernoulli(0.25,-1,3)");
  EXPECT_DOUBLE_EQ(b.mean(), 0.0);
  EXPECT_TRUE(Distribution::parse("point(4)").degenerate());
  EXPECT_EQ(Distribution::parse(a.to_string()).to_string(), a.to_string());
  EXPECT_EQ(Distribution::parse(u.to_string()).to_string(), u.to_string());
}

TEST(Distribution, ParseErrors) {
  EXPECT_THROW(Distribution::parse("gauss(0,1)"), ParameterError);
  EXPECT_THROW(Distribution::parse("uniform(1,0)"), ParameterError);
  EXPECT_THROW(Distribution::parse("atoms((1,0.5),(2,0.2))"), ParameterError);
  EXPECT_THROW(Distribution::parse("uniform(0,1"), ParameterError);
}

TEST(PeriodicBase, Labels) {
  const PeriodicBase base({0, 1});
  EXPECT_EQ(base.at(5), 1);
  EXPECT_EQ(base.at(4), 0);
  EXPECT_EQ(base.at(-1), 1);
}

TEST(RotationBase, OrbitStartsAtX0) {
  const RotationBase g(std::sqrt(2.0) - 1.0, 0.0);
  EXPECT_EQ(g.at(0), 0.0);
  EXPECT_NEAR(g.at(1), std::sqrt(2.0) - 1.0, 1e-16);
}

TEST(RotationBase, RejectsRationalFrequency) {
  EXPECT_THROW(RotationBase(0.5, 0.0), ParameterError);
  EXPECT_THROW(RotationBase(1.0 / 3.0, 0.0), ParameterError);
  EXPECT_NO_THROW(RotationBase((std::sqrt(5.0) - 1.0) / 2.0, 0.1));
}

TEST(RotationBase, OrbitEquidistributes) {
  const RotationBase g(std::sqrt(2.0) - 1.0, 0.0);
  constexpr std::int64_t n = 1000000;
  std::vector<double> x(n);
  for (std::int64_t i = 0; i < n; ++i) x[i] = g.at(i);
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    d = std::max({d, std::abs(x[i] - static_cast<double>(i) / n), std::abs(x[i] - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(d, 1e-2);
}

TEST(TrigPolynomial, EvaluatesAndBounds) {
  const TrigPolynomial p{0.5, {{1.0, 0.0}, {0.0, 2.0}}};
  EXPECT_NEAR(p(0.0), 1.5, 1e-15);
  EXPECT_NEAR(p(0.125), 0.5 + std::cos(M_PI / 4) + 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(p.bound(), 3.5);
  EXPECT_FALSE(p.is_constant());
}
