#pragma once

// Base dynamics: counter-based random draws, finite periodic bases and
// irrational rotations of the circle.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rotnum {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Uniform double in [0,1) with 53 random bits, a pure function of its
/// arguments. `lane` selects one of two independent values per counter.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::int64_t index,
                 unsigned lane = 0) noexcept;

/// Stream identifiers. The high word names the purpose, the low word the
/// replica or batch, so distinct estimators never share randomness.
enum class StreamPurpose : std::uint32_t {
  forward = 1,
  backward = 2,
  monte_carlo = 3,
  corollary = 4,
  spectral = 5,
  walk = 6,
  residual = 7,
  fiber_plus = 8,
  fiber_minus = 9,
  user = 10,
  stationary = 11,
  background = 12,
};

constexpr std::uint64_t stream_id(StreamPurpose purpose, std::uint32_t index) noexcept {
  return (static_cast<std::uint64_t>(purpose) << 32) | index;
}

/// Law of a real random variable with finite or interval support.
///
/// Grammar accepted by `parse`:
///   uniform(lo,hi)
///   atoms((v1,p1),(v2,p2),...)
///   bernoulli(p,v0,v1)        -- v1 with probability p, v0 otherwise
///   point(v)                  -- shorthand for atoms((v,1))
class Distribution {
 public:
  enum class Kind { uniform, atoms };

  static Distribution uniform(double lo, double hi);
  static Distribution atoms(std::vector<std::pair<double, double>> values_and_probs);
  static Distribution bernoulli(double p, double v0, double v1);
  static Distribution point(double v);
  static Distribution parse(std::string_view text);

  /// Inverse CDF; u in [0,1).
  double quantile(double u) const noexcept;

  Kind kind() const noexcept { return kind_; }
  double lower() const noexcept;
  double upper() const noexcept;
  double mean() const noexcept;
  bool degenerate() const noexcept;
  /// Canonical text form; parse(to_string()) reproduces the law.
  std::string to_string() const;

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }

 private:
  Kind kind_ = Kind::atoms;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// iid driver: omega_n = law(uniform(seed, stream, n)). Negative indices are
/// valid, giving a two-sided sequence.
struct IidDriver {
  Distribution law;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  double draw(std::int64_t index) const noexcept {
    return law.quantile(uniform01(seed, stream, index, 0));
  }
};

/// Finite periodic base x_n = labels[n mod p].
struct PeriodicBase {
  std::vector<int> labels;

  explicit PeriodicBase(std::vector<int> l);
  std::size_t period() const noexcept { return labels.size(); }
  int at(std::int64_t n) const noexcept;
  bool operator==(const PeriodicBase&) const = default;
};

/// Trigonometric polynomial a0 + sum_k (a_k cos 2 pi k x + b_k sin 2 pi k x).
struct TrigPolynomial {
  double constant = 0.0;
  std::vector<std::pair<double, double>> harmonics;

  double operator()(double x) const noexcept;
  /// sup |phi| bound from the coefficients.
  double bound() const noexcept;
  bool is_constant() const noexcept;
};

/// Circle rotation x -> x + frequency with a sampling function phi.
class RotationBase {
 public:
  /// Throws ParameterError when `frequency` is within machine precision of a
  /// rational with denominator <= 10^6.
  RotationBase(double frequency, double x0, TrigPolynomial sampler = {});

  double frequency() const noexcept { return frequency_; }
  double x0() const noexcept { return x0_; }
  const TrigPolynomial& sampler() const noexcept { return sampler_; }

  /// frac(x0 + n * frequency)
  double at(std::int64_t n) const noexcept;
  double sample(std::int64_t n) const noexcept { return sampler_(at(n)); }

 private:
  double frequency_;
  double x0_;
  TrigPolynomial sampler_;
};

/// True when x is within 8 ulp of p/q for some q <= max_denominator.
bool is_rational_at_precision(double x, std::int64_t max_denominator = 1000000);

}  // namespace rotnum
