#include "rotnum/drivers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rotnum/errors.hpp"

namespace rotnum {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

double frac(double x) noexcept {
  const double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

// Minimal parser for the distribution grammar.
class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  std::string identifier() {
    skip_space();
    std::string out;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_')) {
      out.push_back(text_[pos_++]);
    }
    if (out.empty()) fail("expected a distribution name");
    return out;
  }

  double number() {
    skip_space();
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    const std::string buffer(begin, text_.size() - pos_);
    const double v = std::strtod(buffer.c_str(), &end);
    const auto used = static_cast<std::size_t>(end - buffer.c_str());
    if (used == 0) fail("expected a number");
    pos_ += used;
    return v;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void finish() {
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParameterError("cannot parse distribution '" + std::string(text_) + "' at offset " +
                         std::to_string(pos_) + ": " + why);
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::int64_t index,
                 unsigned lane) noexcept {
  const auto idx = static_cast<std::uint64_t>(index);
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32),
       static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const unsigned w = (lane & 1u) * 2;
  const std::uint64_t bits = (static_cast<std::uint64_t>(out[w]) << 32) | out[w + 1];
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

Distribution Distribution::uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi)) {
    throw ParameterError("uniform(lo,hi) requires finite lo < hi");
  }
  Distribution d;
  d.kind_ = Kind::uniform;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Distribution Distribution::atoms(std::vector<std::pair<double, double>> values_and_probs) {
  if (values_and_probs.empty()) throw ParameterError("atoms(...) needs at least one atom");
  double total = 0.0;
  for (const auto& [v, p] : values_and_probs) {
    if (!std::isfinite(v) || !(p > 0.0)) {
      throw ParameterError("atoms(...) needs finite values and positive probabilities");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ParameterError("atoms(...) probabilities must sum to 1");
  }
  Distribution d;
  d.kind_ = Kind::atoms;
  double acc = 0.0;
  for (const auto& [v, p] : values_and_probs) {
    d.values_.push_back(v);
    d.probs_.push_back(p / total);
    acc += p / total;
    d.cumulative_.push_back(acc);
  }
  d.cumulative_.back() = 1.0;
  const auto [lo, hi] = std::minmax_element(d.values_.begin(), d.values_.end());
  d.lo_ = *lo;
  d.hi_ = *hi;
  return d;
}

Distribution Distribution::bernoulli(double p, double v0, double v1) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("bernoulli(p,v0,v1) requires 0 < p < 1");
  return atoms({{v0, 1.0 - p}, {v1, p}});
}

Distribution Distribution::point(double v) { return atoms({{v, 1.0}}); }

Distribution Distribution::parse(std::string_view text) {
  SpecParser in(text);
  const std::string name = in.identifier();
  Distribution out;
  in.expect('(');
  if (name == "uniform") {
    const double lo = in.number();
    in.expect(',');
    const double hi = in.number();
    in.expect(')');
    out = uniform(lo, hi);
  } else if (name == "bernoulli") {
    const double p = in.number();
    in.expect(',');
    const double v0 = in.number();
    in.expect(',');
    const double v1 = in.number();
    in.expect(')');
    out = bernoulli(p, v0, v1);
  } else if (name == "point") {
    const double v = in.number();
    in.expect(')');
    out = point(v);
  } else if (name == "atoms") {
    std::vector<std::pair<double, double>> pairs;
    do {
      in.expect('(');
      const double v = in.number();
      in.expect(',');
      const double p = in.number();
      in.expect(')');
      pairs.emplace_back(v, p);
    } while (in.accept(','));
    in.expect(')');
    out = atoms(std::move(pairs));
  } else {
    in.fail("unknown distribution '" + name + "'");
  }
  in.finish();
  return out;
}

double Distribution::quantile(double u) const noexcept {
  if (kind_ == Kind::uniform) return lo_ + u * (hi_ - lo_);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                       values_.size() - 1);
  return values_[i];
}

double Distribution::lower() const noexcept { return lo_; }
double Distribution::upper() const noexcept { return hi_; }

double Distribution::mean() const noexcept {
  if (kind_ == Kind::uniform) return 0.5 * (lo_ + hi_);
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
  return m;
}

bool Distribution::degenerate() const noexcept {
  return kind_ == Kind::atoms && values_.size() == 1;
}

std::string Distribution::to_string() const {
  if (kind_ == Kind::uniform) {
    return "uniform(" + format_double(lo_) + "," + format_double(hi_) + ")";
  }
  std::string out = "atoms(";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) out += ",";
    out += "(" + format_double(values_[i]) + "," + format_double(probs_[i]) + ")";
  }
  return out + ")";
}

PeriodicBase::PeriodicBase(std::vector<int> l) : labels(std::move(l)) {
  if (labels.empty()) throw ParameterError("periodic base needs period >= 1");
}

int PeriodicBase::at(std::int64_t n) const noexcept {
  const auto p = static_cast<std::int64_t>(labels.size());
  const std::int64_t r = ((n % p) + p) % p;
  return labels[static_cast<std::size_t>(r)];
}

double TrigPolynomial::operator()(double x) const noexcept {
  double v = constant;
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    const double arg = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * x;
    v += harmonics[k].first * std::cos(arg) + harmonics[k].second * std::sin(arg);
  }
  return v;
}

double TrigPolynomial::bound() const noexcept {
  double b = std::abs(constant);
  for (const auto& [a, c] : harmonics) b += std::abs(a) + std::abs(c);
  return b;
}

bool TrigPolynomial::is_constant() const noexcept {
  return std::all_of(harmonics.begin(), harmonics.end(),
                     [](const auto& h) { return h.first == 0.0 && h.second == 0.0; });
}

bool is_rational_at_precision(double x, std::int64_t max_denominator) {
  const double tol = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
  // Continued-fraction convergents p_k / q_k.
  double p_prev = 1.0, q_prev = 0.0;
  double p = std::floor(x), q = 1.0;
  double r = x - std::floor(x);
  for (int k = 0; k < 64; ++k) {
    if (q > static_cast<double>(max_denominator)) return false;
    if (std::abs(x - p / q) <= tol) return true;
    if (r == 0.0) return true;
    const double inv = 1.0 / r;
    const double a = std::floor(inv);
    r = inv - a;
    const double p_next = a * p + p_prev;
    const double q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
  return false;
}

RotationBase::RotationBase(double frequency, double x0, TrigPolynomial sampler)
    : frequency_(frequency), x0_(frac(x0)), sampler_(std::move(sampler)) {
  if (!std::isfinite(frequency)) throw ParameterError("rotation frequency must be finite");
  if (is_rational_at_precision(frequency)) {
    throw ParameterError("rotation frequency " + format_double(frequency) +
                         " is rational at machine precision (denominator <= 1e6)");
  }
}

double RotationBase::at(std::int64_t n) const noexcept {
  return frac(std::fma(static_cast<double>(n), frequency_, x0_));
}

}  // namespace rotnum
