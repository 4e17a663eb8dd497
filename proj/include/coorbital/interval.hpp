#pragma once

// Closed intervals of doubles with outward rounding.
//
// Rounding mode is never changed. Instead every result bound is pushed
// outward after the operation: one ulp for the correctly rounded basic
// operations (+ - * / sqrt), two ulps for libm transcendentals (sin, cos,
// exp, log, pow), whose glibc implementations are accurate to within one
// ulp. The enclosure property is exercised by the containment tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>

#include "coorbital/errors.hpp"

namespace coorbital {

namespace detail {

inline double down(double x, int ulps = 1) {
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, -std::numeric_limits<double>::infinity());
  return x;
}

inline double up(double x, int ulps = 1) {
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, std::numeric_limits<double>::infinity());
  return x;
}

inline constexpr int kLibmUlps = 2;

}  // namespace detail

class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT: point intervals convert implicitly
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) {
      std::ostringstream os;
      os << "invalid interval [" << lo << ", " << hi << "]";
      throw DomainError(os.str());
    }
  }

  static Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }
  static Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_)};
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const { return lo_ + 0.5 * (hi_ - lo_); }
  double width() const { return hi_ - lo_; }
  double mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }
  /// Smallest absolute value in the interval.
  double mig() const { return contains(0.0) ? 0.0 : std::min(std::abs(lo_), std::abs(hi_)); }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool subset_of(const Interval& o) const { return o.contains(*this); }
  bool excludes_zero() const { return lo_ > 0.0 || hi_ < 0.0; }

  Interval operator-() const { return {-hi_, -lo_}; }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return {detail::down(a.lo_ + b.lo_), detail::up(a.hi_ + b.hi_)};
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return {detail::down(a.lo_ - b.hi_), detail::up(a.hi_ - b.lo_)};
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const double p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    return {detail::down(*std::min_element(p, p + 4)), detail::up(*std::max_element(p, p + 4))};
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains(0.0)) throw DomainError("interval division by an interval containing zero");
    const double p[4] = {a.lo_ / b.lo_, a.lo_ / b.hi_, a.hi_ / b.lo_, a.hi_ / b.hi_};
    return {detail::down(*std::min_element(p, p + 4)), detail::up(*std::max_element(p, p + 4))};
  }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }

  friend bool operator==(const Interval&, const Interval&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Interval& x) {
    return os << '[' << x.lo_ << ", " << x.hi_ << ']';
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

enum class CertifiedSign { positive, negative, contains_zero };

inline CertifiedSign certified_sign(const Interval& x) {
  if (x.lo() > 0.0) return CertifiedSign::positive;
  if (x.hi() < 0.0) return CertifiedSign::negative;
  return CertifiedSign::contains_zero;
}

inline const char* to_string(CertifiedSign s) {
  switch (s) {
    case CertifiedSign::positive: return "positive";
    case CertifiedSign::negative: return "negative";
    case CertifiedSign::contains_zero: return "contains_zero";
  }
  return "?";
}

/// Enclosure of pi: the double nearest pi lies below it.
inline Interval interval_pi() {
  constexpr double lo = 3.141592653589793;
  return {lo, detail::up(lo)};
}

/// Enclosure of (num / den) * pi.
inline Interval pi_fraction(long num, long den) {
  return interval_pi() * Interval(double(num)) / Interval(double(den));
}

inline Interval abs(const Interval& x) {
  if (x.lo() >= 0.0) return x;
  if (x.hi() <= 0.0) return -x;
  return {0.0, x.mag()};
}

inline Interval sqr(const Interval& x) {
  const Interval a = abs(x);
  return {std::max(0.0, detail::down(a.lo() * a.lo())), detail::up(a.hi() * a.hi())};
}

inline Interval pow_int(const Interval& x, int n) {
  if (n == 0) return Interval(1.0);
  if (n < 0) return Interval(1.0) / pow_int(x, -n);
  Interval r = (n % 2 == 0) ? sqr(x) : x;
  int done = (n % 2 == 0) ? 2 : 1;
  for (; done < n; ++done) r = r * x;
  return r;
}

inline Interval sqrt(const Interval& x) {
  if (x.lo() < 0.0) throw DomainError("interval sqrt of negative values");
  return {std::max(0.0, detail::down(std::sqrt(x.lo()))), detail::up(std::sqrt(x.hi()))};
}

inline Interval exp(const Interval& x) {
  return {std::max(0.0, detail::down(std::exp(x.lo()), detail::kLibmUlps)),
          detail::up(std::exp(x.hi()), detail::kLibmUlps)};
}

inline Interval log(const Interval& x) {
  if (!(x.lo() > 0.0)) throw DomainError("interval log of nonpositive values");
  return {detail::down(std::log(x.lo()), detail::kLibmUlps), detail::up(std::log(x.hi()), detail::kLibmUlps)};
}

/// x^p for x > 0 and real p; integer p with |p| <= 16 uses exact products.
inline Interval pow(const Interval& x, double p) {
  if (p == std::floor(p) && std::abs(p) <= 16.0) {
    if (p < 0.0 && x.contains(0.0)) throw DomainError("interval pow: negative power of interval containing 0");
    return pow_int(x, int(p));
  }
  if (!(x.lo() > 0.0)) throw DomainError("interval pow with real exponent needs a positive base");
  const double a = std::pow(x.lo(), p);
  const double b = std::pow(x.hi(), p);
  return {std::max(0.0, detail::down(std::min(a, b), detail::kLibmUlps)),
          detail::up(std::max(a, b), detail::kLibmUlps)};
}

namespace detail {

/// True unless the interval certainly misses every point phase + 2k pi.
inline bool may_contain_phase(const Interval& x, double phase_over_pi) {
  const Interval two_pi = interval_pi() * Interval(2.0);
  const double k0 = std::floor((x.lo() / 6.283185307179586) - phase_over_pi / 2.0) - 1.0;
  const double k1 = std::ceil((x.hi() / 6.283185307179586) - phase_over_pi / 2.0) + 1.0;
  for (double k = k0; k <= k1; k += 1.0) {
    const Interval point = interval_pi() * Interval(phase_over_pi) + two_pi * Interval(k);
    if (point.hi() >= x.lo() && point.lo() <= x.hi()) return true;
  }
  return false;
}

template <class Fn>
Interval periodic_enclosure(const Interval& x, Fn fn, double max_phase, double min_phase) {
  if (x.width() >= 6.3) return {-1.0, 1.0};
  const double a = fn(x.lo());
  const double b = fn(x.hi());
  double lo = detail::down(std::min(a, b), kLibmUlps);
  double hi = detail::up(std::max(a, b), kLibmUlps);
  if (may_contain_phase(x, max_phase)) hi = 1.0;
  if (may_contain_phase(x, min_phase)) lo = -1.0;
  return {std::max(-1.0, lo), std::min(1.0, hi)};
}

}  // namespace detail

/// sin: monotone between the extremal points pi/2 + 2k pi and -pi/2 + 2k pi.
inline Interval sin(const Interval& x) {
  return detail::periodic_enclosure(x, [](double v) { return std::sin(v); }, 0.5, -0.5);
}

/// cos: maxima at 2k pi, minima at pi + 2k pi.
inline Interval cos(const Interval& x) {
  return detail::periodic_enclosure(x, [](double v) { return std::cos(v); }, 0.0, 1.0);
}

}  // namespace coorbital
