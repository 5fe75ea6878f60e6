#pragma once

// Closed interval arithmetic over binary64 with outward rounding.
// Directed rounding is emulated with error-free transformations (TwoSum for
// add/sub, FMA residuals for mul/div/sqrt) instead of switching the FPU
// rounding mode, so results are bumped by one ulp only when the native
// operation was inexact.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace veritor {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainViolation : Error {
  using Error::Error;
};
struct DivisionByZeroInterval : Error {
  using Error::Error;
};

namespace rd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMax = std::numeric_limits<double>::max();

// Magnitudes below this keep the FMA residual of a product/quotient exactly
// representable; below it we bump unconditionally to dodge underflow traps.
inline constexpr double kTiny = 1e-280;

inline double next_up(double x) { return std::nextafter(x, kInf); }
inline double next_down(double x) { return std::nextafter(x, -kInf); }

inline double add_up(double a, double b) {
  double s = a + b;
  if (!std::isfinite(s)) return s > 0 ? kInf : -kMax;
  double ap = s - b;
  double bp = s - ap;
  double e = (a - ap) + (b - bp);
  return e > 0 ? next_up(s) : s;
}

inline double add_down(double a, double b) {
  double s = a + b;
  if (!std::isfinite(s)) return s > 0 ? kMax : -kInf;
  double ap = s - b;
  double bp = s - ap;
  double e = (a - ap) + (b - bp);
  return e < 0 ? next_down(s) : s;
}

inline double sub_up(double a, double b) { return add_up(a, -b); }
inline double sub_down(double a, double b) { return add_down(a, -b); }

inline double mul_up(double a, double b) {
  double p = a * b;
  if (!std::isfinite(p)) return p > 0 ? kInf : -kMax;
  if (std::fabs(p) < kTiny) {
    if (a == 0.0 || b == 0.0) return p;
    return next_up(p);
  }
  double e = std::fma(a, b, -p);
  return e > 0 ? next_up(p) : p;
}

inline double mul_down(double a, double b) {
  double p = a * b;
  if (!std::isfinite(p)) return p > 0 ? kMax : -kInf;
  if (std::fabs(p) < kTiny) {
    if (a == 0.0 || b == 0.0) return p;
    return next_down(p);
  }
  double e = std::fma(a, b, -p);
  return e < 0 ? next_down(p) : p;
}

inline double div_up(double a, double b) {
  double q = a / b;
  if (!std::isfinite(q)) return q > 0 ? kInf : -kMax;
  if (std::fabs(a) < kTiny || std::fabs(q) < kTiny) {
    if (a == 0.0) return q;
    return next_up(q);
  }
  double e = std::fma(q, b, -a);  // sign of q*b - a decides which side q is on
  if (b > 0) return e >= 0 ? q : next_up(q);
  return e <= 0 ? q : next_up(q);
}

inline double div_down(double a, double b) {
  double q = a / b;
  if (!std::isfinite(q)) return q > 0 ? kMax : -kInf;
  if (std::fabs(a) < kTiny || std::fabs(q) < kTiny) {
    if (a == 0.0) return q;
    return next_down(q);
  }
  double e = std::fma(q, b, -a);
  if (b > 0) return e <= 0 ? q : next_down(q);
  return e >= 0 ? q : next_down(q);
}

inline double sqrt_up(double x) {
  double r = std::sqrt(x);
  if (x < kTiny) return x == 0.0 ? 0.0 : next_up(r);
  double e = std::fma(r, r, -x);
  return e >= 0 ? r : next_up(r);
}

inline double sqrt_down(double x) {
  double r = std::sqrt(x);
  if (x < kTiny) return 0.0;
  double e = std::fma(r, r, -x);
  return e <= 0 ? r : next_down(r);
}

}  // namespace rd

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double v) : lo(v), hi(v) {
    if (std::isnan(v)) throw DomainViolation("interval endpoint is NaN");
  }
  Interval(double l, double h) : lo(l), hi(h) {
    if (std::isnan(l) || std::isnan(h) || !(l <= h))
      throw DomainViolation("malformed interval [" + std::to_string(l) + "," +
                            std::to_string(h) + "]");
  }

  static Interval unchecked(double l, double h) {
    Interval r;
    r.lo = l;
    r.hi = h;
    return r;
  }

  bool is_thin() const { return lo == hi; }
  bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool contains_in_interior(const Interval& o) const {
    return lo < o.lo && o.hi < hi;
  }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

  double mid() const {
    double m = 0.5 * (lo + hi);
    if (!std::isfinite(m)) m = 0.5 * lo + 0.5 * hi;
    if (m < lo) m = lo;
    if (m > hi) m = hi;
    return m;
  }
  double width() const { return rd::sub_up(hi, lo); }
  double rad() const { return 0.5 * width(); }
  double mag() const { return std::fmax(std::fabs(lo), std::fabs(hi)); }
  double mig() const {
    if (lo <= 0.0 && 0.0 <= hi) return 0.0;
    return std::fmin(std::fabs(lo), std::fabs(hi));
  }
};

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval::unchecked(std::fmin(a.lo, b.lo), std::fmax(a.hi, b.hi));
}

inline bool intersect(const Interval& a, const Interval& b, Interval& out) {
  double l = std::fmax(a.lo, b.lo);
  double h = std::fmin(a.hi, b.hi);
  if (!(l <= h)) return false;
  out = Interval::unchecked(l, h);
  return true;
}

inline Interval operator-(const Interval& a) {
  return Interval::unchecked(-a.hi, -a.lo);
}

inline Interval operator+(const Interval& a, const Interval& b) {
  return Interval::unchecked(rd::add_down(a.lo, b.lo), rd::add_up(a.hi, b.hi));
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return Interval::unchecked(rd::sub_down(a.lo, b.hi), rd::sub_up(a.hi, b.lo));
}

inline Interval operator*(const Interval& a, const Interval& b) {
  if (a.lo == a.hi) {  // thin factor: two directed products suffice
    double v = a.lo;
    if (v >= 0)
      return Interval::unchecked(rd::mul_down(v, b.lo), rd::mul_up(v, b.hi));
    return Interval::unchecked(rd::mul_down(v, b.hi), rd::mul_up(v, b.lo));
  }
  if (b.lo == b.hi) {
    double v = b.lo;
    if (v >= 0)
      return Interval::unchecked(rd::mul_down(a.lo, v), rd::mul_up(a.hi, v));
    return Interval::unchecked(rd::mul_down(a.hi, v), rd::mul_up(a.lo, v));
  }
  double d1 = rd::mul_down(a.lo, b.lo), d2 = rd::mul_down(a.lo, b.hi);
  double d3 = rd::mul_down(a.hi, b.lo), d4 = rd::mul_down(a.hi, b.hi);
  double u1 = rd::mul_up(a.lo, b.lo), u2 = rd::mul_up(a.lo, b.hi);
  double u3 = rd::mul_up(a.hi, b.lo), u4 = rd::mul_up(a.hi, b.hi);
  return Interval::unchecked(std::fmin(std::fmin(d1, d2), std::fmin(d3, d4)),
                             std::fmax(std::fmax(u1, u2), std::fmax(u3, u4)));
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo <= 0.0 && 0.0 <= b.hi)
    throw DivisionByZeroInterval("denominator [" + std::to_string(b.lo) + "," +
                                 std::to_string(b.hi) + "] contains zero");
  double d1 = rd::div_down(a.lo, b.lo), d2 = rd::div_down(a.lo, b.hi);
  double d3 = rd::div_down(a.hi, b.lo), d4 = rd::div_down(a.hi, b.hi);
  double u1 = rd::div_up(a.lo, b.lo), u2 = rd::div_up(a.lo, b.hi);
  double u3 = rd::div_up(a.hi, b.lo), u4 = rd::div_up(a.hi, b.hi);
  return Interval::unchecked(std::fmin(std::fmin(d1, d2), std::fmin(d3, d4)),
                             std::fmax(std::fmax(u1, u2), std::fmax(u3, u4)));
}

inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }

inline Interval sqrt(const Interval& x) {
  if (x.lo < 0.0)
    throw DomainViolation("sqrt of interval reaching below zero");
  return Interval::unchecked(rd::sqrt_down(x.lo), rd::sqrt_up(x.hi));
}

inline Interval abs(const Interval& x) {
  return Interval::unchecked(x.mig(), x.mag());
}

inline Interval pi_interval() {
  return Interval::unchecked(0x1.921fb54442d18p+1, 0x1.921fb54442d19p+1);
}
inline Interval two_pi_interval() {
  return Interval::unchecked(0x1.921fb54442d18p+2, 0x1.921fb54442d19p+2);
}
inline Interval half_pi_interval() {
  return Interval::unchecked(0x1.921fb54442d18p+0, 0x1.921fb54442d19p+0);
}

namespace detail {

// libm cos/sin on this platform are faithful to about 1 ulp; a 2-ulp guard
// on each side keeps the point enclosure safe with margin.
inline Interval cos_point(double x) {
  double c = std::cos(x);
  double lo = rd::next_down(rd::next_down(c));
  double hi = rd::next_up(rd::next_up(c));
  return Interval::unchecked(std::fmax(lo, -1.0), std::fmin(hi, 1.0));
}

}  // namespace detail

inline Interval cos(const Interval& x) {
  if (!x.is_finite() || std::fabs(x.lo) > 1e12 || std::fabs(x.hi) > 1e12 ||
      x.width() > 6.3)
    return Interval::unchecked(-1.0, 1.0);
  Interval a = detail::cos_point(x.lo);
  Interval b = detail::cos_point(x.hi);
  double lo = std::fmin(a.lo, b.lo);
  double hi = std::fmax(a.hi, b.hi);
  // every critical point of cos in [lo,hi] is an integer multiple of pi
  long k0 = static_cast<long>(std::floor(x.lo / 3.141592653589793)) - 1;
  long k1 = static_cast<long>(std::ceil(x.hi / 3.141592653589793)) + 1;
  Interval pi = pi_interval();
  for (long k = k0; k <= k1; ++k) {
    Interval kpi = Interval(static_cast<double>(k)) * pi;
    if (kpi.intersects(x)) {
      if ((k % 2) == 0)
        hi = 1.0;
      else
        lo = -1.0;
    }
  }
  return Interval::unchecked(std::fmax(lo, -1.0), std::fmin(hi, 1.0));
}

inline Interval sin(const Interval& x) { return cos(x - half_pi_interval()); }

namespace detail {

inline double pow_mag(double x, unsigned n, bool up) {
  // x >= 0
  double r = 1.0;
  for (unsigned i = 0; i < n; ++i) r = up ? rd::mul_up(r, x) : rd::mul_down(r, x);
  return r;
}

}  // namespace detail

inline Interval pow(const Interval& x, int n) {
  if (n == 0) return Interval(1.0);
  if (n < 0) return Interval(1.0) / pow(x, -n);
  unsigned un = static_cast<unsigned>(n);
  if (n % 2 == 0) {
    double m = x.mig(), M = x.mag();
    return Interval::unchecked(detail::pow_mag(m, un, false),
                               detail::pow_mag(M, un, true));
  }
  auto signed_pow = [&](double v, bool up) {
    if (v >= 0) return detail::pow_mag(v, un, up);
    return -detail::pow_mag(-v, un, !up);
  };
  return Interval::unchecked(signed_pow(x.lo, false), signed_pow(x.hi, true));
}

inline Interval inflate(const Interval& x, double abs_pad) {
  return Interval::unchecked(rd::sub_down(x.lo, abs_pad),
                             rd::add_up(x.hi, abs_pad));
}

inline std::string to_string(const Interval& x) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "[%.17g,%.17g]", x.lo, x.hi);
  return buf;
}

}  // namespace veritor
