#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support.hpp"
#include "veritor/interval.hpp"

using vt::Interval;

namespace {

Interval rand_interval(std::mt19937& rng, double lo, double hi) {
  double a = testutil::rand_in(rng, lo, hi);
  double b = testutil::rand_in(rng, lo, hi);
  if (a > b) std::swap(a, b);
  return Interval(a, b);
}

Interval rand_subinterval(std::mt19937& rng, const Interval& big) {
  double a = testutil::rand_in(rng, big.lo, big.hi);
  double b = testutil::rand_in(rng, big.lo, big.hi);
  if (a > b) std::swap(a, b);
  return Interval(a, b);
}

bool subset(const Interval& inner, const Interval& outer) {
  return outer.lo <= inner.lo && inner.hi <= outer.hi;
}

}  // namespace

TEST_CASE("endpoint arithmetic on exactly representable inputs") {
  Interval a(1.0, 2.0), b(3.0, 4.0);
  Interval s = a + b;
  REQUIRE(s.lo == 4.0);
  REQUIRE(s.hi == 6.0);

  Interval p = Interval(-1.0, 2.0) * b;
  REQUIRE(p.lo == -4.0);
  REQUIRE(p.hi == 8.0);

  Interval d = Interval(1.0, 1.0) / Interval(4.0, 4.0);
  REQUIRE(d.contains(0.25));
  REQUIRE(d.width() <= 2e-16);
}

TEST_CASE("division by an interval containing zero is rejected") {
  REQUIRE_THROWS_AS(Interval(1.0) / Interval(-1.0, 1.0),
                    vt::DivisionByZeroInterval);
  REQUIRE_THROWS_AS(Interval(1.0) / Interval(0.0, 2.0),
                    vt::DivisionByZeroInterval);
  REQUIRE_NOTHROW(Interval(1.0) / Interval(1e-300, 1.0));
}

TEST_CASE("sqrt domain handling") {
  REQUIRE_THROWS_AS(vt::sqrt(Interval(-1.0, 1.0)), vt::DomainViolation);
  Interval r = vt::sqrt(Interval(2.0));
  REQUIRE(r.contains(std::sqrt(2.0)));
  REQUIRE(r.width() < 1e-15);
  Interval z = vt::sqrt(Interval(0.0, 4.0));
  REQUIRE(z.lo == 0.0);
  REQUIRE(z.hi >= 2.0);
}

TEST_CASE("cosine over a half period covers [-1,1] tightly") {
  Interval pi = vt::pi_interval();
  Interval c = vt::cos(Interval(0.0, pi.hi));
  REQUIRE(c.lo <= -1.0);
  REQUIRE(c.hi >= 1.0);
  REQUIRE(c.width() <= 2.0 + 4e-16);

  // sampling oracle
  std::mt19937 rng(12345);
  for (int i = 0; i < 100000; ++i) {
    double x = testutil::rand_in(rng, 0.0, pi.lo);
    REQUIRE(c.contains(std::cos(x)));
  }
}

TEST_CASE("sine and cosine membership on random intervals") {
  std::mt19937 rng(777);
  for (int i = 0; i < 2000; ++i) {
    Interval x = rand_interval(rng, -20.0, 20.0);
    Interval c = vt::cos(x);
    Interval s = vt::sin(x);
    for (int j = 0; j < 20; ++j) {
      double t = testutil::rand_in(rng, x.lo, x.hi);
      REQUIRE(c.contains(std::cos(t)));
      REQUIRE(s.contains(std::sin(t)));
    }
  }
}

TEST_CASE("integer powers") {
  Interval x(-2.0, 3.0);
  Interval sq = vt::pow(x, 2);
  REQUIRE(sq.lo == 0.0);
  REQUIRE(sq.hi >= 9.0);
  Interval cb = vt::pow(x, 3);
  REQUIRE(cb.lo <= -8.0);
  REQUIRE(cb.hi >= 27.0);
  REQUIRE(vt::pow(Interval(2.0), -1).contains(0.5));
}

TEST_CASE("inclusion monotonicity of arithmetic", "[property]") {
  std::mt19937 rng(424242);
  int done = 0;
  while (done < 10000) {
    Interval X1 = rand_interval(rng, -10.0, 10.0);
    Interval Y1 = rand_interval(rng, -10.0, 10.0);
    Interval X = rand_subinterval(rng, X1);
    Interval Y = rand_subinterval(rng, Y1);

    REQUIRE(subset(X + Y, X1 + Y1));
    REQUIRE(subset(X - Y, X1 - Y1));
    REQUIRE(subset(X * Y, X1 * Y1));
    if (!Y1.contains(0.0)) REQUIRE(subset(X / Y, X1 / Y1));
    if (X1.lo >= 0.0) REQUIRE(subset(vt::sqrt(X), vt::sqrt(X1)));
    REQUIRE(subset(vt::cos(X), vt::cos(X1)));
    REQUIRE(subset(vt::pow(X, 3), vt::pow(X1, 3)));
    ++done;
  }
}

TEST_CASE("point consistency: thin inputs contain the double result",
          "[property]") {
  std::mt19937 rng(5150);
  for (int i = 0; i < 10000; ++i) {
    double x = testutil::rand_in(rng, -50.0, 50.0);
    double y = testutil::rand_in(rng, -50.0, 50.0);
    REQUIRE((Interval(x) + Interval(y)).contains(x + y));
    REQUIRE((Interval(x) - Interval(y)).contains(x - y));
    REQUIRE((Interval(x) * Interval(y)).contains(x * y));
    if (y != 0.0) REQUIRE((Interval(x) / Interval(y)).contains(x / y));
    if (x >= 0.0) REQUIRE(vt::sqrt(Interval(x)).contains(std::sqrt(x)));
  }
}

TEST_CASE("hull, intersect, and width behave as set operations") {
  Interval a(0.0, 1.0), b(2.0, 3.0);
  Interval h = vt::hull(a, b);
  REQUIRE(h.lo == 0.0);
  REQUIRE(h.hi == 3.0);
  REQUIRE_FALSE(a.intersects(b));
  Interval c(0.5, 2.5);
  Interval i;
  REQUIRE(vt::intersect(c, a, i));
  REQUIRE(i.lo == 0.5);
  REQUIRE(i.hi == 1.0);
  Interval unused;
  REQUIRE_FALSE(vt::intersect(a, b, unused));
  REQUIRE(vt::abs(Interval(-3.0, 2.0)).hi == 3.0);
  REQUIRE(vt::abs(Interval(-3.0, 2.0)).lo == 0.0);
  REQUIRE(Interval(-1.0, 1.0).mag() == 1.0);
  REQUIRE(Interval(2.0, 3.0).mig() == 2.0);
}

TEST_CASE("pi enclosure brackets the mathematical constant") {
  Interval pi = vt::pi_interval();
  REQUIRE(pi.lo < pi.hi);
  REQUIRE(pi.width() < 1e-15);
  // cos(pi) must straddle -1
  Interval c = vt::cos(pi);
  REQUIRE(c.contains(-1.0));
  Interval two_pi = vt::two_pi_interval();
  REQUIRE(two_pi.contains(2.0 * 3.14159265358979323846));
}

TEST_CASE("directed rounding never loses the exact result", "[property]") {
  std::mt19937 rng(99);
  for (int i = 0; i < 10000; ++i) {
    double x = testutil::rand_in(rng, -1e6, 1e6);
    double y = testutil::rand_in(rng, -1e6, 1e6);
    REQUIRE(vt::rd::add_down(x, y) <= x + y);
    REQUIRE(vt::rd::add_up(x, y) >= x + y);
    REQUIRE(vt::rd::mul_down(x, y) <= x * y);
    REQUIRE(vt::rd::mul_up(x, y) >= x * y);
    long double ex = static_cast<long double>(x) * static_cast<long double>(y);
    REQUIRE(static_cast<long double>(vt::rd::mul_down(x, y)) <= ex);
    REQUIRE(static_cast<long double>(vt::rd::mul_up(x, y)) >= ex);
    ex = static_cast<long double>(x) + static_cast<long double>(y);
    REQUIRE(static_cast<long double>(vt::rd::add_down(x, y)) <= ex);
    REQUIRE(static_cast<long double>(vt::rd::add_up(x, y)) >= ex);
  }
}
