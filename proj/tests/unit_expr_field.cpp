#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support.hpp"
#include "veritor/expr.hpp"
#include "veritor/field.hpp"

using vt::Interval;
using vt::IVector;

namespace {

int ipow_node(vt::ExprGraph& g, int base, int n) {
  int r = g.constant(1.0);
  for (int i = 0; i < n; ++i) r = g.mul(r, base);
  return r;
}

template <class T>
T eval_node(const vt::ExprGraph& g, const std::vector<T>& vars, int node) {
  std::vector<T> vals;
  vt::eval_graph(g, vars, vals);
  return vals[static_cast<std::size_t>(node)];
}

}  // namespace

TEST_CASE("expression graph evaluates consistently for doubles and intervals") {
  vt::ExprGraph g;
  int x = g.var(0), y = g.var(1), z = g.var(2);
  // x*y + z^3 - 2.5*x
  int e = g.add(g.mul(x, y),
                g.sub(ipow_node(g, z, 3), g.mul(g.constant(2.5), x)));

  std::mt19937 rng(11);
  for (int i = 0; i < 1000; ++i) {
    double vx = testutil::rand_in(rng, -2.0, 2.0);
    double vy = testutil::rand_in(rng, -2.0, 2.0);
    double vz = testutil::rand_in(rng, -2.0, 2.0);
    double want = vx * vy + vz * vz * vz - 2.5 * vx;
    double got_d =
        eval_node(g, std::vector<double>{vx, vy, vz}, e);
    Interval got_i = eval_node(
        g, std::vector<Interval>{Interval(vx), Interval(vy), Interval(vz)}, e);
    REQUIRE(got_d == Catch::Approx(want).margin(1e-12));
    REQUIRE(got_i.contains(got_d));
    REQUIRE(got_i.width() < 1e-12);
  }
}

TEST_CASE("symbolic derivative matches central differences") {
  vt::ExprGraph g;
  int x = g.var(0), y = g.var(1);
  int e = g.mul(g.sub(g.constant(1.0), g.mul(x, x)), y);
  int dx = g.derivative(e, 0);
  int dy = g.derivative(e, 1);

  std::mt19937 rng(21);
  for (int i = 0; i < 200; ++i) {
    double vx = testutil::rand_in(rng, -1.5, 1.5);
    double vy = testutil::rand_in(rng, -1.5, 1.5);
    const double h = 1e-6;
    auto f = [](double a, double b) { return (1 - a * a) * b; };
    double fd_x = (f(vx + h, vy) - f(vx - h, vy)) / (2 * h);
    double fd_y = (f(vx, vy + h) - f(vx, vy - h)) / (2 * h);
    std::vector<double> at = {vx, vy};
    REQUIRE(eval_node(g, at, dx) == Catch::Approx(fd_x).margin(1e-6));
    REQUIRE(eval_node(g, at, dy) == Catch::Approx(fd_y).margin(1e-6));
  }
}

TEST_CASE("derivatives are memoized into shared nodes") {
  vt::ExprGraph g;
  int x = g.var(0);
  int e = g.mul(x, g.mul(x, x));
  int d1 = g.derivative(e, 0);
  int d2 = g.derivative(e, 0);
  REQUIRE(d1 == d2);
}

TEST_CASE("interval constants stay rigorous through folding") {
  vt::ExprGraph g;
  int x = g.var(0);
  Interval third = Interval::unchecked(vt::rd::div_down(1.0, 3.0),
                                       vt::rd::div_up(1.0, 3.0));
  int e = g.mul(g.constant(third), ipow_node(g, x, 3));
  Interval r = eval_node(g, std::vector<Interval>{Interval(3.0)}, e);
  REQUIRE(r.contains(9.0));
  REQUIRE(r.width() < 1e-13);
  REQUIRE(r.width() > 0.0);  // 1/3 is not representable; rigor costs width
}

TEST_CASE("exact constant folding only for exactly representable results") {
  vt::ExprGraph g;
  int a = g.constant(0.5);
  int b = g.constant(0.25);
  int folded = g.add(a, b);  // 0.75 exact
  REQUIRE(g.is_thin_const(folded));

  int c = g.constant(0.1);
  int d = g.constant(0.2);
  int kept = g.add(c, d);  // 0.3 is not exact in binary64
  REQUIRE_FALSE(g.is_const(kept));
}

TEST_CASE("van der Pol field evaluates to the textbook right-hand side") {
  vt::VectorField f = vt::vdp_extended(0.5, 0.1);
  REQUIRE(f.dim == 4);
  std::mt19937 rng(31);
  for (int i = 0; i < 500; ++i) {
    double x = testutil::rand_in(rng, -3.0, 3.0);
    double y = testutil::rand_in(rng, -3.0, 3.0);
    double c = testutil::rand_in(rng, -1.0, 1.0);
    double s = testutil::rand_in(rng, -1.0, 1.0);
    IVector p = {Interval(x), Interval(y), Interval(c), Interval(s)};
    IVector dp = f.eval(p);
    REQUIRE(dp[0].contains(y));
    REQUIRE(dp[1].contains(0.5 * (1 - x * x) * y - x + 0.1 * c));
    REQUIRE(dp[2].contains(-s));
    REQUIRE(dp[3].contains(c));
    REQUIRE(dp[1].width() < 1e-12);
  }
}

TEST_CASE("Langford field evaluates to the published right-hand side") {
  double alpha = 0.95, beta = 0.7, gamma = 0.6, delta = 3.5, eps = 0.25,
         zeta = 0.1;
  vt::VectorField f = vt::langford(alpha);
  REQUIRE(f.dim == 3);
  std::mt19937 rng(41);
  for (int i = 0; i < 500; ++i) {
    double x = testutil::rand_in(rng, -2.0, 2.0);
    double y = testutil::rand_in(rng, -2.0, 2.0);
    double z = testutil::rand_in(rng, -2.0, 2.0);
    IVector p = {Interval(x), Interval(y), Interval(z)};
    IVector dp = f.eval(p);
    REQUIRE(dp[0].contains((z - beta) * x - delta * y));
    REQUIRE(dp[1].contains(delta * x + (z - beta) * y));
    double dz = gamma + alpha * z - z * z * z / 3.0 -
                (x * x + y * y) * (1.0 + eps * z) + zeta * z * x * x * x;
    REQUIRE(dp[2].mid() == Catch::Approx(dz).margin(1e-11));
  }
}

TEST_CASE("field jacobian matches finite differences") {
  vt::VectorField f = vt::langford(0.85);
  std::mt19937 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(3);
    for (auto& v : p) v = testutil::rand_in(rng, -1.5, 1.5);
    IVector pi(3);
    for (int i = 0; i < 3; ++i) pi[i] = Interval(p[i]);
    vt::IMatrix J = f.jacobian(pi);
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        auto atp = [&](double shift) {
          IVector q = pi;
          q[j] = Interval(p[j] + shift);
          return f.eval(q)[i].mid();
        };
        double fd = (atp(h) - atp(-h)) / (2 * h);
        REQUIRE(J(i, j).mid() == Catch::Approx(fd).margin(2e-5));
      }
    }
  }
}

TEST_CASE("jacobian over a box contains pointwise jacobians", "[property]") {
  vt::VectorField f = vt::vdp_extended(1.0, 0.1);
  std::mt19937 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    IVector box(4);
    for (int i = 0; i < 4; ++i) {
      double c = testutil::rand_in(rng, -2.0, 2.0);
      double w = testutil::rand_in(rng, 0.0, 0.3);
      box[i] = Interval(c - w, c + w);
    }
    vt::IMatrix JB = f.jacobian(box);
    for (int s = 0; s < 10; ++s) {
      IVector p(4);
      for (int i = 0; i < 4; ++i)
        p[i] = Interval(testutil::rand_in(rng, box[i].lo, box[i].hi));
      vt::IMatrix Jp = f.jacobian(p);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          REQUIRE(JB(i, j).contains(Jp(i, j).mid()));
    }
  }
}
