#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "support.hpp"
#include "veritor/planar_map.hpp"

using veritor::AnalyticMap;
using veritor::IMatrix;
using veritor::Interval;
using veritor::IVector;
using veritor::LangfordParams;
using veritor::MapApplication;
using veritor::PlanarSet;
using veritor::ReturnApplication;
using veritor::ReturnMap;
using veritor::StepControl;
using veritor::TimeShiftMap;
namespace vt = veritor;

namespace {

AnalyticMap rotation_map(double th) {
  double c = std::cos(th), s = std::sin(th);
  auto f = [c, s](const IVector& x) -> IVector {
    return {Interval(c) * x[0] - Interval(s) * x[1],
            Interval(s) * x[0] + Interval(c) * x[1]};
  };
  auto j = [c, s](const IVector&) -> IMatrix {
    IMatrix J(2, 2);
    J(0, 0) = Interval(c);
    J(0, 1) = Interval(-s);
    J(1, 0) = Interval(s);
    J(1, 1) = Interval(c);
    return J;
  };
  return AnalyticMap(f, j, "rotation by " + std::to_string(th));
}

// converged period-6 section orbits of the Langford system at alpha = 0.85
const std::array<std::array<double, 2>, 6> kAttractorOrbit = {{
    {0.611160359285778, -0.104496536895137},
    {-0.340204872730408, 0.281927860636689},
    {0.33157533792645, 1.102823698021572},
    {-0.629618533271298, 1.587096608710868},
    {1.266385235561867, 1.203279007983665},
    {-1.203828054978716, 0.13377874677194},
}};

PlanarSet box_set(double x, double y, double w) {
  return PlanarSet::from_box({Interval(x - w, x + w), Interval(y - w, y + w)});
}

}  // namespace

TEST_CASE("unforced shift map at v = 0 is the identity") {
  TimeShiftMap m(0.0, 0.0, {});
  PlanarSet in = box_set(0.5, 0.25, 1e-3);
  MapApplication app = m.apply_with_jacobian(in);
  IVector h = app.image.hull();

  REQUIRE(h[0].contains(Interval(0.499, 0.501)));
  REQUIRE(h[1].contains(Interval(0.249, 0.251)));
  REQUIRE(h[0].width() < 2e-3 + 1e-8);
  REQUIRE(h[1].width() < 2e-3 + 1e-8);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      REQUIRE(app.DP(i, j).contains(i == j ? 1.0 : 0.0));
      REQUIRE(app.DP(i, j).width() < 1e-8);
    }
}

TEST_CASE("shift map parameters outside the guarded range are refused") {
  REQUIRE_THROWS_AS(TimeShiftMap(2.5, 0.0, {}), vt::DomainViolation);
  REQUIRE_THROWS_AS(TimeShiftMap(0.5, 1.5, {}), vt::DomainViolation);
}

TEST_CASE("shift map image agrees with the reference integrator") {
  TimeShiftMap m(0.1, 0.002, {});
  auto rhs = [](const testutil::DState& s, testutil::DState& ds, double) {
    ds = {s[1], 0.1 * (1 - s[0] * s[0]) * s[1] - s[0] + 0.002 * s[2], -s[3],
          s[2]};
  };
  testutil::DState end =
      testutil::oracle_advance(rhs, {2.0, 0.0, 1.0, 0.0}, 6.283185307179586);

  PlanarSet in = box_set(2.0, 0.0, 1e-8);
  IVector h = m.apply_set(in).hull();
  REQUIRE(h[0].contains(end[0]));
  REQUIRE(h[1].contains(end[1]));
  REQUIRE(h[0].width() < 1e-6);

  // the thin evaluation path must agree with the full one
  IVector cheap = m.evaluate({Interval(2.0 - 1e-8, 2.0 + 1e-8),
                              Interval(-1e-8, 1e-8)});
  REQUIRE(cheap[0].contains(end[0]));
  REQUIRE(cheap[1].contains(end[1]));
  REQUIRE(cheap[0].intersects(h[0]));
  REQUIRE(cheap[1].intersects(h[1]));
}

TEST_CASE("return map legs alternate orientation along the period-6 orbit") {
  LangfordParams lp;
  lp.alpha = 0.85;
  ReturnMap m(lp, 6, {});
  PlanarSet in = box_set(kAttractorOrbit[0][0], kAttractorOrbit[0][1], 1e-8);
  ReturnApplication app = m.apply_full(in);

  REQUIRE(app.legs.size() == 6);
  for (int i = 0; i < 6; ++i) {
    int expected = kAttractorOrbit[i][0] > 0.0 ? +1 : -1;
    REQUIRE(app.legs[i].sign == expected);
    REQUIRE(app.legs[i].crossing_time.lo > 0.1);
  }
  REQUIRE(app.total_time.lo > 3.0);
  REQUIRE(app.total_time.hi < 10.0);

  // the full return lands back on the starting point
  IVector h = app.image.hull();
  REQUIRE(h[0].contains(kAttractorOrbit[0][0]));
  REQUIRE(h[1].contains(kAttractorOrbit[0][1]));
}

TEST_CASE("six single returns and one six-fold return mutually agree") {
  LangfordParams lp;
  lp.alpha = 0.85;
  StepControl ctrl;
  ReturnMap one(lp, 1, ctrl);
  ReturnMap six(lp, 6, ctrl);
  REQUIRE(one.iterate_count() == 1);
  REQUIRE(six.iterate_count() == 6);

  PlanarSet in = box_set(kAttractorOrbit[0][0], kAttractorOrbit[0][1], 1e-7);
  MapApplication whole = six.apply_with_jacobian(in);

  PlanarSet cur = in;
  IMatrix DP = IMatrix::identity(2);
  for (int i = 0; i < 6; ++i) {
    MapApplication step = one.apply_with_jacobian(cur);
    // each intermediate stop visits the recorded orbit
    IVector h = step.image.hull();
    const auto& q = kAttractorOrbit[(i + 1) % 6];
    REQUIRE(h[0].contains(q[0]));
    REQUIRE(h[1].contains(q[1]));
    DP = step.DP * DP;
    cur = step.image;
  }

  IVector ha = whole.image.hull();
  IVector hb = cur.hull();
  for (int i = 0; i < 2; ++i) {
    REQUIRE(ha[i].intersects(hb[i]));
    REQUIRE(ha[i].contains(kAttractorOrbit[0][i]));
    REQUIRE(hb[i].contains(kAttractorOrbit[0][i]));
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) REQUIRE(whole.DP(i, j).intersects(DP(i, j)));
}

TEST_CASE("return map refuses bad departures") {
  LangfordParams lp;
  lp.alpha = 0.85;

  SECTION("iterate count below one") {
    REQUIRE_THROWS_AS(ReturnMap(lp, 0, StepControl{}), vt::DomainViolation);
  }

  SECTION("declared first sign contradicts the departure direction") {
    ReturnMap m(lp, 1, {}, -1);
    PlanarSet in = box_set(kAttractorOrbit[0][0], kAttractorOrbit[0][1], 1e-8);
    REQUIRE_THROWS_AS(m.apply_with_jacobian(in), vt::OrientationMismatch);
  }

  SECTION("start with undetermined departure direction") {
    ReturnMap m(lp, 1, {});
    PlanarSet in = box_set(0.0, 0.5, 1e-2);
    REQUIRE_THROWS_AS(m.apply_with_jacobian(in), vt::NoTransversalCrossing);
  }
}

TEST_CASE("affine localization with the identity frame changes nothing") {
  AnalyticMap inner = rotation_map(0.7);
  vt::LocalizedMap outer =
      vt::localize(inner, vt::DMat::identity(2), {Interval(0.0), Interval(0.0)});

  PlanarSet in = box_set(0.3, -0.2, 1e-3);
  MapApplication a = inner.apply_with_jacobian(in);
  MapApplication b = outer.apply_with_jacobian(in);
  IVector ha = a.image.hull(), hb = b.image.hull();
  for (int i = 0; i < 2; ++i) {
    REQUIRE(hb[i].contains(ha[i]));
    REQUIRE(hb[i].width() < ha[i].width() + 1e-12);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) REQUIRE(b.DP(i, j).contains(a.DP(i, j)));
}

TEST_CASE("localization conjugates the derivative without changing its "
          "determinant") {
  AnalyticMap inner = rotation_map(0.4);
  vt::DMat A(2, 2);
  A(0, 0) = 0.8;
  A(0, 1) = -0.3;
  A(1, 0) = 0.25;
  A(1, 1) = 1.1;
  vt::LocalizedMap outer = vt::localize(inner, A, {Interval(0.15),
                                                   Interval(-0.4)});
  PlanarSet in = box_set(0.0, 0.0, 1e-2);
  MapApplication a = inner.apply_with_jacobian(in);
  MapApplication b = outer.apply_with_jacobian(in);
  Interval da = vt::det2(a.DP), db = vt::det2(b.DP);
  REQUIRE(db.intersects(da));
  REQUIRE(db.contains(std::cos(0.4) * std::cos(0.4) +
                      std::sin(0.4) * std::sin(0.4)));
}

TEST_CASE("localization translates fixed points to the origin") {
  // f(x) = 0.5 (x - p) + p has fixed point p; localized at p it fixes 0
  IVector p = {Interval(1.25), Interval(-0.75)};
  auto f = [p](const IVector& x) -> IVector {
    return {Interval(0.5) * (x[0] - p[0]) + p[0],
            Interval(0.5) * (x[1] - p[1]) + p[1]};
  };
  auto j = [](const IVector&) -> IMatrix {
    IMatrix J = IMatrix::identity(2);
    J(0, 0) = Interval(0.5);
    J(1, 1) = Interval(0.5);
    return J;
  };
  AnalyticMap inner(f, j, "contraction toward p");
  vt::LocalizedMap outer = vt::localize(inner, vt::DMat::identity(2), p);
  PlanarSet in = box_set(0.0, 0.0, 1e-3);
  IVector h = outer.apply_set(in).hull();
  REQUIRE(h[0].contains(0.0));
  REQUIRE(h[1].contains(0.0));
  REQUIRE(h[0].hi < 1e-3);
  REQUIRE(h[1].hi < 1e-3);
}

TEST_CASE("tightened planar sets still cover every member point",
          "[property]") {
  std::mt19937 rng(2024);
  for (int t = 0; t < 50; ++t) {
    PlanarSet in;
    in.c = {Interval(testutil::rand_in(rng, -1.0, 1.0)),
            Interval(testutil::rand_in(rng, -1.0, 1.0))};
    std::size_t m = 2 + static_cast<std::size_t>(t % 3);
    in.C = IMatrix(2, m);
    in.r = IVector(m);
    for (std::size_t j = 0; j < m; ++j) {
      in.C(0, j) = Interval(testutil::rand_in(rng, -1.0, 1.0));
      in.C(1, j) = Interval(testutil::rand_in(rng, -1.0, 1.0));
      double rr = testutil::rand_in(rng, 1e-6, 0.1);
      in.r[j] = Interval(-rr, rr);
    }
    PlanarSet tight = vt::tighten(in);
    REQUIRE(tight.r.size() == 2);
    IVector th = tight.hull();
    for (int s = 0; s < 20; ++s) {
      double px = in.c[0].mid(), py = in.c[1].mid();
      for (std::size_t j = 0; j < m; ++j) {
        double rj = testutil::rand_in(rng, in.r[j].lo, in.r[j].hi);
        px += in.C(0, j).mid() * rj;
        py += in.C(1, j).mid() * rj;
      }
      REQUIRE(th[0].contains(px));
      REQUIRE(th[1].contains(py));
    }
  }
}

TEST_CASE("shooting residual vanishes at a fixed point of a rotation") {
  AnalyticMap m = rotation_map(0.7);
  vt::ShootingProblem prob;
  prob.period = 1;
  prob.map = &m;

  IVector at_zero = {Interval(0.0), Interval(0.0)};
  auto [G0, DG0] = vt::shooting_residual(prob, at_zero);
  REQUIRE(G0[0].mag() == 0.0);
  REQUIRE(G0[1].mag() == 0.0);
  REQUIRE(DG0(0, 0).contains(std::cos(0.7) - 1.0));
  REQUIRE(DG0(0, 1).contains(-std::sin(0.7)));

  // interval Newton over a box around the origin certifies uniqueness
  auto value = [&](const IVector& x) { return vt::shooting_residual(prob, x).first; };
  auto jaco = [&](const IVector& x) { return vt::shooting_residual(prob, x).second; };
  IVector box = {Interval(-0.05, 0.05), Interval(-0.05, 0.05)};
  IVector x0 = {Interval(0.013), Interval(-0.021)};
  vt::NewtonResult nr = vt::interval_newton(value, jaco, box, x0);
  REQUIRE(nr.unique);
  REQUIRE(nr.root_box[0].contains(0.0));
  REQUIRE(nr.root_box[1].contains(0.0));
}

TEST_CASE("shooting residual is tiny on the converged Langford orbit") {
  LangfordParams lp;
  lp.alpha = 0.85;
  ReturnMap m(lp, 1, {});
  vt::ShootingProblem prob;
  prob.period = 6;
  prob.map = &m;

  IVector stacked(12);
  for (int i = 0; i < 6; ++i) {
    stacked[2 * i] = Interval(kAttractorOrbit[i][0]);
    stacked[2 * i + 1] = Interval(kAttractorOrbit[i][1]);
  }
  auto [G, DG] = vt::shooting_residual(prob, stacked);
  for (int i = 0; i < 12; ++i) REQUIRE(G[i].mag() < 1e-10);
  // block-cyclic shape: -Id on the diagonal, map derivative one block left
  for (int i = 0; i < 6; ++i) {
    REQUIRE(DG(2 * i, 2 * i).contains(-1.0));
    REQUIRE(DG(2 * i + 1, 2 * i + 1).contains(-1.0));
    int prev = (i + 5) % 6;
    Interval blk = DG(2 * i, 2 * prev);
    REQUIRE(blk.mag() > 0.0);
  }
}

TEST_CASE("shooting residual rejects a stacked box of the wrong size") {
  AnalyticMap m = rotation_map(0.3);
  vt::ShootingProblem prob;
  prob.period = 2;
  prob.map = &m;
  IVector bad = {Interval(0.0), Interval(0.0), Interval(0.0)};
  REQUIRE_THROWS_AS(vt::shooting_residual(prob, bad), vt::DimensionMismatch);
}

TEST_CASE("derivative chaining agrees between one two-fold application and "
          "two composed ones") {
  LangfordParams lp;
  lp.alpha = 0.85;
  ReturnMap one(lp, 1, {});
  ReturnMap two(lp, 2, {});
  PlanarSet in = box_set(kAttractorOrbit[0][0], kAttractorOrbit[0][1], 1e-7);

  MapApplication direct = two.apply_with_jacobian(in);
  MapApplication s1 = one.apply_with_jacobian(in);
  MapApplication s2 = one.apply_with_jacobian(s1.image);
  IMatrix chained = s2.DP * s1.DP;

  IVector hd = direct.image.hull(), hc = s2.image.hull();
  for (int i = 0; i < 2; ++i) {
    REQUIRE(hd[i].contains(kAttractorOrbit[2][i]));
    REQUIRE(hc[i].contains(kAttractorOrbit[2][i]));
    REQUIRE(hd[i].intersects(hc[i]));
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      REQUIRE(direct.DP(i, j).intersects(chained(i, j)));
}

TEST_CASE("localized six-fold return derivative lands in the recorded "
          "attractor window") {
  LangfordParams lp;
  lp.alpha = 0.85;
  ReturnMap six(lp, 6, {});
  vt::DMat A1(2, 2);
  A1(0, 0) = 0.953174;
  A1(0, 1) = -0.0468255;
  A1(1, 0) = 0.169128;
  A1(1, 1) = 0.2639;
  IVector p1 = {Interval(0.611160359286522), Interval(-0.104496536895459)};
  vt::LocalizedMap f1 = vt::localize(six, A1, p1);

  PlanarSet B1 = PlanarSet::from_box(
      {Interval(-5e-4, 5e-4), Interval(-5e-4, 5e-4)});
  MapApplication app = f1.apply_with_jacobian(B1);

  const double want[2][2][2] = {{{0.150243, 0.220614}, {-0.561824, -0.521109}},
                                {{0.41934, 0.663593}, {0.10723, 0.263629}}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Interval w(want[i][j][0], want[i][j][1]);
      REQUIRE(app.DP(i, j).intersects(w));
      REQUIRE(app.DP(i, j).contains(w.mid()));
    }
  // the derivative is a contraction in this frame; its image should stay
  // well inside the unit box scale
  IVector h = app.image.hull();
  REQUIRE(h[0].mag() < 5e-4);
  REQUIRE(h[1].mag() < 5e-4);
}
