#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support.hpp"
#include "veritor/section.hpp"

using veritor::FlowEnclosure;
using veritor::Interval;
using veritor::IVector;
using veritor::SectionCrossing;
using veritor::SectionSpec;
using veritor::StepControl;
namespace vt = veritor;

namespace {

// x' = 1, y' = 0
vt::VectorField translation2() {
  vt::VectorField f;
  f.name = "translation";
  f.dim = 2;
  vt::ExprGraph& g = f.graph;
  (void)g.var(0);
  (void)g.var(1);
  f.rhs = {g.constant(1.0), g.constant(0.0)};
  f.finalize();
  return f;
}

// x' = -y, y' = x (counterclockwise unit rotation)
vt::VectorField rotation_ccw() {
  vt::VectorField f;
  f.name = "rotation";
  f.dim = 2;
  vt::ExprGraph& g = f.graph;
  int x = g.var(0), y = g.var(1);
  f.rhs = {g.neg(y), x};
  f.finalize();
  return f;
}

}  // namespace

TEST_CASE("unit speed translation reaches a shifted plane at unit time") {
  vt::VectorField f = translation2();
  IVector start = {Interval(0.0), Interval(0.299, 0.301)};
  SectionSpec sec;
  sec.coord = 0;
  sec.level = 1.0;
  sec.sign = +1;
  SectionCrossing cr =
      vt::cross_section(f, FlowEnclosure::from_box(start), sec, {});

  REQUIRE(cr.crossing_time.contains(1.0));
  REQUIRE(cr.crossing_time.width() < 1e-10);
  REQUIRE(cr.on_section.state_box[0].lo == 1.0);
  REQUIRE(cr.on_section.state_box[0].hi == 1.0);
  REQUIRE(cr.on_section.state_box[1].contains(Interval(0.299, 0.301)));
  REQUIRE(cr.on_section.state_box[1].width() < 0.002 + 1e-9);

  // collapsed coordinate row of the affine form is exact
  REQUIRE(cr.affine_center[0].lo == 1.0);
  REQUIRE(cr.affine_center[0].hi == 1.0);
  REQUIRE(cr.affine_C(0, 0).mag() == 0.0);
  REQUIRE(cr.affine_C(0, 1).mag() == 0.0);

  // the flow is a shear-free translation, so the projected derivative is the
  // identity on the surviving coordinate
  REQUIRE(cr.DP(1, 1).contains(1.0));
  REQUIRE(cr.DP(1, 1).width() < 1e-12);
  REQUIRE(cr.DP(1, 0).contains(0.0));
  REQUIRE(cr.DP(0, 0).mag() == 0.0);
  REQUIRE(cr.DP(0, 1).mag() == 0.0);
}

TEST_CASE("rotation started on the section returns after half a turn") {
  vt::VectorField f = rotation_ccw();
  IVector start = {Interval(0.0), Interval(-1.0)};
  SectionSpec sec;
  sec.coord = 0;
  sec.level = 0.0;
  sec.sign = -1;
  SectionCrossing cr =
      vt::cross_section(f, FlowEnclosure::from_box(start), sec, {});

  const double pi = 3.14159265358979323846;
  REQUIRE(cr.crossing_time.contains(pi));
  REQUIRE(cr.crossing_time.width() < 1e-10);
  REQUIRE(cr.on_section.state_box[1].contains(1.0));
  REQUIRE(cr.on_section.state_box[1].width() < 1e-10);
  // flow map at time pi is -Id, and the transversal correction vanishes at
  // the crossing point, so the projected derivative has (1,1) entry -1
  REQUIRE(cr.DP(1, 1).contains(-1.0));
  REQUIRE(cr.DP(1, 1).width() < 1e-10);
}

TEST_CASE("the first crossing with the wrong orientation is refused") {
  vt::VectorField f = rotation_ccw();
  SectionSpec sec;
  sec.coord = 0;
  sec.level = 0.0;

  SECTION("departure heads the wrong way") {
    // from (0,-1) the trajectory leaves with x increasing; its first return
    // to {x=0} has x decreasing, so asking for +1 must fail
    sec.sign = +1;
    IVector start = {Interval(0.0), Interval(-1.0)};
    REQUIRE_THROWS_AS(
        vt::cross_section(f, FlowEnclosure::from_box(start), sec, {}),
        vt::OrientationMismatch);
  }

  SECTION("start set already past the section") {
    vt::VectorField t = translation2();
    sec.level = 1.0;
    sec.sign = +1;
    IVector start = {Interval(2.0), Interval(0.0)};
    REQUIRE_THROWS_AS(
        vt::cross_section(t, FlowEnclosure::from_box(start), sec, {}),
        vt::OrientationMismatch);
  }

  SECTION("straddling start set cannot be separated") {
    vt::VectorField t = translation2();
    sec.sign = +1;
    IVector start = {Interval(-1e-3, 1e-3), Interval(0.0)};
    REQUIRE_THROWS_AS(
        vt::cross_section(t, FlowEnclosure::from_box(start), sec, {}),
        vt::OrientationMismatch);
  }
}

TEST_CASE("an orbit that never meets the section exhausts the time budget") {
  vt::VectorField f = rotation_ccw();
  IVector start = {Interval(0.5), Interval(0.0)};
  SectionSpec sec;
  sec.coord = 0;
  sec.level = 0.9;
  sec.sign = +1;
  sec.max_time = 20.0;
  REQUIRE_THROWS_AS(
      vt::cross_section(f, FlowEnclosure::from_box(start), sec, {}),
      vt::NoTransversalCrossing);
}

TEST_CASE("crossing needs the variational product enabled") {
  vt::VectorField f = translation2();
  IVector start = {Interval(0.0), Interval(0.0)};
  SectionSpec sec;
  sec.coord = 0;
  sec.level = 1.0;
  StepControl ctrl;
  ctrl.want_variational = false;
  REQUIRE_THROWS_AS(
      vt::cross_section(f, FlowEnclosure::from_box(start), sec, ctrl),
      vt::DomainViolation);
}

TEST_CASE("crossing data matches the rotation's closed form", "[property]") {
  vt::VectorField f = rotation_ccw();
  std::mt19937 rng(7007);
  const double half_pi = 1.57079632679489661923;
  for (int i = 0; i < 200; ++i) {
    double th = testutil::rand_in(rng, -1.2, 1.2);
    double w = testutil::rand_in(rng, 1e-9, 1e-6);
    double cx = std::cos(th), cy = std::sin(th);
    IVector start = {Interval(cx - w, cx + w), Interval(cy - w, cy + w)};
    SectionSpec sec;
    sec.coord = 0;
    sec.level = 0.0;
    sec.sign = -1;
    SectionCrossing cr =
        vt::cross_section(f, FlowEnclosure::from_box(start), sec, {});

    // the box center starts on the unit circle at angle th and meets {x=0}
    // descending at (0,1) after a quarter turn minus th
    REQUIRE(cr.crossing_time.contains(half_pi - th));
    REQUIRE(cr.on_section.state_box[1].contains(1.0));
    // y at the crossing equals the start radius, so its derivative along the
    // section map is (cos th, sin th) at the center point
    REQUIRE(cr.DP(1, 0).contains(cx));
    REQUIRE(cr.DP(1, 1).contains(cy));
    REQUIRE(cr.DP(0, 0).mag() == 0.0);
    REQUIRE(cr.DP(0, 1).mag() == 0.0);
  }
}

TEST_CASE("a single return leg of the Langford flow lands on the next orbit "
          "point") {
  vt::VectorField f = vt::langford(0.85);
  IVector start = {Interval(0.0), Interval(0.611160359286522),
                   Interval(-0.104496536895459)};
  SectionSpec sec;
  sec.coord = 0;
  sec.level = 0.0;
  sec.sign = +1;  // leg starts with y > 0, so x' < 0 and the return ascends
  SectionCrossing cr =
      vt::cross_section(f, FlowEnclosure::from_box(start), sec, {});

  REQUIRE(cr.crossing_time.lo > 0.1);
  REQUIRE(cr.crossing_time.hi < 3.0);
  REQUIRE(cr.on_section.state_box[0].lo == 0.0);
  REQUIRE(cr.on_section.state_box[0].hi == 0.0);
  REQUIRE(std::abs(cr.on_section.state_box[1].mid() -
                   (-0.340204872730408)) < 1e-9);
  REQUIRE(std::abs(cr.on_section.state_box[2].mid() -
                   0.281927860636689) < 1e-9);
  REQUIRE(cr.on_section.state_box[1].width() < 1e-9);
  REQUIRE(cr.on_section.state_box[2].width() < 1e-9);
}
