#pragma once

// Chart atlas around a closed curve. Each chart is an affine box
// gamma_i(q) = A_i q + q_i over M_i = [-R_i, R_i] x [-r_i, r_i]; the chart
// x-axis runs along the chord joining the two neighbouring seed points, so
// gamma_i([-R_i, R_i] x {0}) is exactly that chord.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "veritor/interval.hpp"
#include "veritor/linalg.hpp"

namespace veritor {

struct DegenerateGeometry : Error {
  using Error::Error;
};
struct StarCenterInsideChart : Error {
  using Error::Error;
};

struct Chart {
  int index = 0;
  std::array<double, 2> q{};   // anchor
  DMat A{2, 2};                // frame, unit columns
  double R = 0.0;              // half length
  double r = 0.0;              // half height
  double a = 0.0;              // cone slope

  IVector box() const { return {Interval(-R, R), Interval(-r, r)}; }

  // gamma_i(local) in interval arithmetic
  IVector to_global(const IVector& local) const {
    IMatrix Ai = to_interval(A);
    return {Ai(0, 0) * local[0] + Ai(0, 1) * local[1] + Interval(q[0]),
            Ai(1, 0) * local[0] + Ai(1, 1) * local[1] + Interval(q[1])};
  }
};

struct Atlas {
  std::vector<Chart> charts;
  std::array<double, 2> star_center{};
  int subdivision = 6;

  std::size_t size() const { return charts.size(); }
};

namespace detail {

inline double winding_turns(const std::vector<std::array<double, 2>>& pts,
                            const std::array<double, 2>& c) {
  double total = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p0 = pts[i];
    const auto& p1 = pts[(i + 1) % n];
    double a0 = std::atan2(p0[1] - c[1], p0[0] - c[0]);
    double a1 = std::atan2(p1[1] - c[1], p1[0] - c[0]);
    double d = a1 - a0;
    while (d > 3.141592653589793) d -= 6.283185307179586;
    while (d < -3.141592653589793) d += 6.283185307179586;
    total += d;
  }
  return total / 6.283185307179586;
}

}  // namespace detail

inline Atlas build_atlas(const std::vector<std::array<double, 2>>& points,
                         double r, const std::vector<double>& cone_slopes,
                         int subdivision = 6) {
  const std::size_t n = points.size();
  if (n < 4)
    throw DegenerateGeometry("atlas needs at least 4 seed points, got " +
                             std::to_string(n));
  if (!(r > 0.0)) throw DomainViolation("chart half height must be positive");
  if (cone_slopes.empty() ||
      (cone_slopes.size() != 1 && cone_slopes.size() != n))
    throw DomainViolation(
        "cone slope list must have one entry or one per chart");
  for (double a : cone_slopes)
    if (!(a > 0.0)) throw DomainViolation("cone slopes must be positive");
  if (subdivision < 1)
    throw DomainViolation("subdivision count must be positive");

  Atlas atlas;
  atlas.subdivision = subdivision;
  atlas.star_center = {0.0, 0.0};
  for (const auto& p : points) {
    atlas.star_center[0] += p[0] / static_cast<double>(n);
    atlas.star_center[1] += p[1] / static_cast<double>(n);
  }

  double turns = detail::winding_turns(points, atlas.star_center);
  if (std::fabs(std::fabs(turns) - 1.0) > 0.25)
    throw DegenerateGeometry(
        "seed points do not wind exactly once around their centroid "
        "(signed turns = " +
        std::to_string(turns) + ")");

  atlas.charts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prev = points[(i + n - 1) % n];
    const auto& next = points[(i + 1) % n];
    double dx = 0.5 * (next[0] - prev[0]);
    double dy = 0.5 * (next[1] - prev[1]);
    double R = std::sqrt(dx * dx + dy * dy);
    if (!(R > 0.0))
      throw DegenerateGeometry("zero-length half difference at seed index " +
                               std::to_string(i));
    Chart& ch = atlas.charts[i];
    ch.index = static_cast<int>(i);
    ch.q = {0.5 * (next[0] + prev[0]), 0.5 * (next[1] + prev[1])};
    ch.A(0, 0) = dx / R;
    ch.A(1, 0) = dy / R;
    ch.A(0, 1) = -dy / R;
    ch.A(1, 1) = dx / R;
    ch.R = R;
    ch.r = r;
    ch.a = cone_slopes.size() == 1 ? cone_slopes[0] : cone_slopes[i];
  }

  return atlas;
}

inline Atlas build_atlas(const std::vector<std::array<double, 2>>& points,
                         double r, double cone_slope, int subdivision = 6) {
  return build_atlas(points, r, std::vector<double>{cone_slope}, subdivision);
}

// Consecutive charts must verifiably share a point. The witness tried for
// the pair (i, i+1) is the midpoint of the chord q_i q_{i+1}; its pullback
// through both charts has to land inside both boxes.
struct OverlapReport {
  bool ok = true;
  int first_failing = -1;
};

inline OverlapReport check_chart_overlap(const Atlas& atlas) {
  const std::size_t n = atlas.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    const Chart& a = atlas.charts[i];
    const Chart& b = atlas.charts[j];
    Interval cx = (Interval(a.q[0]) + Interval(b.q[0])) * Interval(0.5);
    Interval cy = (Interval(a.q[1]) + Interval(b.q[1])) * Interval(0.5);
    for (const Chart* ch : {&a, &b}) {
      IMatrix Ainv = inverse2(to_interval(ch->A));
      IVector local =
          Ainv * IVector{cx - Interval(ch->q[0]), cy - Interval(ch->q[1])};
      IVector M = ch->box();
      if (!(M[0].contains(local[0]) && M[1].contains(local[1])))
        return {false, static_cast<int>(i)};
    }
  }
  return {true, -1};
}

// Seed point files: one "x y" pair per line, '#' comments allowed.
inline std::vector<std::array<double, 2>> read_seed_points(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open seed file: " + path);
  std::vector<std::array<double, 2>> pts;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y;
    if (ss >> x >> y) pts.push_back({x, y});
  }
  return pts;
}

inline void write_seed_points(const std::string& path,
                              const std::vector<std::array<double, 2>>& pts) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open seed file for writing: " + path);
  char buf[80];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
    out << buf;
  }
}

}  // namespace veritor
