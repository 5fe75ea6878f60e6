#pragma once

// Certification of an attracting invariant circle for a planar map over a
// chart atlas: alignment of chart cones with the star center, seed polygon
// inside the cones, fragment-wise covering f(U_{i,k}) strictly inside some
// chart in mean-value form, uniform contraction |det Df| < 1, cone
// invariance of the local derivative enclosures, and rate bounds giving a
// C^k lower bound on the regularity of the certified curve.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "veritor/atlas.hpp"
#include "veritor/parallel.hpp"
#include "veritor/planar_map.hpp"

namespace veritor {

struct MapEvaluationFailure : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Chart cones vs rays from the star center.
//
// Every ray meeting U_i has its direction in the positive hull of the four
// corner directions d_l = corner - q*. If all four pulled-back directions
// A_i^{-1} d_l land strictly inside one component of { |v_y| > a_i |v_x| }
// (a convex cone), so does every positive combination, which settles the
// alignment condition for the whole angle range subtended by the chart.

struct AlignmentReport {
  bool ok = true;
  std::vector<int> failing;
  int worst_chart = -1;
  double worst_margin = std::numeric_limits<double>::infinity();
};

inline AlignmentReport check_well_aligned(const Atlas& atlas) {
  AlignmentReport rep;
  Interval qs_x(atlas.star_center[0]);
  Interval qs_y(atlas.star_center[1]);
  for (const Chart& ch : atlas.charts) {
    IMatrix Ainv = inverse2(to_interval(ch.A));
    IVector M = ch.box();

    IVector pull = Ainv * IVector{qs_x - Interval(ch.q[0]),
                                  qs_y - Interval(ch.q[1])};
    if (pull[0].intersects(M[0]) && pull[1].intersects(M[1]))
      throw StarCenterInsideChart(
          "cannot exclude the star center from chart " +
          std::to_string(ch.index));

    IVector d[4];
    int c = 0;
    for (double sx : {-1.0, 1.0})
      for (double sy : {-1.0, 1.0}) {
        IVector corner =
            ch.to_global({Interval(sx * ch.R), Interval(sy * ch.r)});
        d[c++] = {corner[0] - qs_x, corner[1] - qs_y};
      }
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        Interval dot = d[a][0] * d[b][0] + d[a][1] * d[b][1];
        if (!(dot.lo > 0.0))
          throw DegenerateGeometry(
              "chart " + std::to_string(ch.index) +
              " subtends more than a quarter turn from the star center");
      }

    double margin = -std::numeric_limits<double>::infinity();
    for (double sign : {1.0, -1.0}) {
      double m = std::numeric_limits<double>::infinity();
      for (int l = 0; l < 4; ++l) {
        IVector v = Ainv * d[l];
        Interval vy = Interval(sign) * v[1];
        Interval bound = Interval(ch.a) * abs(v[0]);
        m = std::min(m, rd::sub_down(vy.lo, bound.hi));
      }
      margin = std::max(margin, m);
    }
    if (!(margin > 0.0)) {
      rep.ok = false;
      rep.failing.push_back(ch.index);
    }
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_chart = ch.index;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Seed polygon inside the cones: the segment q_i -> q_{i+1}, pulled back
// through either adjacent chart, must satisfy |dy| <= a |dx|.

struct SeedCurveReport {
  bool ok = true;
  int first_failing = -1;
};

inline SeedCurveReport check_seed_curve(const Atlas& atlas) {
  const std::size_t n = atlas.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Chart& a = atlas.charts[i];
    const Chart& b = atlas.charts[(i + 1) % n];
    IVector delta = {Interval(b.q[0]) - Interval(a.q[0]),
                     Interval(b.q[1]) - Interval(a.q[1])};
    for (const Chart* ch : {&a, &b}) {
      IVector v = inverse2(to_interval(ch->A)) * delta;
      Interval bound = Interval(ch->a) * abs(v[0]);
      if (!(abs(v[1]).hi <= bound.lo))
        return {false, static_cast<int>(i)};
    }
  }
  return {true, -1};
}

// ---------------------------------------------------------------------------
// Fragment covering in mean-value form, uniform contraction, and the per
// fragment local derivative enclosures D = A_j^{-1} [Df(U_{i,k})] A_i that
// the cone and rate checks reuse.

struct FragmentRecord {
  int chart = -1;
  int fragment = -1;
  int target = -1;
  IMatrix D{2, 2};
  Interval det_raw;
  double margin = 0.0;
};

struct CoveringReport {
  bool covering = true;
  Interval lambda;  // hull over fragments of |det [Df(U_{i,k})]|
  std::vector<FragmentRecord> fragments;
  int failed_chart = -1;
  int failed_fragment = -1;
};

inline CoveringReport check_covering_and_contraction(
    const Atlas& atlas, const PlanarMapEnclosure& map, int threads = 1) {
  const std::size_t n = atlas.size();
  const int m = atlas.subdivision;
  CoveringReport rep;
  rep.fragments.resize(n * static_cast<std::size_t>(m));

  std::vector<IMatrix> Ainv(n, IMatrix(2, 2));
  for (std::size_t j = 0; j < n; ++j)
    Ainv[j] = inverse2(to_interval(atlas.charts[j].A));

  parallel_for(n * static_cast<std::size_t>(m), threads, [&](std::size_t g) {
    const std::size_t i = g / static_cast<std::size_t>(m);
    const int k = static_cast<int>(g % static_cast<std::size_t>(m));
    const Chart& ch = atlas.charts[i];
    FragmentRecord& rec = rep.fragments[g];
    rec.chart = static_cast<int>(i);
    rec.fragment = k;

    const double x_lo = -ch.R + (2.0 * ch.R * k) / m;
    const double x_hi = -ch.R + (2.0 * ch.R * (k + 1)) / m;
    IVector frag = {Interval(x_lo, x_hi), Interval(-ch.r, ch.r)};

    // fragment midpoint, fixed by its global double coordinates
    double vx = 0.5 * (x_lo + x_hi);
    std::array<double, 2> w = {
        ch.q[0] + ch.A(0, 0) * vx,
        ch.q[1] + ch.A(1, 0) * vx};
    IVector v_w = Ainv[i] * IVector{Interval(w[0]) - Interval(ch.q[0]),
                                    Interval(w[1]) - Interval(ch.q[1])};
    IVector spread = {hull(frag[0] - v_w[0], Interval(0.0)),
                      hull(frag[1] - v_w[1], Interval(0.0))};

    IVector g_pt;
    IMatrix DfU;
    try {
      PlanarSet pset;
      pset.c = {Interval(w[0]), Interval(w[1])};
      pset.C = to_interval(ch.A);
      pset.r = spread;
      MapApplication app = map.apply_with_jacobian(pset);
      DfU = app.DP;
      g_pt = map.evaluate({Interval(w[0]), Interval(w[1])});
    } catch (const Error& e) {
      throw MapEvaluationFailure("map evaluation failed on chart " +
                                 std::to_string(i) + " fragment " +
                                 std::to_string(k) + ": " + e.what());
    }
    rec.det_raw = det2(DfU);

    double ix = g_pt[0].mid(), iy = g_pt[1].mid();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      double dx = ix - atlas.charts[j].q[0];
      double dy = iy - atlas.charts[j].q[1];
      double dist = dx * dx + dy * dy;
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }

    const std::size_t cands[3] = {best, (best + 1) % n, (best + n - 1) % n};
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t j = cands[c];
      const Chart& tj = atlas.charts[j];
      IVector E = Ainv[j] * IVector{g_pt[0] - Interval(tj.q[0]),
                                    g_pt[1] - Interval(tj.q[1])};
      IMatrix D = (Ainv[j] * DfU) * to_interval(ch.A);
      IVector img = {E[0] + D(0, 0) * spread[0] + D(0, 1) * spread[1],
                     E[1] + D(1, 0) * spread[0] + D(1, 1) * spread[1]};
      IVector Mj = tj.box();
      if (Mj[0].contains_in_interior(img[0]) &&
          Mj[1].contains_in_interior(img[1])) {
        rec.target = static_cast<int>(j);
        rec.D = D;
        rec.margin = std::min(
            std::min(img[0].lo - Mj[0].lo, Mj[0].hi - img[0].hi),
            std::min(img[1].lo - Mj[1].lo, Mj[1].hi - img[1].hi));
        break;
      }
    }
  });

  bool first = true;
  for (const FragmentRecord& rec : rep.fragments) {
    Interval ad = abs(rec.det_raw);
    rep.lambda = first ? ad : hull(rep.lambda, ad);
    first = false;
    if (rec.target < 0 && rep.failed_chart < 0) {
      rep.covering = false;
      rep.failed_chart = rec.chart;
      rep.failed_fragment = rec.fragment;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cone invariance of the local derivative enclosures: the image of the cone
// edge bundle (1, [-a_i, a_i]) under D must stay strictly sign-definite in u
// and inside slope a_j.

struct ConeReport {
  bool ok = true;
  int witness_chart = -1;
  int witness_fragment = -1;
};

inline ConeReport check_map_cones(const Atlas& atlas,
                                  const CoveringReport& cov) {
  for (const FragmentRecord& rec : cov.fragments) {
    if (rec.target < 0) return {false, rec.chart, rec.fragment};
    double ai = atlas.charts[rec.chart].a;
    double aj = atlas.charts[rec.target].a;
    Interval t(-ai, ai);
    Interval u = rec.D(0, 0) + rec.D(0, 1) * t;
    Interval w = rec.D(1, 0) + rec.D(1, 1) * t;
    bool sign_definite = u.lo > 0.0 || u.hi < 0.0;
    Interval bound = Interval(aj) * Interval(u.mig());
    if (!sign_definite || !(abs(w).hi <= bound.lo))
      return {false, rec.chart, rec.fragment};
  }
  return {true, -1, -1};
}

// ---------------------------------------------------------------------------
// Rate conditions. Over all fragments, with D the local derivative and a_j
// the target cone slope:
//   xi  <= inf ( D_11 - a_j |D_12| )
//   mu  >= sup ( |D_22| + a_j |D_12| )
// and the curve is C^k for the largest k with mu / xi^{j+1} < 1, j = 1..k.

struct RateReport {
  Interval xi{0.0};
  Interval mu{0.0};
  int k_max = 0;
  bool lipschitz_only = true;
};

inline RateReport rate_conditions(const Atlas& atlas,
                                  const CoveringReport& cov, int k_cap = 16) {
  RateReport rep;
  bool first = true;
  for (const FragmentRecord& rec : cov.fragments) {
    if (rec.target < 0)
      throw DomainViolation(
          "rate conditions need a complete covering report");
    double aj = atlas.charts[rec.target].a;
    Interval xi_t = rec.D(0, 0) - Interval(aj) * abs(rec.D(0, 1));
    Interval mu_t = abs(rec.D(1, 1)) + Interval(aj) * abs(rec.D(0, 1));
    if (first) {
      rep.xi = xi_t;
      rep.mu = mu_t;
      first = false;
    } else {
      rep.xi = Interval::unchecked(std::min(rep.xi.lo, xi_t.lo),
                                   std::min(rep.xi.hi, xi_t.hi));
      rep.mu = Interval::unchecked(std::max(rep.mu.lo, mu_t.lo),
                                   std::max(rep.mu.hi, mu_t.hi));
    }
  }
  rep.k_max = 0;
  rep.lipschitz_only = !(rep.xi.lo > 0.0);
  if (!rep.lipschitz_only) {
    for (int j = 1; j <= k_cap; ++j) {
      Interval ratio = Interval(rep.mu.hi) / pow(Interval(rep.xi.lo), j + 1);
      if (ratio.hi < 1.0)
        rep.k_max = j;
      else
        break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Full pipeline.

struct CircleOptions {
  int k_cap = 16;
  int threads = 1;
  bool from_flow_section = false;
};

struct CircleCertificate {
  Atlas atlas;
  std::string map_description;

  bool overlap_ok = false;
  bool well_aligned = false;
  bool seed_curve = false;
  bool covering = false;
  bool contraction = false;
  bool map_cones = false;

  Interval lambda{0.0};
  RateReport rate;
  AlignmentReport alignment;
  CoveringReport fragments;

  bool has_conclusion = false;
  std::string conclusion;
  int ck = -1;
  bool torus_promotion = false;

  std::string failure;
  int witness_chart = -1;
  int witness_fragment = -1;
};

inline CircleCertificate certify_circle(const Atlas& atlas,
                                        const PlanarMapEnclosure& map,
                                        const CircleOptions& opt = {}) {
  CircleCertificate cert;
  cert.atlas = atlas;
  cert.map_description = map.description();
  try {
    OverlapReport ov = check_chart_overlap(atlas);
    cert.overlap_ok = ov.ok;
    if (!ov.ok) {
      cert.failure = "consecutive charts fail to overlap at index " +
                     std::to_string(ov.first_failing);
      cert.witness_chart = ov.first_failing;
      return cert;
    }

    cert.alignment = check_well_aligned(atlas);
    cert.well_aligned = cert.alignment.ok;
    if (!cert.well_aligned) {
      cert.failure = "chart cones not aligned with rays from the star center";
      cert.witness_chart =
          cert.alignment.failing.empty() ? -1 : cert.alignment.failing[0];
      return cert;
    }

    SeedCurveReport sc = check_seed_curve(atlas);
    cert.seed_curve = sc.ok;
    if (!sc.ok) {
      cert.failure = "seed polygon leaves the cones at segment " +
                     std::to_string(sc.first_failing);
      cert.witness_chart = sc.first_failing;
      return cert;
    }

    cert.fragments = check_covering_and_contraction(atlas, map, opt.threads);
    cert.covering = cert.fragments.covering;
    cert.lambda = cert.fragments.lambda;
    cert.contraction = cert.lambda.hi < 1.0;
    if (!cert.covering) {
      cert.failure = "fragment image escapes every candidate chart";
      cert.witness_chart = cert.fragments.failed_chart;
      cert.witness_fragment = cert.fragments.failed_fragment;
      return cert;
    }
    if (!cert.contraction) {
      cert.failure = "|det Df| enclosure reaches 1: sup = " +
                     to_string(cert.lambda);
      return cert;
    }

    ConeReport cones = check_map_cones(atlas, cert.fragments);
    cert.map_cones = cones.ok;
    if (!cones.ok) {
      cert.failure = "derivative enclosure leaves the cone bundle";
      cert.witness_chart = cones.witness_chart;
      cert.witness_fragment = cones.witness_fragment;
      return cert;
    }

    cert.rate = rate_conditions(atlas, cert.fragments, opt.k_cap);
    cert.has_conclusion = true;
    if (!cert.rate.lipschitz_only && cert.rate.k_max >= 1) {
      cert.conclusion = "CkCircle(" + std::to_string(cert.rate.k_max) + ")";
      cert.ck = cert.rate.k_max;
    } else {
      cert.conclusion = "LipschitzCircle";
    }
    cert.torus_promotion = opt.from_flow_section;
  } catch (const Error& e) {
    cert.failure = e.what();
    cert.has_conclusion = false;
  }
  return cert;
}

}  // namespace veritor
