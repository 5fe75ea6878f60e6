#pragma once

// Heteroclinic connection certification: an attracting fixed point verified
// by image inclusion plus a positive-definite contraction test, a saddle
// whose unstable manifold is pinned inside a cone by invariance and
// expansion bounds, and the propagation of a fundamental domain of the
// unstable manifold into the attractor box.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "veritor/interval.hpp"
#include "veritor/linalg.hpp"
#include "veritor/parallel.hpp"
#include "veritor/planar_map.hpp"

namespace veritor {

struct InclusionFailure : Error {
  using Error::Error;
};
struct NotContracting : Error {
  using Error::Error;
};
struct ConeNotInvariant : Error {
  using Error::Error;
};
struct ExpansionTooWeak : Error {
  using Error::Error;
};
struct FiberEscapesI : Error {
  using Error::Error;
};
struct FragmentMissedAttractor : Error {
  using Error::Error;
};
struct MissingPrerequisite : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Attracting fixed point: f(B) inside B in mean-value form, and
// lambda*Id - A^T A strictly positive definite for every A in [Df(B)].

struct AttractorBox {
  IVector box;
  double lambda = 0.0;
  IMatrix jacobian{2, 2};
  bool verified = false;
};

namespace detail {

inline bool contraction_pd(const IMatrix& J, double lambda) {
  IMatrix S = transpose(J) * J;
  IMatrix M(2, 2);
  Interval l(lambda);
  M(0, 0) = l - S(0, 0);
  M(0, 1) = -S(0, 1);
  M(1, 0) = -S(1, 0);
  M(1, 1) = l - S(1, 1);
  return pd_check(M);
}

}  // namespace detail

inline AttractorBox certify_attractor(const PlanarMapEnclosure& map_local,
                                      const IVector& B1,
                                      double lambda_hint = 0.0) {
  AttractorBox out;
  out.box = B1;

  IVector c = {Interval(B1[0].mid()), Interval(B1[1].mid())};
  IVector fc = map_local.evaluate(c);
  out.jacobian = map_local.jacobian(B1);
  IVector img = mean_value_enclosure(out.jacobian, B1, c, fc);
  if (!(B1[0].contains(img[0]) && B1[1].contains(img[1])))
    throw InclusionFailure(
        "mean-value image enclosure leaves the attractor box: image = (" +
        to_string(img[0]) + ", " + to_string(img[1]) + ")");

  if (lambda_hint > 0.0) {
    if (!(lambda_hint < 1.0) ||
        !detail::contraction_pd(out.jacobian, lambda_hint))
      throw NotContracting("contraction test fails at lambda = " +
                           std::to_string(lambda_hint));
    out.lambda = lambda_hint;
  } else {
    if (!detail::contraction_pd(out.jacobian, 1.0))
      throw NotContracting("no lambda < 1 passes the contraction test");
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (detail::contraction_pd(out.jacobian, mid))
        hi = mid;
      else
        lo = mid;
    }
    out.lambda = hi;
  }
  out.verified = true;
  return out;
}

// ---------------------------------------------------------------------------
// Saddle with one-dimensional unstable cone. Blocks of [Df(B2)]:
//   [ A    C12 ]       A   = d(pi_u f)/du     C12 = d(pi_u f)/ds
//   [ C21  B   ]       C21 = d(pi_s f)/du     B   = d(pi_s f)/ds
// Cone invariance asks the image of (1, [-L, L]) to stay sign-definite in u
// with slope at most L; expansion asks a1 - ||C12|| L > m sqrt(1 + L^2).

struct SaddleData {
  IVector box;        // B2 = B_u x B_s, local coordinates
  double L = 0.0;     // cone slope
  double m = 0.0;     // expansion constant; <= 0 requests automatic choice
  IVector p_star;     // fixed point enclosure in local coordinates
  IMatrix jacobian{2, 2};
  Interval A_block{0.0}, C12{0.0}, C21{0.0}, B_block{0.0};
  bool cone_verified = false;
  bool expansion_verified = false;
  double expansion_margin = 0.0;
};

inline SaddleData certify_unstable_cone(const PlanarMapEnclosure& map_local,
                                        SaddleData saddle) {
  if (!(saddle.L > 0.0))
    throw DomainViolation("cone slope L must be positive");
  if (saddle.p_star.size() == 2) {
    if (!(saddle.box[0].contains(saddle.p_star[0]) &&
          saddle.box[1].contains(saddle.p_star[1])))
      throw DomainViolation("fixed point enclosure escapes the saddle box");
  }

  IMatrix J = map_local.jacobian(saddle.box);
  saddle.jacobian = J;
  saddle.A_block = J(0, 0);
  saddle.C12 = J(0, 1);
  saddle.C21 = J(1, 0);
  saddle.B_block = J(1, 1);

  const double L = saddle.L;
  Interval t(-L, L);
  Interval u = J(0, 0) + J(0, 1) * t;
  Interval w = J(1, 0) + J(1, 1) * t;
  bool sign_definite = u.lo > 0.0 || u.hi < 0.0;
  Interval slope_bound = Interval(L) * Interval(u.mig());
  if (!sign_definite || !(abs(w).hi <= slope_bound.lo))
    throw ConeNotInvariant(
        "derivative enclosure does not map the cone into itself (u = " +
        to_string(u) + ", w = " + to_string(w) + ")");
  saddle.cone_verified = true;

  Interval gap_i = Interval(saddle.A_block.lo) -
                   Interval(saddle.C12.mag()) * Interval(L);
  double gap = gap_i.lo;
  Interval root = sqrt(Interval(1.0) + Interval(L) * Interval(L));

  if (saddle.m > 0.0) {
    Interval rhs = Interval(saddle.m) * root;
    if (!(saddle.m > 1.0) || !(gap > rhs.hi))
      throw ExpansionTooWeak(
          "expansion margin " + std::to_string(gap - rhs.hi) +
          " with m = " + std::to_string(saddle.m));
    saddle.expansion_margin = gap - rhs.hi;
  } else {
    // largest m passing with a 1% margin, kept below the unstable
    // eigenvalue estimate of the midpoint jacobian
    DMat Jm = mid(J);
    double tr = Jm(0, 0) + Jm(1, 1);
    double det = Jm(0, 0) * Jm(1, 1) - Jm(0, 1) * Jm(1, 0);
    double disc = 0.25 * tr * tr - det;
    double lam_u = disc > 0.0
                       ? std::max(std::fabs(0.5 * tr + std::sqrt(disc)),
                                  std::fabs(0.5 * tr - std::sqrt(disc)))
                       : std::sqrt(std::fabs(det));
    double m_margin = rd::div_down(gap, rd::mul_up(1.01, root.hi));
    double m_pick = std::min(m_margin, 0.9999 * lam_u);
    Interval rhs = Interval(m_pick) * root;
    if (!(m_pick > 1.0) || !(gap > rhs.hi))
      throw ExpansionTooWeak("automatic expansion constant " +
                             std::to_string(m_pick) +
                             " does not exceed 1 with margin (gap = " +
                             std::to_string(gap) + ")");
    saddle.m = m_pick;
    saddle.expansion_margin = gap - rhs.hi;
  }
  saddle.expansion_verified = true;
  return saddle;
}

// ---------------------------------------------------------------------------
// Connection problem and propagation.

struct ConnectionProblem {
  const PlanarMapEnclosure* map = nullptr;  // f = P^period, global coords
  int period = 1;

  AttractorBox attractor;
  DMat A1{2, 2};
  std::vector<double> p1;

  SaddleData saddle;
  DMat A2{2, 2};
  std::vector<double> p2;

  double x_bar = 0.0;
  Interval I{0.0};
  int iterates = 25;
  int fragments = 200;
  int fragment_cap = 1600;
  bool claim1_only = false;
  int threads = 1;

  // closed-curve bookkeeping for the resonant torus conclusion
  std::vector<IVector> attractor_orbit;
  std::vector<IVector> saddle_orbit;
  bool orbits_unique = false;
};

struct FragmentTrace {
  IVector final_local;  // in attractor coordinates
  int iterates_used = 0;
  bool ok = false;
};

struct ConnectionCertificate {
  bool heteroclinic_orbit = false;
  bool invariant_connecting_curve = false;
  bool resonant_torus = false;

  bool attractor_verified = false;
  bool cone_verified = false;
  bool expansion_verified = false;
  bool fiber_ok = false;
  bool propagation_ok = false;

  Interval fiber_image_u{0.0};
  int fragments_used = 0;
  std::vector<FragmentTrace> trace;

  int period = 0;
  bool orbit_closure_recorded = false;

  std::string map_description;
};

namespace detail {

// one fragment through up to n iterates of the global map; success as soon
// as the pullback lies inside the attractor box, which is forward invariant
// s-extent of the cone around the fixed point enclosure over a u-range:
// s in p*_s + [-L, L] (u_range - p*_u)
inline Interval cone_s_range(const SaddleData& saddle,
                             const Interval& u_range) {
  Interval pu(0.0), ps(0.0);
  if (saddle.p_star.size() == 2) {
    pu = saddle.p_star[0];
    ps = saddle.p_star[1];
  }
  return ps + Interval(-saddle.L, saddle.L) * (u_range - pu);
}

inline FragmentTrace propagate_fragment(const ConnectionProblem& prob,
                                        const Interval& u_range) {
  FragmentTrace tr;
  Interval s_range = cone_s_range(prob.saddle, u_range);
  PlanarSet set;
  set.c = {Interval(prob.p2[0]), Interval(prob.p2[1])};
  set.C = to_interval(prob.A2);
  set.r = {u_range, s_range};

  IMatrix A1inv = inverse2(to_interval(prob.A1));
  for (int it = 1; it <= prob.iterates; ++it) {
    try {
      set = prob.map->apply_set(set);
    } catch (const Error&) {
      tr.iterates_used = it;
      tr.ok = false;
      return tr;
    }
    IVector h = set.hull();
    IVector local = A1inv * IVector{h[0] - Interval(prob.p1[0]),
                                    h[1] - Interval(prob.p1[1])};
    tr.final_local = local;
    tr.iterates_used = it;
    if (prob.attractor.box[0].contains(local[0]) &&
        prob.attractor.box[1].contains(local[1])) {
      tr.ok = true;
      return tr;
    }
  }
  tr.ok = false;
  return tr;
}

}  // namespace detail

inline ConnectionCertificate propagate_fundamental_domain(
    const ConnectionProblem& prob) {
  if (prob.map == nullptr) throw DomainViolation("connection problem lacks a map");
  if (!prob.attractor.verified)
    throw MissingPrerequisite("attractor box not certified");
  if (!prob.saddle.cone_verified || !prob.saddle.expansion_verified)
    throw MissingPrerequisite("saddle cone not certified");
  if (!prob.I.contains(prob.x_bar))
    throw DomainViolation("x_bar lies outside the fundamental interval I");
  if (!prob.saddle.box[0].contains(prob.I))
    throw DomainViolation("fundamental interval I escapes the saddle box");

  ConnectionCertificate cert;
  cert.map_description = prob.map->description();
  cert.period = prob.period;
  cert.attractor_verified = true;
  cert.cone_verified = true;
  cert.expansion_verified = true;

  // (a) fiber condition pi_u f(fiber at x_bar) inside I, in saddle coords
  {
    PlanarSet fiber;
    fiber.c = {Interval(prob.p2[0]), Interval(prob.p2[1])};
    fiber.C = to_interval(prob.A2);
    fiber.r = {Interval(prob.x_bar),
               detail::cone_s_range(prob.saddle, Interval(prob.x_bar))};
    PlanarSet img = prob.map->apply_set(fiber);
    IVector h = img.hull();
    IMatrix A2inv = inverse2(to_interval(prob.A2));
    IVector local = A2inv * IVector{h[0] - Interval(prob.p2[0]),
                                    h[1] - Interval(prob.p2[1])};
    cert.fiber_image_u = local[0];
    if (!prob.I.contains(local[0]))
      throw FiberEscapesI("fiber image u-range " + to_string(local[0]) +
                          " escapes I = " + to_string(prob.I));
    cert.fiber_ok = true;
    cert.heteroclinic_orbit = true;
  }

  if (prob.claim1_only) return cert;

  // (b) slab propagation with auto-doubling of the fragment count
  int count = std::max(1, prob.fragments);
  while (true) {
    std::vector<FragmentTrace> traces(count);
    parallel_for(static_cast<std::size_t>(count), prob.threads,
                 [&](std::size_t idx) {
                   double w = prob.I.width() / count;
                   double lo = prob.I.lo + w * static_cast<double>(idx);
                   double hi = idx + 1 == static_cast<std::size_t>(count)
                                   ? prob.I.hi
                                   : prob.I.lo + w * (idx + 1);
                   traces[idx] =
                       detail::propagate_fragment(prob, Interval(lo, hi));
                 });
    bool all_ok = true;
    int first_bad = -1;
    for (int i = 0; i < count; ++i)
      if (!traces[i].ok) {
        all_ok = false;
        first_bad = i;
        break;
      }
    if (all_ok) {
      cert.propagation_ok = true;
      cert.invariant_connecting_curve = true;
      cert.fragments_used = count;
      cert.trace = std::move(traces);
      return cert;
    }
    if (2 * count > prob.fragment_cap) {
      const FragmentTrace& bad = traces[first_bad];
      std::string box = bad.final_local.size() == 2
                            ? "(" + to_string(bad.final_local[0]) + ", " +
                                  to_string(bad.final_local[1]) + ")"
                            : "(unavailable)";
      throw FragmentMissedAttractor(
          "fragment " + std::to_string(first_bad) + " of " +
          std::to_string(count) + " not inside the attractor box after " +
          std::to_string(bad.iterates_used) + " iterates; last box " + box);
    }
    count *= 2;
  }
}

inline ConnectionCertificate certify_resonant_torus(
    const ConnectionProblem& prob, int period,
    const ConnectionCertificate& curve) {
  if (!curve.invariant_connecting_curve)
    throw MissingPrerequisite(
        "resonant torus needs a certified invariant connecting curve");
  if (curve.period != period)
    throw MissingPrerequisite("curve certificate is for period " +
                              std::to_string(curve.period) +
                              ", requested " + std::to_string(period));
  if (static_cast<int>(prob.attractor_orbit.size()) != period ||
      static_cast<int>(prob.saddle_orbit.size()) != period ||
      !prob.orbits_unique)
    throw MissingPrerequisite(
        "closed-curve bookkeeping incomplete: need unique period-" +
        std::to_string(period) + " orbit enclosures for both fixed points");
  ConnectionCertificate cert = curve;
  cert.orbit_closure_recorded = true;
  cert.resonant_torus = true;
  return cert;
}

}  // namespace veritor
