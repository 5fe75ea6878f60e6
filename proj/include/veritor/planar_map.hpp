#pragma once

// Planar map enclosures: the forced Van der Pol time-2pi shift, the Langford
// first-return map and its iterates, affine localizations, and analytic test
// maps. A planar set is carried in affine form { c + C r : r in r_box } so
// composed applications chain sharply instead of hulling between legs.

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "veritor/field.hpp"
#include "veritor/flow.hpp"
#include "veritor/interval.hpp"
#include "veritor/linalg.hpp"
#include "veritor/newton.hpp"
#include "veritor/section.hpp"

namespace veritor {

struct PlanarSet {
  IVector c;   // 2 entries, usually thin
  IMatrix C;   // 2 x m
  IVector r;   // m entries

  IVector hull() const {
    IVector out(2);
    for (std::size_t i = 0; i < 2; ++i) {
      Interval s = c[i];
      for (std::size_t j = 0; j < r.size(); ++j) s += C(i, j) * r[j];
      out[i] = s;
    }
    return out;
  }

  static PlanarSet from_box(const IVector& box) {
    PlanarSet p;
    p.c = {Interval(box[0].mid()), Interval(box[1].mid())};
    p.C = IMatrix::identity(2);
    p.r = {box[0] - p.c[0], box[1] - p.c[1]};
    return p;
  }

  static PlanarSet parallelogram(const std::vector<double>& center,
                                 const DMat& frame, const IVector& box) {
    PlanarSet p;
    p.c = {Interval(center[0]), Interval(center[1])};
    p.C = to_interval(frame);
    p.r = box;
    return p;
  }
};

// Re-expresses a planar set as a point parallelogram with two parameters:
// thin center, orthonormal point frame aligned with the set's principal
// directions, interval remainder absorbing every defect.
inline PlanarSet tighten(const PlanarSet& in) {
  const std::size_t m = in.r.size();
  DMat G(2, m);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < m; ++j)
      G(i, j) = in.C(i, j).mid() * in.r[j].rad();
  double a = 0.0, b = 0.0, cc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    a += G(0, j) * G(0, j);
    b += G(0, j) * G(1, j);
    cc += G(1, j) * G(1, j);
  }
  DMat U = DMat::identity(2);
  if (a + cc > 0.0) {
    double theta = 0.5 * std::atan2(2.0 * b, a - cc);
    U(0, 0) = std::cos(theta);
    U(1, 0) = std::sin(theta);
    U(0, 1) = -U(1, 0);
    U(1, 1) = U(0, 0);
  }
  IVector h = in.hull();
  PlanarSet out;
  out.c = {Interval(h[0].mid()), Interval(h[1].mid())};
  out.C = to_interval(U);
  IMatrix Uinv = inverse2(out.C);
  // Rotate generator-wise: the support of the set in the new frame is the
  // sum of the rotated generators, which keeps thin directions thin.
  // Rotating the box hull instead smears the long axis into every
  // coordinate and compounds across repeated applications.
  IMatrix G2 = Uinv * in.C;
  IVector base = Uinv * IVector{in.c[0] - out.c[0], in.c[1] - out.c[1]};
  out.r = IVector(2);
  for (std::size_t i = 0; i < 2; ++i) {
    Interval s = base[i];
    for (std::size_t j = 0; j < m; ++j) s += G2(i, j) * in.r[j];
    out.r[i] = s;
  }
  return out;
}

struct MapApplication {
  PlanarSet image;
  IMatrix DP;  // 2x2 derivative enclosure over the whole input set
};

class PlanarMapEnclosure {
 public:
  virtual ~PlanarMapEnclosure() = default;
  virtual MapApplication apply_with_jacobian(const PlanarSet& in) const = 0;
  virtual std::string description() const = 0;
  virtual int iterate_count() const { return 1; }

  PlanarSet apply_set(const PlanarSet& in) const {
    return apply_with_jacobian(in).image;
  }
  virtual IVector evaluate(const IVector& box) const {
    return apply_set(PlanarSet::from_box(box)).hull();
  }
  IMatrix jacobian(const IVector& box) const {
    return apply_with_jacobian(PlanarSet::from_box(box)).DP;
  }
};

// ---------------------------------------------------------------------------
// Van der Pol stroboscopic map: advance the autonomous extension exactly one
// forcing period 2pi from (x, y, cos 0, sin 0).

class TimeShiftMap : public PlanarMapEnclosure {
 public:
  TimeShiftMap(double v, double eps, StepControl ctrl)
      : field_(vdp_extended(v, eps)), ctrl_(ctrl) {
    if (std::fabs(v) > 2.0 || std::fabs(eps) > 1.0)
      throw DomainViolation(
          "time shift map parameters outside the guarded range |v| <= 2, "
          "|eps| <= 1");
  }

  MapApplication apply_with_jacobian(const PlanarSet& in) const override {
    PlanarSet p = tighten(in);
    FlowEnclosure fe;
    fe.center = {p.c[0].mid(), p.c[1].mid(), 1.0, 0.0};
    fe.transport_matrix = DMat::identity(4);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        fe.transport_matrix(i, j) = p.C(i, j).mid();
    fe.remainder_box = {p.r[0], p.r[1], Interval(0.0), Interval(0.0)};
    LohnerSet ls{fe.center, fe.transport_matrix, fe.remainder_box};
    fe.state_box = ls.hull();
    fe.variational = IMatrix::identity(4);
    fe.time = Interval(0.0);

    FlowEnclosure end = advance(field_, fe, two_pi_interval(), ctrl_);

    MapApplication out;
    out.image.c = {Interval(end.center[0]), Interval(end.center[1])};
    out.image.C = IMatrix(2, 4);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        out.image.C(i, j) = Interval(end.transport_matrix(i, j));
    out.image.r = end.remainder_box;
    out.DP = IMatrix(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) out.DP(i, j) = end.variational(i, j);
    return out;
  }

  // Near-thin boxes skip the variational product entirely.
  IVector evaluate(const IVector& box) const override {
    FlowEnclosure fe;
    fe.center = {box[0].mid(), box[1].mid(), 1.0, 0.0};
    fe.transport_matrix = DMat::identity(4);
    fe.remainder_box = {box[0] - Interval(fe.center[0]),
                        box[1] - Interval(fe.center[1]), Interval(0.0),
                        Interval(0.0)};
    fe.state_box = {box[0], box[1], Interval(1.0), Interval(0.0)};
    fe.variational = IMatrix::identity(4);
    fe.time = Interval(0.0);
    StepControl thin = ctrl_;
    thin.want_variational = false;
    FlowEnclosure end = advance(field_, fe, two_pi_interval(), thin);
    IVector h = end.set().hull();
    return {h[0], h[1]};
  }

  std::string description() const override {
    return "vdp_forced time-2pi shift map, v=" +
           std::to_string(field_.params[0].second) +
           " eps=" + std::to_string(field_.params[1].second);
  }

  const VectorField& field() const { return field_; }

 private:
  VectorField field_;
  StepControl ctrl_;
};

inline TimeShiftMap build_time_shift_map(double v, double eps,
                                         const StepControl& ctrl) {
  return TimeShiftMap(v, eps, ctrl);
}

// ---------------------------------------------------------------------------
// Langford first-return map on {x = 0}, counting the first transversal
// crossing in either orientation. The crossing orientation of each leg is
// forced by the sign of y at the leg's start (x' = -delta*y on the section);
// the flow is asked for exactly that sign, so a wrong orientation anywhere
// refuses the whole composition.

struct LangfordParams {
  double alpha = 0.95;
  double beta = 0.7;
  double gamma = 0.6;
  double delta = 3.5;
  double eps = 0.25;
  double zeta = 0.1;
};

struct ReturnLegReport {
  int sign = 0;
  Interval crossing_time;
};

struct ReturnApplication {
  PlanarSet image;       // section coordinates (y, z)
  IMatrix DP;            // 2x2 over the whole input set
  Interval total_time;
  std::vector<ReturnLegReport> legs;
};

class ReturnMap : public PlanarMapEnclosure {
 public:
  ReturnMap(const LangfordParams& lp, int iterate, StepControl ctrl,
            int expected_first_sign = 0)
      : field_(langford(lp.alpha, lp.beta, lp.gamma, lp.delta, lp.eps,
                        lp.zeta)),
        params_(lp),
        iterate_(iterate),
        ctrl_(ctrl),
        expected_first_sign_(expected_first_sign) {
    if (iterate < 1)
      throw DomainViolation("return map iterate count must be >= 1");
  }

  ReturnApplication apply_full(const PlanarSet& in) const {
    ReturnApplication out;
    out.DP = IMatrix::identity(2);
    out.total_time = Interval(0.0);
    PlanarSet cur = tighten(in);
    for (int leg = 0; leg < iterate_; ++leg) {
      // departure direction on {x=0}: x' = -delta * y
      Interval y = cur.hull()[0];
      int sign;
      if (y.lo > 0.0)
        sign = +1;
      else if (y.hi < 0.0)
        sign = -1;
      else
        throw NoTransversalCrossing(
            "leg start has y enclosure straddling zero: departure direction "
            "undetermined");
      if (leg == 0 && expected_first_sign_ != 0 &&
          sign != expected_first_sign_)
        throw OrientationMismatch(
            "recorded first crossing sign does not match the departure "
            "direction");

      FlowEnclosure fe = embed(cur);
      SectionSpec sec;
      sec.coord = 0;
      sec.level = 0.0;
      sec.sign = sign;
      sec.max_time = 20.0;
      SectionCrossing sc = cross_section(field_, fe, sec, ctrl_);

      cur = replanarize(sc);
      IMatrix DP_leg(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) DP_leg(i, j) = sc.DP(i + 1, j + 1);
      out.DP = DP_leg * out.DP;
      out.total_time += sc.crossing_time;
      out.legs.push_back({sign, sc.crossing_time});
    }
    out.image = cur;
    return out;
  }

  MapApplication apply_with_jacobian(const PlanarSet& in) const override {
    ReturnApplication full = apply_full(in);
    return MapApplication{full.image, full.DP};
  }

  std::string description() const override {
    return "langford return map on {x=0}, alpha=" +
           std::to_string(params_.alpha) + ", iterate=" +
           std::to_string(iterate_);
  }

  int iterate_count() const override { return iterate_; }
  const VectorField& field() const { return field_; }
  const LangfordParams& params() const { return params_; }
  const StepControl& control() const { return ctrl_; }

 private:
  FlowEnclosure embed(const PlanarSet& p) const {
    FlowEnclosure fe;
    fe.center = {0.0, p.c[0].mid(), p.c[1].mid()};
    fe.transport_matrix = DMat::identity(3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        fe.transport_matrix(i + 1, j + 1) = p.C(i, j).mid();
    fe.remainder_box = {Interval(0.0), p.r[0], p.r[1]};
    LohnerSet ls{fe.center, fe.transport_matrix, fe.remainder_box};
    fe.state_box = ls.hull();
    fe.variational = IMatrix::identity(3);
    fe.time = Interval(0.0);
    return fe;
  }

  static PlanarSet replanarize(const SectionCrossing& sc) {
    PlanarSet raw;
    raw.c = {sc.affine_center[1], sc.affine_center[2]};
    raw.C = IMatrix(2, sc.r_box.size());
    for (std::size_t j = 0; j < sc.r_box.size(); ++j) {
      raw.C(0, j) = sc.affine_C(1, j);
      raw.C(1, j) = sc.affine_C(2, j);
    }
    raw.r = sc.r_box;
    return tighten(raw);
  }

  VectorField field_;
  LangfordParams params_;
  int iterate_;
  StepControl ctrl_;
  int expected_first_sign_;
};

inline ReturnMap build_return_map(const LangfordParams& lp, int iterate,
                                  const StepControl& ctrl,
                                  int expected_first_sign = 0) {
  return ReturnMap(lp, iterate, ctrl, expected_first_sign);
}

// ---------------------------------------------------------------------------
// Affine localization g(q) = A^{-1} (f(A q + p) - p) around a stated point.

class LocalizedMap : public PlanarMapEnclosure {
 public:
  LocalizedMap(const PlanarMapEnclosure& inner, const DMat& A,
               const IVector& p_star)
      : inner_(&inner), A_(A), Ainv_(inverse2(to_interval(A))) {
    p_ = {p_star[0].mid(), p_star[1].mid()};
  }

  MapApplication apply_with_jacobian(const PlanarSet& in) const override {
    PlanarSet global;
    IMatrix Ai = to_interval(A_);
    global.c = {Ai(0, 0) * in.c[0] + Ai(0, 1) * in.c[1] + Interval(p_[0]),
                Ai(1, 0) * in.c[0] + Ai(1, 1) * in.c[1] + Interval(p_[1])};
    global.C = Ai * in.C;
    global.r = in.r;
    MapApplication app = inner_->apply_with_jacobian(global);
    MapApplication out;
    out.image.c = Ainv_ * (app.image.c - IVector{Interval(p_[0]),
                                                 Interval(p_[1])});
    out.image.C = Ainv_ * app.image.C;
    out.image.r = app.image.r;
    out.DP = (Ainv_ * app.DP) * Ai;
    return out;
  }

  std::string description() const override {
    return "localized(" + inner_->description() + ")";
  }
  int iterate_count() const override { return inner_->iterate_count(); }

 private:
  const PlanarMapEnclosure* inner_;
  DMat A_;
  IMatrix Ainv_;
  std::vector<double> p_;
};

inline LocalizedMap localize(const PlanarMapEnclosure& map, const DMat& A,
                             const IVector& p_star) {
  return LocalizedMap(map, A, p_star);
}

// ---------------------------------------------------------------------------
// Closed-form maps for the property and model-problem suites.

class AnalyticMap : public PlanarMapEnclosure {
 public:
  using EvalFn = std::function<IVector(const IVector&)>;
  using JacFn = std::function<IMatrix(const IVector&)>;

  AnalyticMap(EvalFn f, JacFn jac, std::string desc)
      : f_(std::move(f)), jac_(std::move(jac)), desc_(std::move(desc)) {}

  MapApplication apply_with_jacobian(const PlanarSet& in) const override {
    IVector h = in.hull();
    IVector fc = f_(in.c);
    IMatrix J = jac_(h);
    MapApplication out;
    out.image.c = fc;
    out.image.C = J * in.C;
    out.image.r = in.r;
    out.DP = J;
    return out;
  }

  std::string description() const override { return desc_; }

 private:
  EvalFn f_;
  JacFn jac_;
  std::string desc_;
};

// ---------------------------------------------------------------------------
// Multiple shooting residual G(q_1..q_m) = (P(q_m) - q_1, P(q_1) - q_2, ...)
// with block-cyclic jacobian made of [DP(q_i)] and -Id blocks.

struct ShootingProblem {
  int period = 1;
  const PlanarMapEnclosure* map = nullptr;  // single-return map
};

inline std::pair<IVector, IMatrix> shooting_residual(
    const ShootingProblem& prob, const IVector& stacked) {
  const int m = prob.period;
  if (static_cast<int>(stacked.size()) != 2 * m)
    throw DimensionMismatch("shooting residual: stacked box has wrong size");
  std::vector<MapApplication> apps(m);
  for (int i = 0; i < m; ++i) {
    IVector qi = {stacked[2 * i], stacked[2 * i + 1]};
    apps[i] = prob.map->apply_with_jacobian(PlanarSet::from_box(qi));
  }
  IVector G(2 * m);
  IMatrix DG(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    int prev = (i + m - 1) % m;
    IVector img = apps[prev].image.hull();
    G[2 * i] = img[0] - stacked[2 * i];
    G[2 * i + 1] = img[1] - stacked[2 * i + 1];
    // accumulate so the period-1 case, where both blocks land on the same
    // entries, still reads DP - Id
    for (int a = 0; a < 2; ++a) {
      DG(2 * i + a, 2 * i + a) = Interval(-1.0);
      for (int b = 0; b < 2; ++b)
        DG(2 * i + a, 2 * prev + b) =
            DG(2 * i + a, 2 * prev + b) + apps[prev].DP(a, b);
    }
  }
  return {G, DG};
}

}  // namespace veritor
