#pragma once

// Validated Taylor integration with Lohner parallelepiped propagation.
//
// A set is carried as { c + T r : r in r_box } with point center c, point
// frame T and interval remainder r_box. Each step:
//   1. Taylor series through the center proposes a step size and gives the
//      center image polynomial.
//   2. A first-order Picard iteration validates an a-priori tube W for the
//      whole set over the step, and a matching tube for the variational flow.
//   3. Series coefficients over W provide the Lagrange remainders at order
//      p+1, turning the truncated polynomials into enclosures.
//   4. The one-step derivative enclosure [M] updates the parallelepiped
//      (QR re-orthogonalized frame) and the accumulated variational product.
//
// Steps are thin except the last one, which takes an interval step so the
// final time can be an irrational target like 2*pi.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "veritor/field.hpp"
#include "veritor/interval.hpp"
#include "veritor/linalg.hpp"

namespace veritor {

struct StepSizeUnderflow : Error {
  using Error::Error;
};
struct ValidationFailure : Error {
  using Error::Error;
};

struct StepControl {
  int order = 12;
  double h_min = 1e-10;
  double h_max = 0.5;
  double tolerance = 1e-14;
  int qr_requeeze_every = 1;
  // When false the accumulated variational product is not computed and the
  // one-step set transport falls back to the first-order enclosure
  // Id + [0,h] J(tube) WV. Only sound uses: advancing thin sets where the
  // derivative output is never read. Section crossings refuse this mode.
  bool want_variational = true;
};

struct LohnerSet {
  std::vector<double> c;
  DMat T;
  IVector r;

  std::size_t dim() const { return c.size(); }

  IVector hull() const {
    const std::size_t n = c.size();
    IVector out(n);
    for (std::size_t i = 0; i < n; ++i) {
      Interval s(c[i]);
      for (std::size_t j = 0; j < n; ++j) s += Interval(T(i, j)) * r[j];
      out[i] = s;
    }
    return out;
  }

  static LohnerSet from_box(const IVector& box) {
    LohnerSet s;
    const std::size_t n = box.size();
    s.c = mid_vec(box);
    s.T = DMat::identity(n);
    s.r.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.r[i] = box[i] - Interval(s.c[i]);
    return s;
  }
};

struct FlowEnclosure {
  IVector state_box;
  std::vector<double> center;
  DMat transport_matrix;
  IVector remainder_box;
  IMatrix variational;
  Interval time;

  LohnerSet set() const { return LohnerSet{center, transport_matrix, remainder_box}; }

  static FlowEnclosure from_box(const IVector& box,
                                Interval t0 = Interval(0.0)) {
    FlowEnclosure fe;
    LohnerSet s = LohnerSet::from_box(box);
    fe.state_box = s.hull();
    fe.center = s.c;
    fe.transport_matrix = s.T;
    fe.remainder_box = s.r;
    fe.variational = IMatrix::identity(box.size());
    fe.time = t0;
    return fe;
  }
};

// ---------------------------------------------------------------------------
// Taylor coefficient machinery over the expression graph.

class TaylorEngine {
 public:
  explicit TaylorEngine(const VectorField& f) : f_(&f) {}

  // Computes node coefficient series to order p and solution coefficients to
  // order p+1, for the solution family through x0.
  void run(const IVector& x0, int p) {
    const auto& ns = f_->graph.nodes();
    const int n = f_->dim;
    p_ = p;
    cf_.assign(ns.size(), {});
    for (auto& c : cf_) c.assign(p + 1, Interval(0.0));
    xs_.assign(p + 2, IVector(n));
    xs_[0] = x0;
    for (int k = 0; k <= p; ++k) {
      for (std::size_t id = 0; id < ns.size(); ++id) {
        const ExprNode& nd = ns[id];
        Interval& out = cf_[id][k];
        switch (nd.op) {
          case ExprOp::Const:
            out = k == 0 ? Interval::unchecked(nd.clo, nd.chi) : Interval(0.0);
            break;
          case ExprOp::Var:
            out = xs_[k][nd.var];
            break;
          case ExprOp::Add:
            out = cf_[nd.a][k] + cf_[nd.b][k];
            break;
          case ExprOp::Sub:
            out = cf_[nd.a][k] - cf_[nd.b][k];
            break;
          case ExprOp::Neg:
            out = -cf_[nd.a][k];
            break;
          case ExprOp::Mul: {
            if (f_->graph.is_const(nd.a)) {
              out = cf_[nd.a][0] * cf_[nd.b][k];
            } else if (f_->graph.is_const(nd.b)) {
              out = cf_[nd.a][k] * cf_[nd.b][0];
            } else {
              Interval acc(0.0);
              for (int j = 0; j <= k; ++j)
                acc += cf_[nd.a][j] * cf_[nd.b][k - j];
              out = acc;
            }
            break;
          }
        }
      }
      Interval kk(static_cast<double>(k + 1));
      for (int i = 0; i < n; ++i)
        xs_[k + 1][i] = cf_[f_->rhs[i]][k] / kk;
    }
  }

  int order() const { return p_; }
  const IVector& x(int k) const { return xs_[k]; }

  IMatrix jac_coeff(int k) const {
    const int n = f_->dim;
    IMatrix J(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        J(i, j) = cf_[f_->jac[static_cast<std::size_t>(i) * n + j]][k];
    return J;
  }

 private:
  const VectorField* f_;
  int p_ = -1;
  std::vector<std::vector<Interval>> cf_;
  std::vector<IVector> xs_;
};

// V_{k+1} = (1/(k+1)) * sum_{j<=k} J_j V_{k-j}; returns V_0..V_kmax.
inline std::vector<IMatrix> variational_series(const TaylorEngine& eng,
                                               const IMatrix& V0, int kmax) {
  std::vector<IMatrix> V(kmax + 1);
  V[0] = V0;
  for (int k = 0; k < kmax; ++k) {
    IMatrix acc(V0.rows, V0.cols);
    for (int j = 0; j <= k; ++j) acc = acc + eng.jac_coeff(j) * V[k - j];
    V[k + 1] = Interval(1.0 / (k + 1.0)) * acc;
  }
  return V;
}

inline IVector horner(const std::vector<IVector>& cs, int p,
                      const Interval& h) {
  IVector acc = cs[p];
  for (int k = p - 1; k >= 0; --k) acc = cs[k] + h * acc;
  return acc;
}

inline IMatrix horner(const std::vector<IMatrix>& cs, int p,
                      const Interval& h) {
  IMatrix acc = cs[p];
  for (int k = p - 1; k >= 0; --k) {
    IMatrix t = h * acc;
    acc = cs[k] + t;
  }
  return acc;
}

inline bool is_finite(const IVector& v) {
  for (const Interval& e : v)
    if (!e.is_finite()) return false;
  return true;
}

// First-order a-priori enclosure over [0,h] via Picard iteration.
inline bool find_tube(const VectorField& f, const IVector& X, double h,
                      IVector& W) {
  Interval span(0.0, h);
  IVector Z = hull(X, X + span * f.eval(X));
  double pad = 1e-14;
  for (std::size_t i = 0; i < Z.size(); ++i)
    pad = std::max(pad, 0.05 * Z[i].width() + 1e-16 * Z[i].mag());
  Z = inflate(Z, pad);
  for (int tries = 0; tries < 24; ++tries) {
    if (!is_finite(Z)) return false;
    IVector Y = hull(X, X + span * f.eval(Z));
    if (!is_finite(Y)) return false;
    if (contains(Z, Y)) {
      W = Y;
      return true;
    }
    Z = inflate(hull(Z, Y), pad * (tries + 2));
  }
  return false;
}

// Same validation for the variational flow: Id + [0,h] J(W) Z subset Z.
inline bool find_var_tube(const VectorField& f, const IVector& W, double h,
                          IMatrix& WV) {
  const std::size_t n = W.size();
  Interval span(0.0, h);
  IMatrix J = f.jacobian(W);
  IMatrix Id = IMatrix::identity(n);
  IMatrix Z = Id + span * (J * Id);
  double pad = 1e-14;
  for (std::size_t i = 0; i < Z.a.size(); ++i)
    pad = std::max(pad, 0.05 * Z.a[i].width());
  for (auto& e : Z.a) e = inflate(e, pad);
  for (int tries = 0; tries < 24; ++tries) {
    IMatrix Y = Id + span * (J * Z);
    if (contains(Z, Y)) {
      WV = Y;
      return true;
    }
    for (std::size_t i = 0; i < Z.a.size(); ++i)
      Z.a[i] = inflate(hull(Z.a[i], Y.a[i]), pad * (tries + 2));
  }
  return false;
}

// ---------------------------------------------------------------------------

class Stepper {
 public:
  Stepper(const VectorField& f, const StepControl& ctrl,
          const FlowEnclosure& start)
      : f_(&f),
        ctrl_(ctrl),
        S_(start.set()),
        V_(start.variational),
        time_(start.time),
        eng_(f),
        wide_(f),
        tube_eng_(f) {}

  const LohnerSet& set() const { return S_; }
  const IMatrix& variational() const { return V_; }
  const Interval& time() const { return time_; }
  IVector hull() const { return S_.hull(); }
  const IVector& last_tube() const { return last_tube_; }
  const IMatrix& last_var_tube() const { return last_var_tube_; }
  const Interval& last_h() const { return last_h_; }

  FlowEnclosure snapshot() const {
    FlowEnclosure fe;
    fe.state_box = S_.hull();
    fe.center = S_.c;
    fe.transport_matrix = S_.T;
    fe.remainder_box = S_.r;
    fe.variational = V_;
    fe.time = time_;
    return fe;
  }

  // Step size suggestion from the center Taylor series.
  double propose() {
    refresh_center_series();
    const int p = ctrl_.order;
    double worst = 0.0;
    for (int k : {p - 1, p}) {
      double nrm = 0.0;
      for (int i = 0; i < f_->dim; ++i) {
        double scale = std::max(1.0, std::fabs(S_.c[i]));
        nrm = std::max(nrm, eng_.x(k)[i].mag() / scale);
      }
      if (nrm > 0.0)
        worst = std::max(worst, std::pow(nrm / ctrl_.tolerance, 1.0 / k));
    }
    double h = worst > 0.0 ? 0.9 / worst : ctrl_.h_max;
    return std::clamp(h, ctrl_.h_min, ctrl_.h_max);
  }

  // One validated step over exactly h; false when tube validation fails.
  bool take(const Interval& h) {
    const int p = ctrl_.order;
    const int n = f_->dim;
    double h_hi = h.hi;
    IVector X = S_.hull();
    IVector W;
    if (!find_tube(*f_, X, h_hi, W)) return false;
    IMatrix WV;
    if (!find_var_tube(*f_, W, h_hi, WV)) return false;

    refresh_center_series();
    tube_eng_.run(W, p);

    Interval hp1 = pow(h, p + 1);
    std::vector<IVector> center_cs(p + 1);
    for (int k = 0; k <= p; ++k) center_cs[k] = eng_.x(k);
    IVector Pc = horner(center_cs, p, h) + hp1 * tube_eng_.x(p + 1);

    IMatrix M;
    if (ctrl_.want_variational) {
      wide_.run(X, p - 1);
      std::vector<IMatrix> Vs =
          variational_series(wide_, IMatrix::identity(n), p);
      std::vector<IMatrix> VsT = variational_series(tube_eng_, WV, p + 1);
      M = horner(Vs, p, h) + hp1 * VsT[p + 1];
    } else {
      M = to_interval(DMat::identity(n)) +
          (Interval::unchecked(0.0, h_hi) * f_->jacobian(W)) * WV;
    }

    // re-Lohnerize
    std::vector<double> c2 = mid_vec(Pc);
    IVector delta(n);
    for (int i = 0; i < n; ++i) delta[i] = Pc[i] - Interval(c2[i]);

    DMat A(n, n);
    {
      DMat Mm = mid(M);
      A = dmul(Mm, S_.T);
    }
    ++steps_taken_;
    DMat B(n, n);
    if (ctrl_.qr_requeeze_every > 0 &&
        steps_taken_ % ctrl_.qr_requeeze_every == 0) {
      // sort columns by contribution before orthogonalizing
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::vector<double> weight(n);
      for (int j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) nrm += A(i, j) * A(i, j);
        weight[j] = std::sqrt(nrm) * S_.r[j].rad();
      }
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
      DMat Ap(n, n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) Ap(i, j) = A(i, idx[j]);
      B = dqr_q(Ap);
    } else {
      B = A;
    }

    IMatrix Binv;
    try {
      Binv = gauss_inverse(to_interval(B));
    } catch (const SingularIntervalMatrix&) {
      return false;
    }
    IMatrix MT = M * to_interval(S_.T);
    S_.r = (Binv * MT) * S_.r + Binv * delta;
    S_.c = c2;
    S_.T = B;
    if (ctrl_.want_variational) V_ = M * V_;
    time_ += h;
    last_tube_ = W;
    last_var_tube_ = WV;
    last_h_ = h;
    center_fresh_ = false;
    return true;
  }

  // Propose, cap, halve on validation failure.
  void step_auto(double cap) {
    double h = std::min(propose(), cap);
    while (true) {
      if (h < ctrl_.h_min)
        throw StepSizeUnderflow("validated step fell below h_min = " +
                                std::to_string(ctrl_.h_min));
      if (take(Interval(h))) return;
      h *= 0.5;
    }
  }

  // Center-series state polynomial value at thin time t (non-rigorous helper
  // for crossing prediction; uses interval coefficients' midpoints).
  double predict_coord(int coord, double t) const {
    double acc = 0.0;
    for (int k = eng_.order() + 1; k >= 0; --k)
      acc = eng_.x(k)[coord].mid() + t * acc;
    return acc;
  }

  const VectorField& field() const { return *f_; }
  const StepControl& control() const { return ctrl_; }

  void restore(const FlowEnclosure& snap) {
    S_ = snap.set();
    V_ = snap.variational;
    time_ = snap.time;
    center_fresh_ = false;
  }

 private:
  void refresh_center_series() {
    if (center_fresh_) return;
    IVector c0(S_.c.size());
    for (std::size_t i = 0; i < S_.c.size(); ++i) c0[i] = Interval(S_.c[i]);
    eng_.run(c0, ctrl_.order - 1);
    center_fresh_ = true;
  }

  const VectorField* f_;
  StepControl ctrl_;
  LohnerSet S_;
  IMatrix V_;
  Interval time_;
  TaylorEngine eng_;
  TaylorEngine wide_;
  TaylorEngine tube_eng_;
  IVector last_tube_;
  IMatrix last_var_tube_;
  Interval last_h_{0.0};
  bool center_fresh_ = false;
  long steps_taken_ = 0;
};

inline FlowEnclosure advance(const VectorField& field,
                             const FlowEnclosure& start, Interval T,
                             const StepControl& ctrl) {
  if (!(T.lo > 0.0))
    throw DomainViolation("advance requires a strictly positive horizon");
  Stepper st(field, ctrl, start);
  Interval goal = start.time + T;
  while (true) {
    Interval rem = goal - st.time();
    if (!(rem.lo > 0.0))
      throw ValidationFailure("time bookkeeping lost positivity of remainder");
    double prop = st.propose();
    if (rem.hi <= prop) {
      if (st.take(rem)) break;
      st.step_auto(std::max(ctrl.h_min, 0.5 * rem.lo));
      continue;
    }
    st.step_auto(std::min(prop, 0.9 * rem.lo));
  }
  return st.snapshot();
}

}  // namespace veritor
