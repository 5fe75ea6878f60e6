// Non-rigorous companion tool. Produces the floating-point inputs the
// verifier consumes: seed points along an invariant circle of the forced
// Van der Pol stroboscopic map, and periodic orbit guesses plus suggested
// adapted frames for the Langford return map. Nothing here is validated;
// the verifier re-certifies everything from these numbers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/numeric/odeint.hpp>

#include "veritor/atlas.hpp"

namespace ode = boost::numeric::odeint;
using State2 = std::array<double, 2>;
using State3 = std::array<double, 3>;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// --- forced Van der Pol -----------------------------------------------------

struct VdpRhs {
  double v, eps;
  void operator()(const State2& s, State2& ds, double t) const {
    ds[0] = s[1];
    ds[1] = v * (1.0 - s[0] * s[0]) * s[1] - s[0] + eps * std::cos(t);
  }
};

State2 vdp_map(const VdpRhs& rhs, State2 s) {
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State2>>(
      1e-13, 1e-13);
  ode::integrate_adaptive(stepper, rhs, s, 0.0, kTwoPi, 1e-3);
  return s;
}

int run_vdp(double v, double eps, int n, int transient, int samples,
            const std::string& out) {
  VdpRhs rhs{v, eps};
  State2 s{2.0, 0.0};
  for (int i = 0; i < transient; ++i) s = vdp_map(rhs, s);

  std::vector<State2> pts(samples);
  for (int i = 0; i < samples; ++i) {
    s = vdp_map(rhs, s);
    pts[i] = s;
  }

  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p[0];
    cy += p[1];
  }
  cx /= samples;
  cy /= samples;

  struct Ang {
    double theta;
    State2 p;
  };
  std::vector<Ang> ord(samples);
  for (int i = 0; i < samples; ++i) {
    double th = std::atan2(pts[i][1] - cy, pts[i][0] - cx);
    if (th < 0) th += kTwoPi;
    ord[i] = {th, pts[i]};
  }
  std::sort(ord.begin(), ord.end(),
            [](const Ang& a, const Ang& b) { return a.theta < b.theta; });

  double max_gap = 0.0, max_jump = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Ang& a = ord[i];
    const Ang& b = ord[(i + 1) % samples];
    double gap = b.theta - a.theta;
    if (i + 1 == samples) gap += kTwoPi;
    max_gap = std::max(max_gap, gap);
    max_jump = std::max(max_jump, std::hypot(b.p[0] - a.p[0], b.p[1] - a.p[1]));
  }
  std::printf("centroid (%.6f, %.6f), max angular gap %.3e rad, "
              "max neighbour jump %.3e\n", cx, cy, max_gap, max_jump);
  if (max_gap > 0.5 * kTwoPi / n)
    std::printf("warning: sampling is sparse relative to n=%d; "
                "consider more --samples\n", n);
  if (max_jump > 0.2)
    std::printf("warning: angle-sorted neighbours are far apart; the curve "
                "may not be star-shaped about the centroid\n");

  std::vector<std::array<double, 2>> seeds(n);
  int j = 0;
  for (int k = 0; k < n; ++k) {
    double th = kTwoPi * k / n;
    while (j + 1 < samples && ord[j + 1].theta <= th) ++j;
    const Ang& a = ord[j];
    const Ang& b = ord[(j + 1) % samples];
    double span = b.theta - a.theta;
    if (j + 1 == samples) span += kTwoPi;
    double t = span > 1e-12 ? (th - a.theta) / span : 0.0;
    seeds[k] = {a.p[0] + t * (b.p[0] - a.p[0]),
                a.p[1] + t * (b.p[1] - a.p[1])};
  }

  veritor::write_seed_points(out, seeds);
  std::printf("wrote %d seed points to %s\n", n, out.c_str());
  std::printf("config lines:\n  vdp.v = %.17g\n  vdp.eps = %.17g\n"
              "  circle.seed_file = %s\n", v, eps, out.c_str());
  return 0;
}

// --- Langford return map ----------------------------------------------------

struct LangfordRhs {
  double alpha, beta, gamma, delta, eps, zeta;
  void operator()(const State3& s, State3& ds, double) const {
    double x = s[0], y = s[1], z = s[2];
    ds[0] = (z - beta) * x - delta * y;
    ds[1] = delta * x + (z - beta) * y;
    ds[2] = gamma + alpha * z - z * z * z / 3.0 -
            (x * x + y * y) * (1.0 + eps * z) + zeta * z * x * x * x;
  }
};

// One section-to-section leg. Starts on {x=0} at (y, z); the crossing
// orientation alternates with the sign of y (x' = -delta*y there).
State2 langford_leg(const LangfordRhs& rhs, State2 yz, double* time_out) {
  int want = yz[0] > 0 ? +1 : -1;  // sign of x' at the arrival crossing
  State3 s{0.0, yz[0], yz[1]};
  ode::runge_kutta_dopri5<State3> stepper;
  double h = 1e-3, t = 0.0;
  State3 prev = s;
  for (int step = 0; step < 2000000; ++step) {
    prev = s;
    stepper.do_step(rhs, s, t, h);
    t += h;
    if (t > 1e-2 && prev[0] * s[0] <= 0.0 && s[0] * want >= 0.0) {
      State3 ds;
      rhs(s, ds, t);
      if (ds[0] * want > 0.0) {
        for (int it = 0; it < 60; ++it) {
          rhs(s, ds, t);
          double dt = -s[0] / ds[0];
          if (std::fabs(dt) < 1e-16) break;
          dt = std::clamp(dt, -h, h);
          ode::runge_kutta_fehlberg78<State3> fine;
          fine.do_step(rhs, s, t, dt);
          t += dt;
        }
        if (time_out) *time_out = t;
        return {s[1], s[2]};
      }
    }
    if (t > 100.0) break;
  }
  std::fprintf(stderr, "leg from (%.6f, %.6f) found no crossing\n", yz[0],
               yz[1]);
  std::exit(1);
}

std::vector<State2> orbit_from_point(const LangfordRhs& rhs, State2 p,
                                     int period) {
  std::vector<State2> orb(period);
  for (int i = 0; i < period; ++i) {
    orb[i] = p;
    p = langford_leg(rhs, p, nullptr);
  }
  return orb;
}

// Multiple-shooting Newton with finite-difference jacobians.
bool newton_orbit(const LangfordRhs& rhs, std::vector<State2>& orb) {
  const int m = static_cast<int>(orb.size());
  const int dim = 2 * m;
  for (int it = 0; it < 40; ++it) {
    std::vector<double> G(dim);
    std::vector<std::vector<double>> J(dim, std::vector<double>(dim, 0.0));
    double gmax = 0.0;
    for (int i = 0; i < m; ++i) {
      int prev = (i + m - 1) % m;
      State2 img = langford_leg(rhs, orb[prev], nullptr);
      G[2 * i] = img[0] - orb[i][0];
      G[2 * i + 1] = img[1] - orb[i][1];
      gmax = std::max({gmax, std::fabs(G[2 * i]), std::fabs(G[2 * i + 1])});
      J[2 * i][2 * i] -= 1.0;
      J[2 * i + 1][2 * i + 1] -= 1.0;
      const double fd = 1e-7;
      for (int c = 0; c < 2; ++c) {
        State2 hi = orb[prev], lo = orb[prev];
        hi[c] += fd;
        lo[c] -= fd;
        State2 a = langford_leg(rhs, hi, nullptr);
        State2 b = langford_leg(rhs, lo, nullptr);
        J[2 * i][2 * prev + c] += (a[0] - b[0]) / (2 * fd);
        J[2 * i + 1][2 * prev + c] += (a[1] - b[1]) / (2 * fd);
      }
    }
    if (gmax < 5e-14) return true;

    // dense Gaussian elimination with partial pivoting
    std::vector<double> dx(dim);
    for (int col = 0; col < dim; ++col) {
      int piv = col;
      for (int r = col + 1; r < dim; ++r)
        if (std::fabs(J[r][col]) > std::fabs(J[piv][col])) piv = r;
      std::swap(J[col], J[piv]);
      std::swap(G[col], G[piv]);
      if (std::fabs(J[col][col]) < 1e-14) return false;
      for (int r = col + 1; r < dim; ++r) {
        double f = J[r][col] / J[col][col];
        for (int c = col; c < dim; ++c) J[r][c] -= f * J[col][c];
        G[r] -= f * G[col];
      }
    }
    for (int r = dim - 1; r >= 0; --r) {
      double acc = G[r];
      for (int c = r + 1; c < dim; ++c) acc -= J[r][c] * dx[c];
      dx[r] = acc / J[r][r];
    }
    for (int i = 0; i < m; ++i) {
      orb[i][0] -= dx[2 * i];
      orb[i][1] -= dx[2 * i + 1];
    }
  }
  return false;
}

void print_orbit(const char* key, const std::vector<State2>& orb) {
  std::printf("%s =", key);
  for (const auto& p : orb) std::printf(" %.15g %.15g", p[0], p[1]);
  std::printf("\n");
}

void composed_jacobian(const LangfordRhs& rhs, State2 p, int period,
                       double J[2][2]) {
  const double fd = 1e-7;
  for (int c = 0; c < 2; ++c) {
    State2 hi = p, lo = p;
    hi[c] += fd;
    lo[c] -= fd;
    for (int i = 0; i < period; ++i) {
      hi = langford_leg(rhs, hi, nullptr);
      lo = langford_leg(rhs, lo, nullptr);
    }
    J[0][c] = (hi[0] - lo[0]) / (2 * fd);
    J[1][c] = (hi[1] - lo[1]) / (2 * fd);
  }
}

void print_frames(const LangfordRhs& rhs, const std::vector<State2>& attr,
                  const std::vector<State2>& sad, int period) {
  double Ja[2][2], Js[2][2];
  composed_jacobian(rhs, attr[0], period, Ja);
  composed_jacobian(rhs, sad[0], period, Js);
  std::printf("attractor jacobian of the composed map: [[%.9g, %.9g], "
              "[%.9g, %.9g]]\n", Ja[0][0], Ja[0][1], Ja[1][0], Ja[1][1]);
  std::printf("saddle jacobian of the composed map: [[%.9g, %.9g], "
              "[%.9g, %.9g]]\n", Js[0][0], Js[0][1], Js[1][0], Js[1][1]);

  double tr = Ja[0][0] + Ja[1][1];
  double det = Ja[0][0] * Ja[1][1] - Ja[0][1] * Ja[1][0];
  double disc = tr * tr / 4 - det;
  if (disc < 0) {
    double a = tr / 2, b = std::sqrt(-disc);
    std::printf("attractor eigenvalues %.9g +/- %.9gi (modulus %.9g)\n", a, b,
                std::hypot(a, b));
    // real pair (Re u, Im u) for eigenvector u of eigenvalue a - bi
    double ux = Ja[0][1], wy = a - Ja[0][0];
    double norm = std::hypot(ux, wy);
    std::printf("suggested connection.A1 = %.15g %.15g %.15g %.15g\n",
                ux / norm, 0.0, wy / norm, b / norm);
  }

  tr = Js[0][0] + Js[1][1];
  det = Js[0][0] * Js[1][1] - Js[0][1] * Js[1][0];
  disc = tr * tr / 4 - det;
  if (disc > 0) {
    double lu = tr / 2 + std::sqrt(disc), ls = tr / 2 - std::sqrt(disc);
    if (std::fabs(lu) < std::fabs(ls)) std::swap(lu, ls);
    std::printf("saddle eigenvalues %.9g (unstable), %.9g (stable)\n", lu, ls);
    auto col = [&](double lam, double out[2]) {
      double vx = Js[0][1], vy = lam - Js[0][0];
      if (std::hypot(vx, vy) < 1e-12) {
        vx = lam - Js[1][1];
        vy = Js[1][0];
      }
      double s = std::fabs(vx) > std::fabs(vy) ? vx : vy;
      out[0] = vx / s;
      out[1] = vy / s;
    };
    double u[2], w[2];
    col(lu, u);
    col(ls, w);
    std::printf("suggested connection.A2 = %.15g %.15g %.15g %.15g\n", u[0],
                w[0], u[1], w[1]);
  }
}

int run_langford(double alpha, int period, State2 attr_guess,
                 State2 sad_guess) {
  LangfordRhs rhs{alpha, 0.7, 0.6, 3.5, 0.25, 0.1};
  std::vector<State2> attr = orbit_from_point(rhs, attr_guess, period);
  std::vector<State2> sad = orbit_from_point(rhs, sad_guess, period);
  // settle the attracting orbit first so Newton starts close
  for (int i = 0; i < 200; ++i)
    attr[0] = langford_leg(rhs, attr[0], nullptr);
  attr = orbit_from_point(rhs, attr[0], period);

  if (!newton_orbit(rhs, attr)) {
    std::fprintf(stderr, "attractor orbit Newton did not converge\n");
    return 1;
  }
  if (!newton_orbit(rhs, sad)) {
    std::fprintf(stderr, "saddle orbit Newton did not converge\n");
    return 1;
  }
  std::printf("config lines:\n  langford.alpha = %.17g\n  orbit.period = %d\n",
              alpha, period);
  std::printf("  ");
  print_orbit("orbit.attractor", attr);
  std::printf("  ");
  print_orbit("orbit.saddle", sad);
  print_frames(rhs, attr, sad, period);

  double total = 0.0;
  State2 p = attr[0];
  for (int i = 0; i < period; ++i) {
    double dt = 0.0;
    p = langford_leg(rhs, p, &dt);
    total += dt;
  }
  std::printf("attractor orbit return times sum to %.9g\n", total);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seedgen: non-rigorous seed data for the veritor verifier"};
  app.require_subcommand(1);

  double v = 0.5, eps = 0.1;
  int n = 1000, transient = 500, samples = 0;
  std::string out = "seeds.txt";
  CLI::App* vdp = app.add_subcommand(
      "vdp", "sample an invariant circle of the forced Van der Pol map");
  vdp->add_option("--v", v, "damping parameter");
  vdp->add_option("--eps", eps, "forcing amplitude");
  vdp->add_option("--n", n, "number of seed points to write");
  vdp->add_option("--transient", transient, "map applications to discard");
  vdp->add_option("--samples", samples, "orbit samples (default 30*n)");
  vdp->add_option("--out", out, "output file")->required();

  double alpha = 0.85;
  int period = 6;
  std::vector<double> ag{0.611, -0.104}, sg{0.413, 0.150};
  CLI::App* lf = app.add_subcommand(
      "langford", "periodic orbit seeds for the Langford return map");
  lf->add_option("--alpha", alpha, "bifurcation parameter");
  lf->add_option("--period", period, "orbit period (section returns)");
  lf->add_option("--guess-attractor", ag, "starting point y z")
      ->expected(2);
  lf->add_option("--guess-saddle", sg, "starting point y z")->expected(2);

  CLI11_PARSE(app, argc, argv);

  if (vdp->parsed()) {
    if (samples <= 0) samples = 30 * n;
    return run_vdp(v, eps, n, transient, samples, out);
  }
  return run_langford(alpha, period, {ag[0], ag[1]}, {sg[0], sg[1]});
}
