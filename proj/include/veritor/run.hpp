#pragma once

// Config-driven pipelines behind the command line: circle verification for
// the forced Van der Pol stroboscopic map, connection verification for the
// Langford return map, and rigorous periodic-orbit certification feeding it.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "veritor/atlas.hpp"
#include "veritor/certificate.hpp"
#include "veritor/circle.hpp"
#include "veritor/config.hpp"
#include "veritor/connection.hpp"
#include "veritor/newton.hpp"
#include "veritor/planar_map.hpp"
#include "veritor/run_schema.hpp"

namespace veritor {

struct RunResult {
  int exit_code = 1;
  std::string summary;
};

inline StepControl step_control_from(const Config& cfg) {
  StepControl ctrl;
  ctrl.order = cfg.get_int("integrator.order", ctrl.order);
  ctrl.h_min = cfg.get_double("integrator.h_min", ctrl.h_min);
  ctrl.h_max = cfg.get_double("integrator.h_max", ctrl.h_max);
  ctrl.tolerance = cfg.get_double("integrator.tolerance", ctrl.tolerance);
  ctrl.qr_requeeze_every =
      cfg.get_int("integrator.qr_every", ctrl.qr_requeeze_every);
  if (ctrl.order < 2 || ctrl.order > 40)
    throw ConfigError("integrator.order out of range [2, 40]");
  return ctrl;
}

inline LangfordParams langford_from(const Config& cfg) {
  LangfordParams lp;
  lp.alpha = cfg.get_double("langford.alpha");
  lp.beta = cfg.get_double("langford.beta", lp.beta);
  lp.gamma = cfg.get_double("langford.gamma", lp.gamma);
  lp.delta = cfg.get_double("langford.delta", lp.delta);
  lp.eps = cfg.get_double("langford.eps", lp.eps);
  lp.zeta = cfg.get_double("langford.zeta", lp.zeta);
  return lp;
}

inline int resolve_threads(const Config& cfg, int flag_threads) {
  int t = flag_threads > 0 ? flag_threads : cfg.get_int("threads", 0);
  if (t <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    t = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return t;
}

inline std::string default_out_path(const Config& cfg) {
  std::string p = cfg.path().empty() ? "run" : cfg.path();
  auto slash = p.find_last_of('/');
  if (slash != std::string::npos) p = p.substr(slash + 1);
  auto dot = p.find_last_of('.');
  if (dot != std::string::npos && dot > 0) p = p.substr(0, dot);
  return p + ".cert.txt";
}

inline DMat dmat2_from(const std::vector<double>& v) {
  DMat m(2, 2);
  m(0, 0) = v[0];
  m(0, 1) = v[1];
  m(1, 0) = v[2];
  m(1, 1) = v[3];
  return m;
}

// ---------------------------------------------------------------------------
// verify-circle

inline RunResult run_verify_circle(const Config& cfg, int flag_threads,
                                   std::string out_path) {
  cfg.check_schema(circle_allowed_keys(), circle_required_keys());
  if (cfg.get_string("task") != "verify-circle")
    throw ConfigError("config task is not verify-circle");
  if (cfg.get_string("system") != "vdp_forced")
    throw ConfigError("verify-circle supports system = vdp_forced");

  double v = cfg.get_double("vdp.v");
  double eps = cfg.get_double("vdp.eps");
  double r = cfg.get_double("circle.r");
  double a = cfg.get_double("circle.a");
  int m = cfg.get_int("circle.m", 6);
  if (!(r > 0.0)) throw ConfigError("circle.r must be positive");
  if (!(a > 0.0)) throw ConfigError("circle.a must be positive");
  if (m < 1) throw ConfigError("circle.m must be at least 1");
  if (std::fabs(v) > 2.0 || std::fabs(eps) > 1.0)
    throw ConfigError("vdp parameters outside |v| <= 2, |eps| <= 1");

  std::string seed_file = cfg.get_string("circle.seed_file");
  std::vector<std::array<double, 2>> points = read_seed_points(seed_file);
  if (points.size() < 4)
    throw ConfigError("seed file " + seed_file + " has fewer than 4 points");

  StepControl ctrl = step_control_from(cfg);
  int threads = resolve_threads(cfg, flag_threads);
  if (out_path.empty())
    out_path = cfg.get_string("out", default_out_path(cfg));

  auto t0 = std::chrono::steady_clock::now();
  TimeShiftMap map(v, eps, ctrl);
  Atlas atlas = build_atlas(points, r, a, m);

  CircleOptions opt;
  opt.k_cap = cfg.get_int("circle.k_cap", 16);
  opt.threads = threads;
  opt.from_flow_section = true;
  CircleCertificate cert = certify_circle(atlas, map, opt);
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write certificate to " + out_path);
  write_circle_certificate(out, cert, cfg, wall);

  RunResult res;
  if (cert.has_conclusion) {
    res.exit_code = 0;
    res.summary = "conclusion: " + cert.conclusion +
                  "  lambda sup = " + dec_double(cert.lambda.hi) +
                  "  (certificate: " + out_path + ")";
  } else {
    res.exit_code = 2;
    res.summary = "verification failed: " + cert.failure +
                  "  (certificate: " + out_path + ")";
  }
  return res;
}

// ---------------------------------------------------------------------------
// periodic orbits via multiple shooting + interval Newton

struct OrbitCertification {
  IVector enclosure;            // stacked, 2 * period
  IVector newton_image;         // stacked N(x0, B)
  std::vector<IVector> points;  // per orbit point
  bool unique = false;
};

inline OrbitCertification certify_period_orbit(const ReturnMap& single_return,
                                               std::vector<double> seed,
                                               double radius,
                                               int polish_steps) {
  const int period = static_cast<int>(seed.size()) / 2;
  if (period < 1 || static_cast<int>(seed.size()) != 2 * period)
    throw DomainViolation("orbit seed needs 2*period coordinates");
  ShootingProblem prob{period, &single_return};

  for (int it = 0; it < polish_steps; ++it) {
    IVector thin(2 * period);
    for (int i = 0; i < 2 * period; ++i) thin[i] = Interval(seed[i]);
    auto [G, DG] = shooting_residual(prob, thin);
    DMat J = mid(DG);
    DMat Jinv = dlu_inverse(J);
    std::vector<double> g(2 * period);
    for (int i = 0; i < 2 * period; ++i) g[i] = G[i].mid();
    for (int i = 0; i < 2 * period; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 2 * period; ++j) acc += Jinv(i, j) * g[j];
      seed[i] -= acc;
    }
  }

  IVector box(2 * period), x0(2 * period);
  for (int i = 0; i < 2 * period; ++i) {
    x0[i] = Interval(seed[i]);
    box[i] = Interval(rd::sub_down(seed[i], radius),
                      rd::add_up(seed[i], radius));
  }
  auto value = [&](const IVector& x) {
    return shooting_residual(prob, x).first;
  };
  auto jaco = [&](const IVector& b) {
    return shooting_residual(prob, b).second;
  };
  NewtonResult nr = interval_newton(value, jaco, box, x0);
  for (int pass = 0; pass < 2 && nr.unique; ++pass) {
    IVector mid(2 * period);
    for (int i = 0; i < 2 * period; ++i)
      mid[i] = Interval(nr.root_box[i].mid());
    NewtonResult again = interval_newton(value, jaco, nr.root_box, mid);
    if (!again.unique) break;
    double before = sup_width(nr.root_box);
    nr = again;
    if (sup_width(nr.root_box) > 0.5 * before) break;
  }

  OrbitCertification out;
  out.enclosure = nr.root_box;
  out.newton_image = nr.newton_image;
  out.unique = nr.unique;
  for (int i = 0; i < period; ++i)
    out.points.push_back({nr.root_box[2 * i], nr.root_box[2 * i + 1]});
  return out;
}

inline RunResult run_find_periodic(const Config& cfg, int flag_threads,
                                   std::string out_path) {
  cfg.check_schema(periodic_allowed_keys(), periodic_required_keys());
  if (cfg.get_string("task") != "find-periodic")
    throw ConfigError("config task is not find-periodic");
  if (cfg.get_string("system") != "langford")
    throw ConfigError("find-periodic supports system = langford");
  (void)flag_threads;

  LangfordParams lp = langford_from(cfg);
  StepControl ctrl = step_control_from(cfg);
  int period = cfg.get_int("orbit.period", 6);
  double radius = cfg.get_double("newton.radius", 1e-8);
  int polish = cfg.get_int("newton.polish", 2);
  if (!(radius > 0.0)) throw ConfigError("newton.radius must be positive");
  if (out_path.empty())
    out_path = cfg.get_string("out", default_out_path(cfg));

  bool have_attr = cfg.has("orbit.attractor");
  bool have_sad = cfg.has("orbit.saddle");
  if (!have_attr && !have_sad)
    throw ConfigError("need orbit.attractor and/or orbit.saddle seeds");

  auto t0 = std::chrono::steady_clock::now();
  ReturnMap P1(lp, 1, ctrl);

  std::vector<std::vector<Interval>> orbits;
  std::vector<std::string> names;
  std::vector<bool> uniq;
  std::string failure;
  for (auto [key, name] :
       {std::pair<const char*, const char*>{"orbit.attractor", "attractor"},
        {"orbit.saddle", "saddle"}}) {
    if (!cfg.has(key)) continue;
    std::vector<double> seed = cfg.get_doubles(key, 2 * period);
    OrbitCertification oc =
        certify_period_orbit(P1, seed, radius, polish);
    orbits.push_back(oc.enclosure);
    names.emplace_back(name);
    uniq.push_back(oc.unique);
    if (!oc.unique) {
      std::string img;
      for (const Interval& c : oc.newton_image) img += cert_interval(c) + " ";
      failure += std::string(name) +
                 " orbit not certified unique; Newton image: " + img + "\n";
    }
  }
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write certificate to " + out_path);
  write_periodic_certificate(out, orbits, names, uniq, cfg, wall, failure);

  RunResult res;
  if (failure.empty()) {
    res.exit_code = 0;
    res.summary = "all orbit enclosures certified unique  (certificate: " +
                  out_path + ")";
  } else {
    res.exit_code = 2;
    res.summary = "orbit certification failed  (certificate: " + out_path +
                  ")";
  }
  return res;
}

// ---------------------------------------------------------------------------
// verify-connection

inline RunResult run_verify_connection(const Config& cfg, int flag_threads,
                                       std::string out_path) {
  cfg.check_schema(connection_allowed_keys(), connection_required_keys());
  if (cfg.get_string("task") != "verify-connection")
    throw ConfigError("config task is not verify-connection");
  if (cfg.get_string("system") != "langford")
    throw ConfigError("verify-connection supports system = langford");

  LangfordParams lp = langford_from(cfg);
  StepControl ctrl = step_control_from(cfg);
  int threads = resolve_threads(cfg, flag_threads);
  int period = cfg.get_int("orbit.period", 6);
  double radius = cfg.get_double("newton.radius", 1e-8);
  int polish = cfg.get_int("newton.polish", 2);

  std::vector<double> b1v = cfg.get_doubles("connection.B1", 4);
  std::vector<double> b2v = cfg.get_doubles("connection.B2", 4);
  IVector B1 = {Interval(b1v[0], b1v[1]), Interval(b1v[2], b1v[3])};
  IVector B2 = {Interval(b2v[0], b2v[1]), Interval(b2v[2], b2v[3])};
  double L = cfg.get_double("connection.L");
  double x_bar = cfg.get_double("connection.x_bar");
  std::vector<double> iv = cfg.get_doubles("connection.I", 2);
  Interval I(iv[0], iv[1]);
  if (!(L > 0.0)) throw ConfigError("connection.L must be positive");
  if (!I.contains(x_bar))
    throw ConfigError("connection.x_bar must lie inside connection.I");

  if (out_path.empty())
    out_path = cfg.get_string("out", default_out_path(cfg));

  auto t0 = std::chrono::steady_clock::now();
  auto wall_now = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };

  ReturnMap P1(lp, 1, ctrl);
  ReturnMap f(lp, period, ctrl);

  ConnectionProblem prob;
  prob.map = &f;
  prob.period = period;
  prob.A1 = dmat2_from(cfg.get_doubles("connection.A1", 4));
  prob.A2 = dmat2_from(cfg.get_doubles("connection.A2", 4));
  prob.x_bar = x_bar;
  prob.I = I;
  prob.iterates = cfg.get_int("connection.n", 25);
  prob.fragments = cfg.get_int("connection.fragments", 200);
  prob.fragment_cap = cfg.get_int("connection.fragment_cap", 1600);
  prob.claim1_only = cfg.get_bool("connection.claim1_only", false);
  prob.threads = threads;

  ConnectionCertificate cert;
  cert.map_description = f.description();
  cert.period = period;
  std::string failure;

  try {
    OrbitCertification attr_orbit = certify_period_orbit(
        P1, cfg.get_doubles("orbit.attractor", 2 * period), radius, polish);
    OrbitCertification sad_orbit = certify_period_orbit(
        P1, cfg.get_doubles("orbit.saddle", 2 * period), radius, polish);
    if (!attr_orbit.unique || !sad_orbit.unique)
      throw MissingPrerequisite(
          "period orbit enclosures not certified unique");
    prob.attractor_orbit = attr_orbit.points;
    prob.saddle_orbit = sad_orbit.points;
    prob.orbits_unique = true;

    IVector p1_box = attr_orbit.points[0];
    IVector p2_box = sad_orbit.points[0];
    prob.p1 = {p1_box[0].mid(), p1_box[1].mid()};
    prob.p2 = {p2_box[0].mid(), p2_box[1].mid()};

    LocalizedMap f1 = localize(f, prob.A1, p1_box);
    LocalizedMap f2 = localize(f, prob.A2, p2_box);

    prob.attractor = certify_attractor(
        f1, B1, cfg.get_double("connection.lambda", 0.0));

    SaddleData sd;
    sd.box = B2;
    sd.L = L;
    sd.m = cfg.get_double("connection.m", 0.0);
    IMatrix A2inv = inverse2(to_interval(prob.A2));
    sd.p_star = A2inv * IVector{p2_box[0] - Interval(prob.p2[0]),
                                p2_box[1] - Interval(prob.p2[1])};
    prob.saddle = certify_unstable_cone(f2, sd);

    cert = propagate_fundamental_domain(prob);
    if (!prob.claim1_only)
      cert = certify_resonant_torus(prob, period, cert);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    failure = e.what();
  }

  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write certificate to " + out_path);
  write_connection_certificate(out, cert, prob, cfg, wall_now(), failure);

  RunResult res;
  bool ok = failure.empty() &&
            (prob.claim1_only ? cert.heteroclinic_orbit
                              : cert.resonant_torus);
  if (ok) {
    res.exit_code = 0;
    res.summary =
        std::string("conclusion: ") +
        (prob.claim1_only ? "HeteroclinicOrbit" : "ResonantTorus") +
        "  (certificate: " + out_path + ")";
  } else {
    res.exit_code = 2;
    res.summary = "verification failed: " + failure + "  (certificate: " +
                  out_path + ")";
  }
  return res;
}

// ---------------------------------------------------------------------------

inline RunResult run_task(const Config& cfg, int flag_threads,
                          const std::string& out_path) {
  std::string task = cfg.get_string("task");
  if (task == "verify-circle")
    return run_verify_circle(cfg, flag_threads, out_path);
  if (task == "verify-connection")
    return run_verify_connection(cfg, flag_threads, out_path);
  if (task == "find-periodic")
    return run_find_periodic(cfg, flag_threads, out_path);
  throw ConfigError("unknown task: " + task);
}

}  // namespace veritor
