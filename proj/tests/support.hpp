#pragma once

// Shared helpers for the test suites: a high-accuracy floating-point ODE
// reference (non-rigorous, used as an oracle against the validated
// integrator) and small random sampling utilities.

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "veritor/interval.hpp"
#include "veritor/linalg.hpp"

namespace vt = veritor;

namespace testutil {

using DState = std::vector<double>;

// Integrates dx/dt = rhs(x) with dopri5 at tight tolerance.
inline DState oracle_advance(
    const std::function<void(const DState&, DState&, double)>& rhs,
    DState x, double T) {
  namespace ode = boost::numeric::odeint;
  auto stepper =
      ode::make_controlled<ode::runge_kutta_fehlberg78<DState>>(1e-14, 1e-14);
  double t0 = 0.0;
  if (T < 0) {
    auto back = [&rhs](const DState& s, DState& ds, double t) {
      rhs(s, ds, -t);
      for (double& v : ds) v = -v;
    };
    ode::integrate_adaptive(stepper, back, x, 0.0, -T, 1e-4);
    return x;
  }
  ode::integrate_adaptive(stepper, rhs, x, t0, T, 1e-4);
  return x;
}

inline double rand_in(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

// Endpoint and fundamental solution of the variational equation, integrated
// together at tight tolerance. jac fills a row-major n*n array.
inline std::pair<DState, DState> oracle_flow_var(
    const std::function<void(const DState&, DState&, double)>& rhs,
    const std::function<void(const DState&, DState&)>& jac, DState x,
    double T) {
  namespace ode = boost::numeric::odeint;
  const std::size_t n = x.size();
  DState aug(n + n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    aug[i] = x[i];
    aug[n + i * n + i] = 1.0;
  }
  auto augmented = [&rhs, &jac, n](const DState& s, DState& ds, double t) {
    DState xs(s.begin(), s.begin() + n), dx(n), J(n * n);
    rhs(xs, dx, t);
    jac(xs, J);
    ds.resize(n + n * n);
    for (std::size_t i = 0; i < n; ++i) ds[i] = dx[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          acc += J[i * n + k] * s[n + k * n + j];
        ds[n + i * n + j] = acc;
      }
  };
  auto stepper =
      ode::make_controlled<ode::runge_kutta_fehlberg78<DState>>(1e-14, 1e-14);
  ode::integrate_adaptive(stepper, augmented, aug, 0.0, T, 1e-4);
  DState endpoint(aug.begin(), aug.begin() + n);
  DState V(aug.begin() + n, aug.end());
  return {endpoint, V};
}

// A random point of a box, and a random sub-box around it.
inline std::vector<double> sample_point(std::mt19937& rng,
                                        const vt::IVector& box) {
  std::vector<double> p(box.size());
  for (std::size_t i = 0; i < box.size(); ++i)
    p[i] = rand_in(rng, box[i].lo, box[i].hi);
  return p;
}

inline vt::IVector thin_vec(const std::vector<double>& p) {
  vt::IVector v(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) v[i] = vt::Interval(p[i]);
  return v;
}

}  // namespace testutil
