#pragma once

// Vector field definitions as expression graphs, with interval evaluators for
// the right-hand side and its jacobian, plus the two concrete systems the
// bundled proofs run on.

#include <string>
#include <utility>
#include <vector>

#include "veritor/expr.hpp"
#include "veritor/interval.hpp"
#include "veritor/linalg.hpp"

namespace veritor {

struct VectorField {
  std::string name;
  int dim = 0;
  ExprGraph graph;
  std::vector<int> rhs;  // node per state coordinate
  std::vector<int> jac;  // row-major dF_i/dx_j nodes
  std::vector<std::pair<std::string, double>> params;

  void finalize() {
    jac.assign(static_cast<std::size_t>(dim) * dim, -1);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        jac[static_cast<std::size_t>(i) * dim + j] =
            graph.derivative(rhs[static_cast<std::size_t>(i)], j);
  }

  IVector eval(const IVector& x) const {
    std::vector<Interval> vals;
    eval_graph(graph, x, vals);
    IVector out(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) out[i] = vals[rhs[i]];
    return out;
  }

  IMatrix jacobian(const IVector& x) const {
    std::vector<Interval> vals;
    eval_graph(graph, x, vals);
    IMatrix J(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        J(i, j) = vals[jac[static_cast<std::size_t>(i) * dim + j]];
    return J;
  }

  std::vector<double> eval_point(const std::vector<double>& x) const {
    std::vector<double> vals;
    eval_graph(graph, x, vals);
    std::vector<double> out(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) out[i] = vals[rhs[i]];
    return out;
  }
};

// Forced Van der Pol in the autonomous extension: states (x, y, c, s) with
// (c, s) carrying (cos t, sin t), so the time-2pi map of the first two
// coordinates is the stroboscopic map of the forced oscillator.
//   x' = y
//   y' = v(1 - x^2)y - x + eps*c
//   c' = -s
//   s' = c
inline VectorField vdp_extended(double v, double eps) {
  VectorField f;
  f.name = "vdp_forced";
  f.dim = 4;
  f.params = {{"v", v}, {"eps", eps}};
  ExprGraph& g = f.graph;
  int x = g.var(0), y = g.var(1), c = g.var(2), s = g.var(3);
  int x2 = g.mul(x, x);
  int damp = g.mul(g.constant(v), g.sub(g.constant(1.0), x2));
  f.rhs = {
      y,
      g.add(g.sub(g.mul(damp, y), x), g.mul(g.constant(eps), c)),
      g.neg(s),
      c,
  };
  f.finalize();
  return f;
}

// Langford's three dimensional system:
//   x' = (z - beta)x - delta*y
//   y' = delta*x + (z - beta)y
//   z' = gamma + alpha*z - z^3/3 - (x^2 + y^2)(1 + eps*z) + zeta*z*x^3
// The 1/3 coefficient is kept as a rigorous enclosure.
inline VectorField langford(double alpha, double beta = 0.7,
                            double gamma = 0.6, double delta = 3.5,
                            double eps = 0.25, double zeta = 0.1) {
  VectorField f;
  f.name = "langford";
  f.dim = 3;
  f.params = {{"alpha", alpha}, {"beta", beta},   {"gamma", gamma},
              {"delta", delta}, {"eps", eps},     {"zeta", zeta}};
  ExprGraph& g = f.graph;
  int x = g.var(0), y = g.var(1), z = g.var(2);
  int zb = g.sub(z, g.constant(beta));
  int third = g.constant(
      Interval::unchecked(rd::div_down(1.0, 3.0), rd::div_up(1.0, 3.0)));
  int x2 = g.mul(x, x);
  int y2 = g.mul(y, y);
  int z3 = g.mul(g.mul(z, z), z);
  int radial = g.mul(g.add(x2, y2),
                     g.add(g.constant(1.0), g.mul(g.constant(eps), z)));
  int cubic = g.mul(g.constant(zeta), g.mul(z, g.mul(x2, x)));
  f.rhs = {
      g.sub(g.mul(zb, x), g.mul(g.constant(delta), y)),
      g.add(g.mul(g.constant(delta), x), g.mul(zb, y)),
      g.add(g.sub(g.sub(g.add(g.constant(gamma), g.mul(g.constant(alpha), z)),
                        g.mul(third, z3)),
                  radial),
            cubic),
  };
  f.finalize();
  return f;
}

}  // namespace veritor
