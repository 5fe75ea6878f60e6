#pragma once

// Hash-consed expression DAG for polynomial right-hand sides. Nodes are
// shared, derivatives are built symbolically and memoized, and constants are
// folded only when the double operation is exact, so the function the graph
// denotes never drifts from the function the certificate talks about.
// Constants carry interval values: coefficients like 1/3 that are not
// representable in binary64 stay rigorous enclosures instead of silently
// perturbing the vector field.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "veritor/interval.hpp"

namespace veritor {

enum class ExprOp : std::uint8_t { Const, Var, Add, Sub, Mul, Neg };

struct ExprNode {
  ExprOp op = ExprOp::Const;
  double clo = 0.0;
  double chi = 0.0;
  int var = -1;
  int a = -1;
  int b = -1;
};

namespace detail {

template <class T>
struct ConstMaker;

template <>
struct ConstMaker<Interval> {
  static Interval make(double lo, double hi) {
    return Interval::unchecked(lo, hi);
  }
};

template <>
struct ConstMaker<double> {
  static double make(double lo, double hi) { return 0.5 * (lo + hi); }
};

}  // namespace detail

class ExprGraph {
 public:
  int constant(double v) { return constant(Interval(v)); }

  int constant(const Interval& v) {
    Key k{ExprOp::Const, -1, -1, bits(v.lo), bits(v.hi), -1};
    return intern(k, ExprNode{ExprOp::Const, v.lo, v.hi, -1, -1, -1});
  }

  int var(int idx) {
    Key k{ExprOp::Var, -1, -1, 0, 0, idx};
    return intern(k, ExprNode{ExprOp::Var, 0.0, 0.0, idx, -1, -1});
  }

  int add(int a, int b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    if (is_thin_const(a) && is_thin_const(b)) {
      double va = nodes_[a].clo, vb = nodes_[b].clo;
      if (rd::add_up(va, vb) == rd::add_down(va, vb)) return constant(va + vb);
    }
    if (a > b) std::swap(a, b);
    Key k{ExprOp::Add, a, b, 0, 0, -1};
    return intern(k, ExprNode{ExprOp::Add, 0.0, 0.0, -1, a, b});
  }

  int sub(int a, int b) {
    if (a == b) return constant(0.0);
    if (is_zero(b)) return a;
    if (is_zero(a)) return neg(b);
    if (is_thin_const(a) && is_thin_const(b)) {
      double va = nodes_[a].clo, vb = nodes_[b].clo;
      if (rd::sub_up(va, vb) == rd::sub_down(va, vb)) return constant(va - vb);
    }
    Key k{ExprOp::Sub, a, b, 0, 0, -1};
    return intern(k, ExprNode{ExprOp::Sub, 0.0, 0.0, -1, a, b});
  }

  int mul(int a, int b) {
    if (is_zero(a) || is_zero(b)) return constant(0.0);
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    if (is_thin_const(a) && is_thin_const(b)) {
      double va = nodes_[a].clo, vb = nodes_[b].clo;
      if (rd::mul_up(va, vb) == rd::mul_down(va, vb)) return constant(va * vb);
    }
    if (a > b) std::swap(a, b);
    Key k{ExprOp::Mul, a, b, 0, 0, -1};
    return intern(k, ExprNode{ExprOp::Mul, 0.0, 0.0, -1, a, b});
  }

  int neg(int a) {
    if (is_const(a))
      return constant(Interval::unchecked(-nodes_[a].chi, -nodes_[a].clo));
    if (nodes_[a].op == ExprOp::Neg) return nodes_[a].a;
    Key k{ExprOp::Neg, a, -1, 0, 0, -1};
    return intern(k, ExprNode{ExprOp::Neg, 0.0, 0.0, -1, a, -1});
  }

  int scale(int a, double s) { return mul(constant(s), a); }

  // d node / d var, built once and memoized
  int derivative(int node, int v) {
    auto it = deriv_memo_.find({node, v});
    if (it != deriv_memo_.end()) return it->second;
    const ExprNode n = nodes_[node];
    int d = -1;
    switch (n.op) {
      case ExprOp::Const:
        d = constant(0.0);
        break;
      case ExprOp::Var:
        d = constant(n.var == v ? 1.0 : 0.0);
        break;
      case ExprOp::Add:
        d = add(derivative(n.a, v), derivative(n.b, v));
        break;
      case ExprOp::Sub:
        d = sub(derivative(n.a, v), derivative(n.b, v));
        break;
      case ExprOp::Mul:
        d = add(mul(derivative(n.a, v), n.b), mul(n.a, derivative(n.b, v)));
        break;
      case ExprOp::Neg:
        d = neg(derivative(n.a, v));
        break;
    }
    deriv_memo_[{node, v}] = d;
    return d;
  }

  const std::vector<ExprNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  bool is_const(int id) const { return nodes_[id].op == ExprOp::Const; }
  bool is_thin_const(int id) const {
    return is_const(id) && nodes_[id].clo == nodes_[id].chi;
  }
  bool is_zero(int id) const {
    return is_thin_const(id) && nodes_[id].clo == 0.0;
  }
  bool is_one(int id) const {
    return is_thin_const(id) && nodes_[id].clo == 1.0;
  }

 private:
  using Key = std::tuple<ExprOp, int, int, std::uint64_t, std::uint64_t, int>;

  static std::uint64_t bits(double v) {
    if (v == 0.0) v = 0.0;  // merge -0 with +0
    std::uint64_t u;
    static_assert(sizeof u == sizeof v);
    std::memcpy(&u, &v, sizeof u);
    return u;
  }

  int intern(const Key& k, const ExprNode& n) {
    auto it = cons_.find(k);
    if (it != cons_.end()) return it->second;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    cons_.emplace(k, id);
    return id;
  }

  std::vector<ExprNode> nodes_;
  std::map<Key, int> cons_;
  std::map<std::pair<int, int>, int> deriv_memo_;
};

// Evaluate every node at the given variable assignment; T is Interval for
// rigorous runs and double for scaffolding.
template <class T>
void eval_graph(const ExprGraph& g, const std::vector<T>& vars,
                std::vector<T>& out) {
  const auto& ns = g.nodes();
  out.resize(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const ExprNode& n = ns[i];
    switch (n.op) {
      case ExprOp::Const:
        out[i] = detail::ConstMaker<T>::make(n.clo, n.chi);
        break;
      case ExprOp::Var:
        out[i] = vars[static_cast<std::size_t>(n.var)];
        break;
      case ExprOp::Add:
        out[i] = out[n.a] + out[n.b];
        break;
      case ExprOp::Sub:
        out[i] = out[n.a] - out[n.b];
        break;
      case ExprOp::Mul:
        out[i] = out[n.a] * out[n.b];
        break;
      case ExprOp::Neg:
        out[i] = -out[n.a];
        break;
    }
  }
}

}  // namespace veritor
