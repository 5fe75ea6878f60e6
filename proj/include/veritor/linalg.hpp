#pragma once

// Dense interval vectors/matrices (row major) plus the small amount of
// double-precision linear algebra the set propagation needs: midpoint LU
// inverses for preconditioning and Gram-Schmidt QR for frame maintenance.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "veritor/interval.hpp"

namespace veritor {

struct SingularIntervalMatrix : Error {
  using Error::Error;
};

using IVector = std::vector<Interval>;

struct IMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Interval> a;

  IMatrix() = default;
  IMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  Interval& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Interval& operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  static IMatrix identity(std::size_t n) {
    IMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Interval(1.0);
    return m;
  }
};

inline IVector operator+(const IVector& x, const IVector& y) {
  IVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

inline IVector operator-(const IVector& x, const IVector& y) {
  IVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

inline IVector operator*(const Interval& s, const IVector& x) {
  IVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = s * x[i];
  return r;
}

inline IMatrix operator+(const IMatrix& A, const IMatrix& B) {
  IMatrix R(A.rows, A.cols);
  for (std::size_t i = 0; i < A.a.size(); ++i) R.a[i] = A.a[i] + B.a[i];
  return R;
}

inline IMatrix operator*(const IMatrix& A, const IMatrix& B) {
  IMatrix R(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      const Interval& aik = A(i, k);
      if (aik.lo == 0.0 && aik.hi == 0.0) continue;
      for (std::size_t j = 0; j < B.cols; ++j) R(i, j) += aik * B(k, j);
    }
  return R;
}

inline IVector operator*(const IMatrix& A, const IVector& x) {
  IVector r(A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) r[i] += A(i, j) * x[j];
  return r;
}

inline IMatrix transpose(const IMatrix& A) {
  IMatrix R(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) R(j, i) = A(i, j);
  return R;
}

inline Interval det2(const IMatrix& A) {
  return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
}

inline IMatrix inverse2(const IMatrix& A) {
  Interval d = det2(A);
  if (d.contains(0.0))
    throw SingularIntervalMatrix("2x2 determinant encloses zero: " +
                                 to_string(d));
  IMatrix R(2, 2);
  R(0, 0) = A(1, 1) / d;
  R(0, 1) = -A(0, 1) / d;
  R(1, 0) = -A(1, 0) / d;
  R(1, 1) = A(0, 0) / d;
  return R;
}

// sqrt of the max absolute row sum of A^T A; dominates the spectral norm of
// every point matrix inside A.
inline double op_norm_bound(const IMatrix& A) {
  IMatrix G = transpose(A) * A;
  double worst = 0.0;
  for (std::size_t i = 0; i < G.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < G.cols; ++j) s = rd::add_up(s, G(i, j).mag());
    worst = std::max(worst, s);
  }
  return rd::sqrt_up(worst);
}

// Positive definiteness of (the symmetric members of) a 2x2 enclosure:
// positive trace and positive determinant force both eigenvalues positive.
inline bool pd_check(const IMatrix& C) {
  Interval tr = C(0, 0) + C(1, 1);
  Interval d = det2(C);
  return tr.lo > 0.0 && d.lo > 0.0;
}

// Gaussian elimination with mignitude pivoting. Encloses the solution of
// every point system contained in (A, b).
inline IVector gauss_solve(IMatrix A, IVector b) {
  const std::size_t n = A.rows;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = A(k, k).mig();
    for (std::size_t r = k + 1; r < n; ++r) {
      double m = A(r, k).mig();
      if (m > best) {
        best = m;
        piv = r;
      }
    }
    if (best == 0.0)
      throw SingularIntervalMatrix(
          "pivot interval encloses zero in column " + std::to_string(k));
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      Interval f = A(i, k) / A(k, k);
      A(i, k) = Interval(0.0);
      for (std::size_t j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  IVector x(n);
  for (std::size_t i = n; i-- > 0;) {
    Interval s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

inline IMatrix gauss_inverse(const IMatrix& A) {
  const std::size_t n = A.rows;
  IMatrix R(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    IVector e(n);
    e[j] = Interval(1.0);
    IVector col = gauss_solve(A, e);
    for (std::size_t i = 0; i < n; ++i) R(i, j) = col[i];
  }
  return R;
}

// ---------------------------------------------------------------------------
// Plain double matrices for non-rigorous scaffolding (preconditioners, QR
// frames). Nothing proved here; rigorous steps re-verify with intervals.

struct DMat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  DMat() = default;
  DMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  static DMat identity(std::size_t n) {
    DMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline DMat mid(const IMatrix& A) {
  DMat m(A.rows, A.cols);
  for (std::size_t i = 0; i < A.a.size(); ++i) m.a[i] = A.a[i].mid();
  return m;
}

inline IMatrix to_interval(const DMat& m) {
  IMatrix A(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) A.a[i] = Interval(m.a[i]);
  return A;
}

inline DMat dmul(const DMat& A, const DMat& B) {
  DMat R(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k)
      for (std::size_t j = 0; j < B.cols; ++j)
        R(i, j) += A(i, k) * B(k, j);
  return R;
}

inline DMat dlu_inverse(DMat A) {
  const std::size_t n = A.rows;
  DMat inv = DMat::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::fabs(A(r, k)) > std::fabs(A(piv, k))) piv = r;
    if (A(piv, k) == 0.0)
      throw SingularIntervalMatrix("midpoint matrix is singular");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(A(k, j), A(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    double p = A(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      A(k, j) /= p;
      inv(k, j) /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      double f = A(i, k);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        A(i, j) -= f * A(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

// Modified Gram-Schmidt on columns; degenerate columns are replaced so the
// result is always a full orthonormal frame.
inline DMat dqr_q(const DMat& M) {
  const std::size_t n = M.rows;
  DMat Q = M;
  for (std::size_t j = 0; j < Q.cols; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += Q(i, k) * Q(i, j);
      for (std::size_t i = 0; i < n; ++i) Q(i, j) -= dot * Q(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += Q(i, j) * Q(i, j);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-150) {
      for (std::size_t c = 0; c < n; ++c) {  // substitute a basis vector
        for (std::size_t i = 0; i < n; ++i) Q(i, j) = (i == c) ? 1.0 : 0.0;
        for (std::size_t k = 0; k < j; ++k) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += Q(i, k) * Q(i, j);
          for (std::size_t i = 0; i < n; ++i) Q(i, j) -= dot * Q(i, k);
        }
        nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += Q(i, j) * Q(i, j);
        nrm = std::sqrt(nrm);
        if (nrm > 0.5) break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) Q(i, j) /= nrm;
  }
  return Q;
}

// Preconditioned solve: multiply through by the midpoint inverse, then run
// interval Gauss on the near-identity system.
inline IVector solve_preconditioned(const IMatrix& A, const IVector& b) {
  IMatrix C = to_interval(dlu_inverse(mid(A)));
  return gauss_solve(C * A, C * b);
}

inline bool contains(const IVector& outer, const IVector& inner) {
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (!outer[i].contains(inner[i])) return false;
  return true;
}

inline bool contains(const IMatrix& outer, const IMatrix& inner) {
  for (std::size_t i = 0; i < outer.a.size(); ++i)
    if (!outer.a[i].contains(inner.a[i])) return false;
  return true;
}

inline IVector hull(const IVector& x, const IVector& y) {
  IVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = hull(x[i], y[i]);
  return r;
}

inline IVector inflate(const IVector& x, double abs_pad) {
  IVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = inflate(x[i], abs_pad);
  return r;
}

inline IMatrix operator*(const Interval& s, const IMatrix& A) {
  IMatrix R(A.rows, A.cols);
  for (std::size_t i = 0; i < A.a.size(); ++i) R.a[i] = s * A.a[i];
  return R;
}

inline std::vector<double> mid_vec(const IVector& v) {
  std::vector<double> m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m[i] = v[i].mid();
  return m;
}

inline double sup_width(const IVector& v) {
  double w = 0.0;
  for (const auto& x : v) w = std::max(w, x.width());
  return w;
}

inline double norm2_bound(const IVector& v) {
  double s = 0.0;
  for (const auto& x : v) {
    double m = x.mag();
    s = rd::add_up(s, rd::mul_up(m, m));
  }
  return rd::sqrt_up(s);
}

}  // namespace veritor
