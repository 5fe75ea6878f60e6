#pragma once

// Mean-value form enclosures and the interval Newton operator. These are the
// two generic certification lemmas everything downstream leans on.

#include <utility>

#include "veritor/interval.hpp"
#include "veritor/linalg.hpp"

namespace veritor {

struct DimensionMismatch : Error {
  using Error::Error;
};
struct SingularJacobianEnclosure : Error {
  using Error::Error;
};

// f_p2 + J·(p1 − p2) where J encloses the jacobian over a box containing both
// points; the result encloses f(p1).
inline IVector mean_value_enclosure(const IMatrix& f_jacobian,
                                    const IVector& p1, const IVector& p2,
                                    const IVector& f_p2) {
  if (p1.size() != p2.size() || f_jacobian.cols != p1.size() ||
      f_jacobian.rows != f_p2.size())
    throw DimensionMismatch("mean value enclosure: incompatible shapes");
  return f_p2 + f_jacobian * (p1 - p2);
}

struct NewtonResult {
  IVector root_box;
  IVector newton_image;
  bool unique = false;
  bool disjoint = false;  // Newton image missed the box: no zero inside
};

// N(x0, box) = x0 − [Df(box)]^{-1} f(x0). If N lands in the interior of box
// there is exactly one zero of f in box and it lies in N ∩ box.
template <class F, class J>
NewtonResult interval_newton(F&& f, J&& jac, const IVector& box,
                             const IVector& x0) {
  const std::size_t n = box.size();
  if (x0.size() != n)
    throw DimensionMismatch("interval newton: x0 and box dimensions differ");
  IVector fx0 = f(x0);
  IMatrix DfB = jac(box);
  IVector delta;
  try {
    if (n == 1) {
      delta.resize(1);
      delta[0] = fx0[0] / DfB(0, 0);
    } else {
      delta = solve_preconditioned(DfB, fx0);
    }
  } catch (const SingularIntervalMatrix& e) {
    throw SingularJacobianEnclosure(e.what());
  } catch (const DivisionByZeroInterval& e) {
    throw SingularJacobianEnclosure(e.what());
  }

  NewtonResult res;
  res.newton_image.resize(n);
  res.root_box.resize(n);
  res.unique = true;
  for (std::size_t i = 0; i < n; ++i) {
    res.newton_image[i] = x0[i] - delta[i];
    if (!box[i].contains_in_interior(res.newton_image[i])) res.unique = false;
    Interval cap;
    if (intersect(res.newton_image[i], box[i], cap)) {
      res.root_box[i] = cap;
    } else {
      res.disjoint = true;
      res.unique = false;
      res.root_box[i] = box[i];
    }
  }
  return res;
}

}  // namespace veritor
