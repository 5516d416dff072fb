#pragma once

// Independent reference computations. Nothing here calls the closed forms or
// the tessellation code it is used to check.

#include "bgc/bezier.hpp"

#include <cmath>
#include <functional>
#include <utility>

namespace bgc::test {

inline std::pair<Vec3, Vec3> finite_difference_partials(const Patch& patch, double u, double v, double h = 1e-5) {
  // One-sided near the domain boundary.
  auto eval = [&](double a, double b) { return patch_point(patch, a, b); };
  const bool tri = kind_of(patch) == PatchKind::triangle;
  auto inside = [&](double a, double b) { return in_domain(kind_of(patch), a, b) && (!tri || a + b <= 1.0); };
  Vec3 du, dv;
  if (inside(u - h, v) && inside(u + h, v)) du = (eval(u + h, v) - eval(u - h, v)) / (2 * h);
  else if (inside(u + 2 * h, v)) du = (-3 * eval(u, v) + 4 * eval(u + h, v) - eval(u + 2 * h, v)) / (2 * h);
  else du = (3 * eval(u, v) - 4 * eval(u - h, v) + eval(u - 2 * h, v)) / (2 * h);
  if (inside(u, v - h) && inside(u, v + h)) dv = (eval(u, v + h) - eval(u, v - h)) / (2 * h);
  else if (inside(u, v + 2 * h)) dv = (-3 * eval(u, v) + 4 * eval(u, v + h) - eval(u, v + 2 * h)) / (2 * h);
  else dv = (3 * eval(u, v) - 4 * eval(u, v - h) + eval(u, v - 2 * h)) / (2 * h);
  return {du, dv};
}

// Adaptive Simpson rule on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 40) {
  auto simpson = [&](double fa, double fm, double fb, double lo, double hi) { return (hi - lo) / 6.0 * (fa + 4 * fm + fb); };
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double fa, double fm, double fb, double whole, double eps, int d) -> double {
    const double m = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, lo, m);
    const double right = simpson(fm, frm, fb, m, hi);
    if (d <= 0 || std::abs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
    return rec(lo, m, fa, flm, fm, left, eps / 2, d - 1) + rec(m, hi, fm, frm, fb, right, eps / 2, d - 1);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth);
}

// Integral of 1 / (4 pi |x - eta|) over the planar triangle (p1, p2, p3),
// by nested adaptive quadrature over x = p1 + s (p2 - p1) + t (p3 - p1).
inline double quadrature_green(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& eta, double tol = 1e-12) {
  const Vec3 e1 = p2 - p1, e2 = p3 - p1;
  const double jacobian = e1.cross(e2).norm();
  auto inner = [&](double s) {
    return adaptive_simpson([&](double t) { return 1.0 / (4.0 * 3.14159265358979323846 * (p1 + s * e1 + t * e2 - eta).norm()); },
                            0.0, 1.0 - s, tol);
  };
  return jacobian * adaptive_simpson(inner, 0.0, 1.0, tol);
}

// Midpoint rule with r x r cells over the unit square.
inline double midpoint_square(const std::function<double(double, double)>& f, int r) {
  double sum = 0.0;
  const double h = 1.0 / r;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) sum += f((i + 0.5) * h, (j + 0.5) * h);
  return sum * h * h;
}

}  // namespace bgc::test
