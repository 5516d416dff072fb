#include "bgc/coons.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bgc {
namespace {

// Piecewise-linear interpolant of `points` at s = position / (points.size() - 1),
// where `position` is measured in segments.
Vec3 polyline_at(const std::vector<Vec3>& points, double position) {
  const auto segments = static_cast<double>(points.size() - 1);
  position = std::clamp(position, 0.0, segments);
  const double base = std::min(std::floor(position), segments - 1.0);
  const auto idx = static_cast<std::size_t>(base);
  const double t = position - base;
  if (t == 0.0) return points[idx];
  if (t == 1.0) return points[idx + 1];
  return (1.0 - t) * points[idx] + t * points[idx + 1];
}

Vec3 blend(const BoundaryLoop& loop, double u, double v, double u_on_v_lines, double v_on_u_lines) {
  const Vec3 left = polyline_at(loop.u0, v_on_u_lines);
  const Vec3 right = polyline_at(loop.u1, v_on_u_lines);
  const Vec3 bottom = polyline_at(loop.v0, u_on_v_lines);
  const Vec3 top = polyline_at(loop.v1, u_on_v_lines);
  const Vec3 corners = (1.0 - u) * (1.0 - v) * loop.v0.front() + u * (1.0 - v) * loop.v0.back() +
                       (1.0 - u) * v * loop.v1.front() + u * v * loop.v1.back();
  return (1.0 - u) * left + u * right + (1.0 - v) * bottom + v * top - corners;
}

}  // namespace

void check_loop(const BoundaryLoop& loop) {
  for (const auto* line : {&loop.u0, &loop.u1, &loop.v0, &loop.v1}) {
    if (line->size() < 2) throw Error(ErrorCategory::validation, "boundary polyline needs at least 2 points");
    for (const Vec3& p : *line)
      if (!is_finite(p)) throw Error(ErrorCategory::validation, "non-finite boundary point");
  }
  if (loop.u0.size() != loop.u1.size() || loop.v0.size() != loop.v1.size())
    throw Error(ErrorCategory::validation, "opposite boundary polylines have different point counts");
  if (loop.u0.front() != loop.v0.front() || loop.u0.back() != loop.v1.front() ||
      loop.u1.front() != loop.v0.back() || loop.u1.back() != loop.v1.back())
    throw Error(ErrorCategory::validation, "boundary polylines do not share corner points");
}

Vec3 coons_point(const BoundaryLoop& loop, double u, double v) {
  check_loop(loop);
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw Error(ErrorCategory::domain, "Coons parameter outside the unit square");
  return blend(loop, u, v, u * static_cast<double>(loop.v0.size() - 1),
               v * static_cast<double>(loop.u0.size() - 1));
}

TensorPatch fill_interior(const BoundaryLoop& loop, int degree_u, int degree_v) {
  check_loop(loop);
  if (degree_u < 1 || degree_v < 1 || degree_u > kMaxDegree || degree_v > kMaxDegree)
    throw Error(ErrorCategory::domain, "patch degree outside [1, 16]");
  if (loop.v0.size() != static_cast<std::size_t>(degree_u) + 1 ||
      loop.u0.size() != static_cast<std::size_t>(degree_v) + 1) {
    std::ostringstream msg;
    msg << "boundary polylines have " << loop.v0.size() << " x " << loop.u0.size()
        << " points, degree (" << degree_u << ", " << degree_v << ") needs " << degree_u + 1 << " x "
        << degree_v + 1;
    throw Error(ErrorCategory::validation, msg.str());
  }
  const int m = degree_u;
  const int n = degree_v;
  std::vector<Vec3> points(static_cast<std::size_t>((m + 1) * (n + 1)));
  auto at = [&](int i, int j) -> Vec3& { return points[static_cast<std::size_t>(i * (n + 1) + j)]; };
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) {
      if (j == 0) at(i, j) = loop.v0[static_cast<std::size_t>(i)];
      else if (j == n) at(i, j) = loop.v1[static_cast<std::size_t>(i)];
      else if (i == 0) at(i, j) = loop.u0[static_cast<std::size_t>(j)];
      else if (i == m) at(i, j) = loop.u1[static_cast<std::size_t>(j)];
      else at(i, j) = blend(loop, static_cast<double>(i) / m, static_cast<double>(j) / n, i, j);
    }
  return TensorPatch(m, n, std::move(points));
}

}  // namespace bgc
