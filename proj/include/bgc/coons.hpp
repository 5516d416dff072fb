#pragma once

#include "bgc/cage.hpp"

#include <vector>

namespace bgc {

/// Four boundary control polylines, each ordered by increasing parameter:
/// s(0, v), s(1, v), s(u, 0), s(u, 1).
struct BoundaryLoop {
  std::vector<Vec3> u0;
  std::vector<Vec3> u1;
  std::vector<Vec3> v0;
  std::vector<Vec3> v1;
};

/// Throws Error(validation) unless adjacent polylines share corners exactly and
/// opposite polylines have equal counts.
void check_loop(const BoundaryLoop& loop);

/// Bilinearly blended Coons surface over the piecewise-linear boundary polylines.
Vec3 coons_point(const BoundaryLoop& loop, double u, double v);

/// Degree-(m, n) patch: boundary points copied, interior at Cs(i/m, j/n).
TensorPatch fill_interior(const BoundaryLoop& loop, int degree_u, int degree_v);

}  // namespace bgc
