#pragma once

#include "bgc/cage.hpp"

#include <cstddef>
#include <vector>

namespace bgc {

/// Unnormalized control-net vertex normals (units of length squared), one per
/// control point and in control-point order.
struct ControlNetNormals {
  std::vector<Vec3> normals;
  /// Control points whose every wedge was degenerate; their normal is zero.
  std::vector<std::size_t> zero_normals;
};

/// Wedge-averaged control-net normals. A tensor control point with W valid
/// wedges gets (m n / W) times the sum of its wedge cross products (W = 1 at
/// corners, 2 on edges, 4 inside); a triangle control point gets (n^2 / W)
/// times its sum over up to six wedges.
ControlNetNormals control_net_normals(const Patch& patch);

/// Basis-weighted blend of the net normals; approximates b_u x b_v.
Vec3 surface_normal(const Patch& patch, const ControlNetNormals& net, double u, double v);

}  // namespace bgc
