#include "bgc/control_normals.hpp"

#include "bgc/bezier.hpp"

#include <array>

namespace bgc {
namespace {

ControlNetNormals tensor_normals(const TensorPatch& patch) {
  const int m = patch.degree_u();
  const int n = patch.degree_v();
  // Wedge order around b_ij: (+j, -i), (-i, -j), (-j, +i), (+i, +j); each
  // wedge is (first - b) x (second - b).
  constexpr std::array<std::array<int, 4>, 4> kWedges = {{
      {0, +1, -1, 0},
      {-1, 0, 0, -1},
      {0, -1, +1, 0},
      {+1, 0, 0, +1},
  }};
  ControlNetNormals out;
  out.normals.assign(patch.control_points().size(), Vec3::Zero());
  const double scale = static_cast<double>(m) * n;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) {
      const Vec3& b = patch.at(i, j);
      Vec3 sum = Vec3::Zero();
      int wedges = 0;
      for (const auto& w : kWedges) {
        const int i1 = i + w[0], j1 = j + w[1], i2 = i + w[2], j2 = j + w[3];
        if (i1 < 0 || i1 > m || j1 < 0 || j1 > n || i2 < 0 || i2 > m || j2 < 0 || j2 > n) continue;
        sum += (patch.at(i1, j1) - b).cross(patch.at(i2, j2) - b);
        ++wedges;
      }
      const std::size_t idx = patch.index(i, j);
      out.normals[idx] = (scale / wedges) * sum;
      if (out.normals[idx].isZero(0.0)) out.zero_normals.push_back(idx);
    }
  return out;
}

ControlNetNormals triangle_normals(const TrianglePatch& patch) {
  const int n = patch.degree();
  // Index steps (di, dj) with dk = -di - dj, counter-clockwise around b_ijk.
  constexpr std::array<std::array<int, 2>, 6> kSteps = {{
      {+1, 0}, {0, +1}, {-1, +1}, {-1, 0}, {0, -1}, {+1, -1},
  }};
  auto valid = [n](int i, int j) { return i >= 0 && j >= 0 && i + j <= n; };
  ControlNetNormals out;
  out.normals.assign(patch.control_points().size(), Vec3::Zero());
  const double scale = static_cast<double>(n) * n;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j) {
      const Vec3& b = patch.at(i, j);
      Vec3 sum = Vec3::Zero();
      int wedges = 0;
      for (std::size_t w = 0; w < kSteps.size(); ++w) {
        const auto& s1 = kSteps[w];
        const auto& s2 = kSteps[(w + 1) % kSteps.size()];
        if (!valid(i + s1[0], j + s1[1]) || !valid(i + s2[0], j + s2[1])) continue;
        sum += (patch.at(i + s1[0], j + s1[1]) - b).cross(patch.at(i + s2[0], j + s2[1]) - b);
        ++wedges;
      }
      const std::size_t idx = patch.index(i, j);
      // Every control point of a triangle net has at least one wedge.
      out.normals[idx] = (scale / wedges) * sum;
      if (out.normals[idx].isZero(0.0)) out.zero_normals.push_back(idx);
    }
  return out;
}

}  // namespace

ControlNetNormals control_net_normals(const Patch& patch) {
  if (const auto* t = std::get_if<TensorPatch>(&patch)) return tensor_normals(*t);
  return triangle_normals(std::get<TrianglePatch>(patch));
}

Vec3 surface_normal(const Patch& patch, const ControlNetNormals& net, double u, double v) {
  const BasisWeights w = basis_weights(patch, u, v);
  return combine(w.weights, net.normals);
}

}  // namespace bgc
