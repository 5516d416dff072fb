#pragma once

#include "bgc/cage.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

namespace bgc {

using UV = Eigen::Vector2d;

struct ProjectedSeed {
  double u_star = 0.5;
  double v_star = 0.5;
  double distance = 0.0;
};

/// Closest-point parameter of `eta` on `patch`. An 8x8 scan of the domain picks
/// the starting points; each start then runs projected steepest descent in the
/// surface metric with backtracking until the step falls below 1e-10 or 100
/// iterations elapse. The best result over all starts is returned.
ProjectedSeed invert_point(const Patch& patch, const Vec3& eta);

/// Conforming triangulation of a patch's parameter domain, denser near a seed.
struct TessellationPattern {
  PatchKind kind = PatchKind::tensor;
  std::vector<UV> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;  // counter-clockwise in (u, v)
  std::vector<UV> centroids;                            // one per triangle
  UV seed = UV(0.5, 0.5);

  double parametric_area() const;
};

struct TessellationParams {
  int base = 8;    // g: uniform g x g start grid
  int levels = 4;  // L: refinement rounds
};

/// Uniform g x g grid (two triangles per cell, or the barycentric grid for
/// triangle patches) followed by L rounds of 1-to-4 midpoint refinement of
/// every triangle whose centroid lies within 2^-round times the domain
/// diameter of the seed. Domain boundary edges are always split to the finest
/// level, g * 2^L segments, so adjacent patches tessellate their shared edges
/// identically whatever their seeds. Triangles left with hanging vertices on
/// their edges are replaced by a fan around their centroid, so the result has
/// no T-junctions.
TessellationPattern build_uv_tessellation(PatchKind kind, const ProjectedSeed& seed,
                                          TessellationParams params);

/// Signed solid angle subtended at `eta` by triangle (p1, p2, p3); positive when
/// the triangle winds counter-clockwise seen from `eta`. Zero-area triangles
/// give 0.
double signed_solid_angle(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& eta);

/// Closed-form integral of 1 / (4 pi |xi - eta|) over the planar triangle.
double green_integral_triangle(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& eta);

/// Both kernels at once, sharing the vertex offsets.
struct ElementKernels {
  double solid_angle = 0.0;
  double green = 0.0;
};
ElementKernels element_kernels(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& eta);

}  // namespace bgc
