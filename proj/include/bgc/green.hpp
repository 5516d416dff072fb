#pragma once

#include "bgc/cage.hpp"
#include "bgc/control_normals.hpp"
#include "bgc/kernels.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace bgc {

/// How the Neumann term is parameterized.
enum class NeumannVariant : std::uint8_t {
  normals = 0,       // one psi per control point, paired with net normals
  cross_product = 1  // one psi per ordered control-point pair (a < b), paired with b_a x b_b
};

struct PatchLayout {
  PatchKind kind;
  int degree_u;
  int degree_v;  // equals degree_u for triangles
  std::size_t control_count;
  std::size_t phi_offset;
  std::size_t psi_offset;
  std::size_t psi_count;

  bool operator==(const PatchLayout&) const = default;
};

/// Column layout of one coordinate row: every patch's phi block (patch-major),
/// followed by every patch's psi block.
struct CoordinateLayout {
  NeumannVariant variant = NeumannVariant::normals;
  std::vector<PatchLayout> patches;
  std::size_t phi_count = 0;
  std::size_t psi_count = 0;

  std::size_t row_size() const noexcept { return phi_count + psi_count; }
  bool operator==(const CoordinateLayout&) const = default;
};

CoordinateLayout make_layout(const Cage& cage, NeumannVariant variant);

/// Number of ordered control-point pairs for `count` control points.
inline std::size_t pair_count(std::size_t count) { return count * (count - 1) / 2; }

struct CoordinateParams {
  TessellationParams tessellation;
  NeumannVariant variant = NeumannVariant::normals;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Per-vertex phi and psi rows. Rows are raw Riemann sums until projected.
struct CoordinateTable {
  CoordinateLayout layout;
  TessellationParams tessellation;
  bool projected = false;
  std::size_t vertex_count = 0;
  std::vector<double> values;  // vertex_count x layout.row_size(), row-major
  std::size_t skipped_elements = 0;

  std::span<double> row(std::size_t v) {
    return {values.data() + v * layout.row_size(), layout.row_size()};
  }
  std::span<const double> row(std::size_t v) const {
    return {values.data() + v * layout.row_size(), layout.row_size()};
  }
  std::span<const double> phi(std::size_t v) const { return row(v).first(layout.phi_count); }
  std::span<const double> psi(std::size_t v) const { return row(v).subspan(layout.phi_count); }
};

/// Thrown by cage_coordinates when vertices fail the interior test.
class ExteriorVerticesError : public Error {
 public:
  ExteriorVerticesError(std::vector<std::size_t> indices);
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

/// Per-element contributions lambda(u_t, v_t) * omega_t / (4 pi).
std::vector<double> patch_phi(const Patch& patch, const TessellationPattern& tess, const Vec3& eta);

/// Per-element contributions lambda(u_t, v_t) / |N(u_t, v_t)| * int_t G.
/// Elements whose interpolated normal vanishes are skipped and counted in
/// `skipped` when given.
std::vector<double> patch_psi(const Patch& patch, const ControlNetNormals& net,
                              const TessellationPattern& tess, const Vec3& eta,
                              std::size_t* skipped = nullptr);

/// Cross-product Neumann weights, one per ordered pair a < b of control
/// indices, pair-major in (a, b) lexicographic order.
std::vector<double> patch_psi_crossproduct(const Patch& patch, const TessellationPattern& tess,
                                           const Vec3& eta, std::size_t* skipped = nullptr);

/// Raw coordinates of every vertex. Vertices whose total solid angle misses
/// 4 pi by 1e-2 or more are rejected with ExteriorVerticesError.
CoordinateTable cage_coordinates(const Cage& cage, std::span<const Vec3> vertices,
                                 const CoordinateParams& params);

/// Neumann vectors paired with psi columns for a given cage: net normals, or
/// centroid-relative cross products (b_a - c) x (b_b - c).
std::vector<Vec3> neumann_vectors(const Cage& cage, NeumannVariant variant);

/// sum phi * b + sum psi * N for row v, evaluated against `cage` itself.
Vec3 reconstruct(const CoordinateTable& table, std::size_t v, std::span<const Vec3> positions,
                 std::span<const Vec3> neumann);

/// Control points of all patches, patch-major.
std::vector<Vec3> stacked_control_points(const Cage& cage);

}  // namespace bgc
