#pragma once

#include "bgc/types.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bgc {

inline constexpr int kMaxDegree = 16;

enum class PatchKind { tensor, triangle };

/// Tensor-product Bezier patch of degree (m, n). Control point (i, j) lives at
/// index i * (n + 1) + j.
class TensorPatch {
 public:
  TensorPatch(int degree_u, int degree_v, std::vector<Vec3> control_points);

  int degree_u() const noexcept { return degree_u_; }
  int degree_v() const noexcept { return degree_v_; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(degree_v_ + 1) +
           static_cast<std::size_t>(j);
  }
  const Vec3& at(int i, int j) const { return points_[index(i, j)]; }
  std::span<const Vec3> control_points() const noexcept { return points_; }

 private:
  int degree_u_;
  int degree_v_;
  std::vector<Vec3> points_;
};

/// Bezier triangle of degree n. Control point (i, j, k) with i + j + k = n is
/// stored lexicographically in (i, j); parameter u weights i, v weights j.
class TrianglePatch {
 public:
  TrianglePatch(int degree, std::vector<Vec3> control_points);

  int degree() const noexcept { return degree_; }
  static std::size_t point_count(int degree) {
    return static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
  }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i * (degree_ + 1) - i * (i - 1) / 2 + j);
  }
  const Vec3& at(int i, int j) const { return points_[index(i, j)]; }
  std::span<const Vec3> control_points() const noexcept { return points_; }

 private:
  int degree_;
  std::vector<Vec3> points_;
};

using Patch = std::variant<TensorPatch, TrianglePatch>;

PatchKind kind_of(const Patch& patch);
std::span<const Vec3> control_points(const Patch& patch);
std::size_t control_count(const Patch& patch);
/// Rebuilds a patch of the same kind and degree around new control points.
Patch with_points(const Patch& patch, std::vector<Vec3> points);
/// Boundary control polylines, counter-clockwise in the parameter domain.
std::vector<std::vector<Vec3>> boundary_polylines(const Patch& patch);
/// Same kind and degree(s).
bool same_shape(const Patch& a, const Patch& b);

/// Closed cage of Bezier patches with outward-facing b_u x b_v.
class Cage {
 public:
  explicit Cage(std::vector<Patch> patches, std::vector<std::string> names = {});

  std::span<const Patch> patches() const noexcept { return patches_; }
  std::size_t size() const noexcept { return patches_.size(); }
  const Patch& patch(std::size_t k) const { return patches_.at(k); }
  /// Optional per-patch labels; empty string when unnamed.
  const std::string& name(std::size_t k) const { return names_.at(k); }
  double diameter() const;
  Vec3 centroid() const;

 private:
  std::vector<Patch> patches_;
  std::vector<std::string> names_;
};

struct EmbeddedMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::size_t, 3>> faces;

  void check_indices() const;
};

struct BoundaryIssue {
  std::size_t patch;
  std::size_t side;  // 0..3 (tensor) or 0..2 (triangle), counter-clockwise
};

struct ValidationReport {
  std::vector<BoundaryIssue> unmatched;
  std::vector<BoundaryIssue> orientation_conflicts;
  std::vector<std::size_t> degenerate_patches;
  bool inverted = false;  // enclosed volume negative: normals point inward

  bool passed() const noexcept {
    return unmatched.empty() && orientation_conflicts.empty() && degenerate_patches.empty() &&
           !inverted;
  }
  std::string summary() const;
};

ValidationReport validate_cage(const Cage& cage);

/// Throws Error(validation) carrying the report summary if validation fails.
void require_valid(const Cage& cage);

/// Bilinear quad with corners q0..q3 (q0 at (0,0), q1 at (1,0), q2 at (1,1), q3 at (0,1)).
struct Quad {
  std::array<std::size_t, 4> corners;
};

/// Elevates each quad to a degree-(d, d) patch whose control point (i, j) is
/// q(i/d, j/d). Edge points are computed from the two shared corner vertices in
/// a fixed order so adjacent quads yield bitwise-identical control polylines.
Cage elevate_quad_cage(std::span<const Vec3> vertices, std::span<const Quad> quads, int degree);

/// Samples every patch on a uniform grid of resolution r; vertices with
/// bitwise-identical positions are welded.
EmbeddedMesh tessellate_cage(const Cage& cage, int resolution);

/// Total signed solid angle of a closed triangle mesh seen from `probe`.
double mesh_solid_angle(const EmbeddedMesh& surface, const Vec3& probe);

/// Indices of points whose solid angle against `surface` differs from 4 pi by
/// `tolerance` or more.
std::vector<std::size_t> exterior_points(const EmbeddedMesh& surface,
                                         std::span<const Vec3> points,
                                         double tolerance = 1e-2);

}  // namespace bgc
