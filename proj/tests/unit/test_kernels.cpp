#include "bgc/bezier.hpp"
#include "bgc/kernels.hpp"

#include "../support/oracles.hpp"
#include "../support/shapes.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace bgc;

namespace {

TensorPatch curved_patch(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-0.25, 0.25);
  std::vector<Vec3> pts;
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j) pts.emplace_back(i / 3.0 + 0.3 * d(rng), j / 3.0 + 0.3 * d(rng), 2.0 * d(rng));
  return TensorPatch(3, 3, std::move(pts));
}

TrianglePatch curved_triangle(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-0.25, 0.25);
  std::vector<Vec3> pts;
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3 - i; ++j) pts.emplace_back(i / 3.0, j / 3.0, 2.0 * d(rng));
  return TrianglePatch(3, std::move(pts));
}

double dense_grid_minimum(const Patch& patch, const Vec3& eta) {
  double best = std::numeric_limits<double>::infinity();
  const int n = 512;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      if (kind_of(patch) == PatchKind::triangle && i + j > n) continue;
      best = std::min(best, (patch_point(patch, double(i) / n, double(j) / n) - eta).norm());
    }
  return best;
}

double shortest_edge(const TessellationPattern& t, std::size_t tri) {
  const auto& f = t.triangles[tri];
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 3; ++e) best = std::min(best, (t.vertices[f[e]] - t.vertices[f[(e + 1) % 3]]).norm());
  return best;
}

double longest_edge(const TessellationPattern& t, std::size_t tri) {
  const auto& f = t.triangles[tri];
  double best = 0.0;
  for (int e = 0; e < 3; ++e) best = std::max(best, (t.vertices[f[e]] - t.vertices[f[(e + 1) % 3]]).norm());
  return best;
}

// Every interior edge appears once in each direction; every boundary edge
// once. Checks conformity (no T-junctions) of a pattern.
bool conforming(const TessellationPattern& t) {
  std::multiset<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& f : t.triangles)
    for (int e = 0; e < 3; ++e) edges.insert({f[e], f[(e + 1) % 3]});
  for (const auto& [a, b] : edges) {
    if (edges.count({a, b}) != 1) return false;
    if (edges.count({b, a}) == 1) continue;
    const UV pa = t.vertices[a], pb = t.vertices[b];
    const bool on_boundary = (pa.x() == 0 && pb.x() == 0) || (pa.y() == 0 && pb.y() == 0) ||
                             (t.kind == PatchKind::tensor && ((pa.x() == 1 && pb.x() == 1) || (pa.y() == 1 && pb.y() == 1))) ||
                             (t.kind == PatchKind::triangle && std::abs(pa.sum() - 1) < 1e-15 && std::abs(pb.sum() - 1) < 1e-15);
    if (!on_boundary) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("integration-kernels") {
  TEST_CASE("point inversion onto a planar square") {
    const TensorPatch square(1, 1, {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 0}});
    const ProjectedSeed s = invert_point(square, Vec3(0.5, 0.5, 1.0));
    CHECK(s.u_star == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(s.v_star == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(s.distance == doctest::Approx(1.0).epsilon(1e-12));
    const ProjectedSeed outside = invert_point(square, Vec3(2.0, -1.0, 0.0));
    CHECK(outside.u_star == 1.0);
    CHECK(outside.v_star == 0.0);
  }

  TEST_CASE("point inversion recovers on-surface parameters") {
    for (unsigned seed = 1; seed <= 10; ++seed) {
      const TensorPatch p = curved_patch(seed);
      const ProjectedSeed s = invert_point(p, patch_point(p, 0.3, 0.7));
      CHECK(std::abs(s.u_star - 0.3) < 1e-6);
      CHECK(std::abs(s.v_star - 0.7) < 1e-6);
      CHECK(s.distance <= 1e-6);
    }
    const TrianglePatch t = curved_triangle(3);
    const ProjectedSeed s = invert_point(t, patch_point(t, 0.25, 0.5));
    CHECK(std::abs(s.u_star - 0.25) < 1e-6);
    CHECK(std::abs(s.v_star - 0.5) < 1e-6);
  }

  TEST_CASE("point inversion is no worse than a 512 x 512 grid search") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> d(-0.5, 1.5);
    for (int k = 0; k < 6; ++k) {
      const Patch p = k % 3 == 2 ? Patch(curved_triangle(30 + k)) : Patch(curved_patch(30 + k));
      const Vec3 eta(d(rng), d(rng), d(rng));
      const ProjectedSeed s = invert_point(p, eta);
      CHECK(in_domain(kind_of(p), s.u_star, s.v_star));
      CHECK(s.distance <= dense_grid_minimum(p, eta) + 1e-6);
      CHECK(std::abs(s.distance - (patch_point(p, s.u_star, s.v_star) - eta).norm()) < 1e-12);
    }
  }

  TEST_CASE("base grid counts") {
    const TessellationPattern t = build_uv_tessellation(PatchKind::tensor, {}, {2, 0});
    CHECK(t.triangles.size() == 8);
    CHECK(t.parametric_area() == doctest::Approx(1.0).epsilon(1e-14));
    const TessellationPattern tri = build_uv_tessellation(PatchKind::triangle, {}, {3, 0});
    CHECK(tri.triangles.size() == 9);
    CHECK(tri.parametric_area() == doctest::Approx(0.5).epsilon(1e-14));
  }

  TEST_CASE("tilings cover the domain exactly and conform") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> d(0, 1);
    for (int g : {2, 3, 8}) {
      for (int levels : {0, 1, 3, 4}) {
        for (int k = 0; k < 3; ++k) {
          ProjectedSeed seed{d(rng), d(rng), 0.0};
          const TessellationPattern t = build_uv_tessellation(PatchKind::tensor, seed, {g, levels});
          CHECK(std::abs(t.parametric_area() - 1.0) < 1e-12);
          CHECK(conforming(t));
          if (seed.u_star + seed.v_star > 1) seed = {1 - seed.u_star, 1 - seed.v_star, 0.0};
          const TessellationPattern tri = build_uv_tessellation(PatchKind::triangle, seed, {g, levels});
          CHECK(std::abs(tri.parametric_area() - 0.5) < 1e-12);
          CHECK(conforming(tri));
          for (const UV& x : tri.vertices) CHECK(in_domain(PatchKind::triangle, x.x(), x.y()));
          for (const UV& x : t.vertices) CHECK(in_domain(PatchKind::tensor, x.x(), x.y()));
          for (const auto& f : t.triangles) {
            const UV a = t.vertices[f[1]] - t.vertices[f[0]], b = t.vertices[f[2]] - t.vertices[f[0]];
            CHECK(a.x() * b.y() - a.y() * b.x() > 0.0);
          }
        }
      }
    }
  }

  TEST_CASE("refinement concentrates at the seed") {
    const int g = 8;
    const TessellationPattern t = build_uv_tessellation(PatchKind::tensor, {0.0, 0.0, 0.0}, {g, 3});
    double smallest = std::numeric_limits<double>::infinity();
    double largest_near = 0.0;
    for (std::size_t k = 0; k < t.triangles.size(); ++k) {
      smallest = std::min(smallest, shortest_edge(t, k));
      if (t.centroids[k].norm() < 0.05) largest_near = std::max(largest_near, longest_edge(t, k));
    }
    CHECK(smallest <= (1.0 / g) / 8 + 1e-15);
    CHECK(largest_near <= std::sqrt(2.0) * (1.0 / g) / 8 + 1e-15);
    // Far from the seed the base grid survives.
    double largest = 0.0;
    for (std::size_t k = 0; k < t.triangles.size(); ++k) largest = std::max(largest, longest_edge(t, k));
    CHECK(largest > (1.0 / g));
  }

  TEST_CASE("boundary samples are independent of the seed") {
    auto boundary = [](const TessellationPattern& t) {
      std::set<std::pair<double, double>> out;
      for (const UV& x : t.vertices)
        if (x.x() == 0 || x.y() == 0 || x.x() == 1 || x.y() == 1) out.insert({x.x(), x.y()});
      return out;
    };
    const auto a = boundary(build_uv_tessellation(PatchKind::tensor, {0.1, 0.9, 0}, {4, 3}));
    const auto b = boundary(build_uv_tessellation(PatchKind::tensor, {0.7, 0.2, 0}, {4, 3}));
    CHECK(a == b);
    CHECK(a.size() == 4 * 32);
  }

  TEST_CASE("invalid tessellation parameters") {
    CHECK_THROWS_AS(build_uv_tessellation(PatchKind::tensor, {}, {1, 2}), Error);
    CHECK_THROWS_AS(build_uv_tessellation(PatchKind::tensor, {}, {8, -1}), Error);
    CHECK_THROWS_AS(build_uv_tessellation(PatchKind::tensor, {}, {8, 12}), Error);
  }

  TEST_CASE("solid angle of an octant and orientation") {
    const Vec3 x(1, 0, 0), y(0, 1, 0), z(0, 0, 1), o(0, 0, 0);
    CHECK(signed_solid_angle(x, y, z, o) == doctest::Approx(kPi / 2).epsilon(1e-14));
    CHECK(signed_solid_angle(x, z, y, o) == doctest::Approx(-kPi / 2).epsilon(1e-14));
    CHECK(signed_solid_angle(x, x, z, o) == 0.0);
    CHECK(signed_solid_angle(x, 2 * x, 3 * x, o) == 0.0);
  }

  TEST_CASE("12-triangle cube closes to 4 pi") {
    const EmbeddedMesh cube = tessellate_cage(test::unit_cube(), 1);
    REQUIRE(cube.faces.size() == 12);
    double total = 0.0;
    for (const auto& f : cube.faces)
      total += signed_solid_angle(cube.vertices[f[0]], cube.vertices[f[1]], cube.vertices[f[2]], Vec3(0.5, 0.5, 0.5));
    CHECK(std::abs(total - kFourPi) < 1e-12);
  }

  TEST_CASE("green integral against adaptive quadrature") {
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
    const double closed = green_integral_triangle(a, b, c, Vec3(0, 0, 1));
    CHECK(std::abs(closed - test::quadrature_green(a, b, c, Vec3(0, 0, 1))) < 1e-8);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int k = 0; k < 10; ++k) {
      const Vec3 p1(d(rng), d(rng), d(rng)), p2(d(rng), d(rng), d(rng)), p3(d(rng), d(rng), d(rng));
      const Vec3 eta = (p1 + p2 + p3) / 3.0 + (p2 - p1).cross(p3 - p1).normalized() * (0.05 + 0.5 * std::abs(d(rng))) +
                       0.3 * Vec3(d(rng), d(rng), d(rng));
      const double value = green_integral_triangle(p1, p2, p3, eta);
      CHECK(value > 0.0);
      CHECK(std::abs(value - test::quadrature_green(p1, p2, p3, eta, 1e-13)) < 1e-8 * std::max(1.0, value));
    }
  }

  TEST_CASE("green integral in-plane and far-field behaviour") {
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
    // In the plane, outside the triangle.
    const Vec3 side(1.5, 1.0, 0.0);
    CHECK(std::abs(green_integral_triangle(a, b, c, side) - test::quadrature_green(a, b, c, side)) < 1e-8);
    const double diameter = std::sqrt(2.0);
    const Vec3 centroid = (a + b + c) / 3.0;
    const Vec3 far = centroid + Vec3(0.3, -0.4, 1.0).normalized() * (100 * diameter);
    const double expected = 0.5 / (kFourPi * 100 * diameter);
    CHECK(std::abs(green_integral_triangle(a, b, c, far) / expected - 1.0) < 0.01);
    CHECK(green_integral_triangle(a, 2 * b, 3 * b, Vec3(0, 0, 1)) == 0.0);
  }

  TEST_CASE("green integral is rigid invariant and scales linearly") {
    std::mt19937_64 rng(24);
    const Eigen::Matrix3d r = test::random_rotation(rng);
    const Vec3 t(0.3, -2.0, 1.1);
    const Vec3 p1(0.1, 0.2, 0.3), p2(1.0, 0.1, -0.2), p3(0.2, 0.9, 0.4), eta(0.4, 0.3, 0.9);
    const double base = green_integral_triangle(p1, p2, p3, eta);
    CHECK(std::abs(green_integral_triangle(r * p1 + t, r * p2 + t, r * p3 + t, r * eta + t) - base) < 1e-12);
    CHECK(std::abs(green_integral_triangle(3 * p1, 3 * p2, 3 * p3, 3 * eta) - 3 * base) < 1e-12);
    const ElementKernels both = element_kernels(p1, p2, p3, eta);
    CHECK(both.green == base);
    CHECK(both.solid_angle == doctest::Approx(signed_solid_angle(p1, p2, p3, eta)).epsilon(1e-15));
  }
}
