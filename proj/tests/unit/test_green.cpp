#include "bgc/bezier.hpp"
#include "bgc/green.hpp"

#include "../support/oracles.hpp"
#include "../support/shapes.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace bgc;

namespace {

double sum(std::span<const double> values) { return std::accumulate(values.begin(), values.end(), 0.0); }

double reconstruction_error(const Cage& cage, const CoordinateTable& table, std::span<const Vec3> points) {
  const auto positions = stacked_control_points(cage);
  const auto neumann = neumann_vectors(cage, table.layout.variant);
  double worst = 0.0;
  for (std::size_t v = 0; v < points.size(); ++v)
    worst = std::max(worst, (reconstruct(table, v, positions, neumann) - points[v]).norm());
  return worst;
}

}  // namespace

TEST_SUITE("green-coordinates") {
  TEST_CASE("layout of the cube cage") {
    const CoordinateLayout layout = make_layout(test::unit_cube(), NeumannVariant::normals);
    CHECK(layout.phi_count == 24);
    CHECK(layout.psi_count == 24);
    CHECK(layout.patches[3].phi_offset == 12);
    CHECK(layout.patches[3].psi_offset == 36);
    CHECK(pair_count(16) == 120);
    const CoordinateLayout cross = make_layout(test::box_cage(0, 1, 3), NeumannVariant::cross_product);
    CHECK(cross.psi_count == 6 * 120);
    CHECK(cross.patches[1].psi_offset == 96 + 120);
  }

  TEST_CASE("cube center: face sums, corner values and symmetric psi") {
    const Cage cube = test::unit_cube();
    const std::vector<Vec3> center = {Vec3(0.5, 0.5, 0.5)};
    const CoordinateTable table = cage_coordinates(cube, center, {});
    CHECK(table.vertex_count == 1);
    CHECK(table.layout.row_size() == 48);
    CHECK_FALSE(table.projected);
    for (std::size_t k = 0; k < 6; ++k) {
      const auto phi = table.phi(0).subspan(4 * k, 4);
      const auto psi = table.psi(0).subspan(4 * k, 4);
      CHECK(std::abs(sum(phi) - 1.0 / 6.0) < 2e-3);
      for (std::size_t c = 0; c < 4; ++c) {
        CHECK(std::abs(phi[c] - 1.0 / 24.0) < 2e-3);
        CHECK(psi[c] >= 0.0);
        CHECK(std::abs(psi[c] - psi[0]) < 1e-6);
      }
    }
    CHECK(std::abs(sum(table.phi(0)) - 1.0) < 5e-3);
  }

  TEST_CASE("cube center psi matches a dense midpoint oracle") {
    const Cage cube = test::unit_cube();
    const Vec3 eta(0.5, 0.5, 0.5);
    const CoordinateTable table = cage_coordinates(cube, std::vector<Vec3>{eta}, {});
    const Patch& face = cube.patch(0);
    for (std::size_t c = 0; c < 4; ++c) {
      // On a bilinear face N(u, v) = b_u x b_v, so the area element cancels it.
      const double oracle = test::midpoint_square(
          [&](double u, double v) {
            const double lambda = basis_weights(face, u, v).weights[c];
            return lambda / (kFourPi * (patch_point(face, u, v) - eta).norm());
          },
          256);
      CHECK(std::abs(table.psi(0)[c] / oracle - 1.0) < 1e-3);
    }
  }

  TEST_CASE("per-patch entry points agree with the assembled table") {
    const Cage cage = test::rounded_cube();
    const Vec3 eta(0.2, -0.3, 0.4);
    const CoordinateTable table = cage_coordinates(cage, std::vector<Vec3>{eta}, {});
    const Patch& patch = cage.patch(2);
    const TessellationPattern tess = build_uv_tessellation(kind_of(patch), invert_point(patch, eta), {});
    const auto phi = patch_phi(patch, tess, eta);
    const auto psi = patch_psi(patch, control_net_normals(patch), tess, eta);
    const PatchLayout& p = table.layout.patches[2];
    for (std::size_t c = 0; c < p.control_count; ++c) {
      CHECK(phi[c] == table.row(0)[p.phi_offset + c]);
      CHECK(psi[c] == table.row(0)[p.psi_offset + c]);
    }
    const auto cross = patch_psi_crossproduct(patch, tess, eta);
    CHECK(cross.size() == 120);
  }

  TEST_CASE("raw coordinates nearly reproduce positions and settle with refinement") {
    const Cage cage = test::rounded_cube();
    const auto points = test::random_interior_points(cage, 5, 31);
    std::vector<double> errors;
    for (int levels = 0; levels <= 5; ++levels) {
      CoordinateParams params;
      params.tessellation = {8, levels};
      const CoordinateTable table = cage_coordinates(cage, points, params);
      errors.push_back(reconstruction_error(cage, table, points));
      for (std::size_t v = 0; v < points.size(); ++v) CHECK(std::abs(sum(table.phi(v)) - 1.0) < 5e-3);
    }
    for (int levels = 1; levels <= 3; ++levels) CHECK(errors[levels] < errors[levels - 1]);
    // Past the near field the base grid dominates and refinement stops paying.
    for (int levels = 4; levels <= 5; ++levels)
      CHECK(std::abs(errors[levels] - errors[3]) < 1e-6 * cage.diameter());
    CHECK(errors.back() < 1e-3 * cage.diameter());
  }

  TEST_CASE("bilinear cage error shrinks with the base grid") {
    const Cage cage = test::map_points(test::unit_cube(), [](const Vec3& p) -> Vec3 {
      return Vec3(p.x() + 0.3 * p.y() * p.z(), p.y() - 0.2 * p.x() * p.z(), p.z() + 0.25 * p.x() * p.y());
    });
    const auto points = test::random_interior_points(cage, 5, 36);
    double previous = std::numeric_limits<double>::infinity();
    for (int base : {4, 8, 16}) {
      CoordinateParams params;
      params.tessellation = {base, 3};
      const double error = reconstruction_error(cage, cage_coordinates(cage, points, params), points);
      CHECK(error < 0.5 * previous);
      previous = error;
    }
    CHECK(previous < 1e-4);
  }

  TEST_CASE("cross-product variant reproduces as well") {
    const Cage cage = test::triangular_prism();
    const auto points = test::random_interior_points(cage, 4, 32);
    CoordinateParams params;
    params.variant = NeumannVariant::cross_product;
    const CoordinateTable table = cage_coordinates(cage, points, params);
    CHECK(table.layout.psi_count == 2 * pair_count(10) + 3 * pair_count(16));
    CHECK(reconstruction_error(cage, table, points) < 1e-3 * cage.diameter());
  }

  TEST_CASE("results do not depend on patch order or thread count") {
    const Cage cage = test::bulged_octahedron();
    const auto points = test::random_interior_points(cage, 6, 33);
    CoordinateParams one;
    one.threads = 1;
    CoordinateParams many;
    many.threads = 3;
    const CoordinateTable a = cage_coordinates(cage, points, one);
    const CoordinateTable b = cage_coordinates(cage, points, many);
    CHECK(a.values == b.values);

    std::vector<Patch> reversed(cage.patches().rbegin(), cage.patches().rend());
    const Cage flipped(reversed);
    const CoordinateTable c = cage_coordinates(flipped, points, one);
    for (std::size_t v = 0; v < points.size(); ++v)
      for (std::size_t k = 0; k < cage.size(); ++k) {
        const PatchLayout& pa = a.layout.patches[k];
        const PatchLayout& pc = c.layout.patches[cage.size() - 1 - k];
        for (std::size_t i = 0; i < pa.control_count; ++i) {
          CHECK(a.row(v)[pa.phi_offset + i] == c.row(v)[pc.phi_offset + i]);
          CHECK(a.row(v)[pa.psi_offset + i] == c.row(v)[pc.psi_offset + i]);
        }
      }
  }

  TEST_CASE("rigid invariance of phi and scaling of psi") {
    const Cage cage = test::rounded_cube();
    const auto points = test::random_interior_points(cage, 3, 34);
    std::mt19937_64 rng(35);
    const Eigen::Matrix3d r = test::random_rotation(rng);
    const Vec3 t(1.0, -2.0, 0.5);
    const Cage moved = test::map_points(cage, [&](const Vec3& p) -> Vec3 { return r * p + t; });
    const Cage scaled = test::map_points(cage, [&](const Vec3& p) -> Vec3 { return 2.0 * p; });
    std::vector<Vec3> moved_points, scaled_points;
    for (const Vec3& p : points) {
      moved_points.push_back(r * p + t);
      scaled_points.push_back(2.0 * p);
    }
    const CoordinateTable a = cage_coordinates(cage, points, {});
    const CoordinateTable b = cage_coordinates(moved, moved_points, {});
    const CoordinateTable c = cage_coordinates(scaled, scaled_points, {});
    for (std::size_t v = 0; v < points.size(); ++v) {
      for (std::size_t i = 0; i < a.layout.phi_count; ++i) {
        CHECK(std::abs(a.phi(v)[i] - b.phi(v)[i]) < 1e-9);
        CHECK(std::abs(a.phi(v)[i] - c.phi(v)[i]) < 1e-9);
      }
      // Net normals carry length^2, so psi scales by 1/c and psi * N by c.
      for (std::size_t i = 0; i < a.layout.psi_count; ++i) CHECK(std::abs(c.psi(v)[i] - 0.5 * a.psi(v)[i]) < 1e-9);
    }
  }

  TEST_CASE("exterior vertices are rejected with their indices") {
    const Cage cube = test::unit_cube();
    const std::vector<Vec3> points = {{0.5, 0.5, 0.5}, {1.5, 0.5, 0.5}, {0.2, 0.3, 0.4}, {0.5, -3.0, 0.5}};
    try {
      cage_coordinates(cube, points, {});
      FAIL("expected rejection");
    } catch (const ExteriorVerticesError& e) {
      CHECK(e.indices() == std::vector<std::size_t>{1, 3});
      CHECK(e.category() == ErrorCategory::validation);
    }
  }
}
