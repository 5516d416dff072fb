#pragma once

#include "bgc/green.hpp"

#include <span>
#include <utility>
#include <vector>

namespace bgc {

using Partials = std::pair<Vec3, Vec3>;

/// Quasi-conformal stretch of the map taking source tangents to target tangents.
double scale_factor_L(const Partials& source, const Partials& target);

/// One sigma per psi column of a cage, patch-major like the psi block.
struct SigmaFactors {
  std::vector<double> values;
};

/// Per-control ratio of the lambda-weighted integrals of s^L and s^A over the
/// source surface, by an r x r midpoint rule (r >= 4). For the cross-product
/// variant every pair of a patch shares one unweighted ratio computed with exact
/// cross products.
std::vector<double> sigma_coefficients(const Patch& source, const Patch& target, int resolution,
                                       NeumannVariant variant = NeumannVariant::normals);

SigmaFactors cage_sigma(const Cage& source, const Cage& target, int resolution,
                        NeumannVariant variant);

/// Throws Error(mismatch) naming the first patch whose kind or degree differs.
void require_congruent(const Cage& source, const Cage& target);

/// Deformed vertex positions: sum phi * b~ + sum sigma * psi * N~.
std::vector<Vec3> apply_deformation(const CoordinateTable& table, const Cage& target,
                                    const SigmaFactors& sigma, unsigned threads = 0);

}  // namespace bgc
