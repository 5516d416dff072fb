#pragma once

#include "bgc/cage.hpp"

#include <span>
#include <utility>
#include <vector>

namespace bgc {

/// Bernstein basis values of a patch at one parameter, in control-point order.
struct BasisWeights {
  std::vector<double> weights;
};

double binomial(int n, int k);

/// True when (u, v) lies in the closed parameter domain of `kind`.
bool in_domain(PatchKind kind, double u, double v);

BasisWeights basis_weights(const Patch& patch, double u, double v);
Vec3 patch_point(const Patch& patch, double u, double v);
std::pair<Vec3, Vec3> patch_partials(const Patch& patch, double u, double v);

// Non-allocating forms for inner loops. `out` must hold control_count(patch)
// entries. No domain check is performed.
void basis_weights_into(const Patch& patch, double u, double v, std::span<double> out);
void basis_derivatives_into(const Patch& patch, double u, double v, std::span<double> du,
                            std::span<double> dv);
Vec3 combine(std::span<const double> weights, std::span<const Vec3> points);

}  // namespace bgc
