#include "bgc/deformation.hpp"

#include "bgc/bezier.hpp"
#include "bgc/parallel.hpp"

#include <cmath>
#include <sstream>

namespace bgc {

double scale_factor_L(const Partials& source, const Partials& target) {
  const auto& [bu, bv] = source;
  const auto& [tu, tv] = target;
  const double jacobian = bu.cross(bv).squaredNorm();
  if (!(jacobian > 0.0)) throw Error(ErrorCategory::numeric, "degenerate source parameterization (b_u x b_v = 0)");
  const double numerator =
      tu.squaredNorm() * bv.squaredNorm() + bu.squaredNorm() * tv.squaredNorm() - 2.0 * tu.dot(tv) * bu.dot(bv);
  return std::sqrt(std::max(0.0, numerator) / (2.0 * jacobian));
}

namespace {

// Midpoint samples of the parameter domain with equal weights: cell centers of
// an r x r grid, or centroids of the r^2 triangles of the barycentric grid.
std::vector<UV> midpoint_samples(PatchKind kind, int r) {
  std::vector<UV> out;
  const double h = 1.0 / r;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (kind == PatchKind::tensor) {
        out.emplace_back((i + 0.5) * h, (j + 0.5) * h);
        continue;
      }
      if (i + j > r - 1) continue;
      out.emplace_back((i + 1.0 / 3.0) * h, (j + 1.0 / 3.0) * h);
      if (i + j <= r - 2) out.emplace_back((i + 2.0 / 3.0) * h, (j + 2.0 / 3.0) * h);
    }
  return out;
}

std::string patch_label(std::size_t k) {
  std::ostringstream msg;
  msg << "patch " << k;
  return msg.str();
}

}  // namespace

std::vector<double> sigma_coefficients(const Patch& source, const Patch& target, int resolution,
                                       NeumannVariant variant) {
  if (resolution < 4) throw Error(ErrorCategory::domain, "sigma resolution must be >= 4");
  if (!same_shape(source, target)) throw Error(ErrorCategory::mismatch, "source and target patch shapes differ");
  const std::size_t count = control_count(source);
  const ControlNetNormals source_net = control_net_normals(source);
  const ControlNetNormals target_net = control_net_normals(target);
  std::vector<double> numerator(count, 0.0);
  std::vector<double> denominator(count, 0.0);
  double patch_numerator = 0.0;
  double patch_denominator = 0.0;
  std::vector<double> w(count);
  for (const UV& x : midpoint_samples(kind_of(source), resolution)) {
    const Partials sp = patch_partials(source, x.x(), x.y());
    const Partials tp = patch_partials(target, x.x(), x.y());
    const double jacobian = sp.first.cross(sp.second).norm();
    const double s_l = scale_factor_L(sp, tp);
    if (variant == NeumannVariant::cross_product) {
      patch_numerator += s_l * jacobian;
      patch_denominator += tp.first.cross(tp.second).norm();
      continue;
    }
    basis_weights_into(source, x.x(), x.y(), w);
    const double n_source = combine(w, source_net.normals).norm();
    const double n_target = combine(w, target_net.normals).norm();
    const double s_a = n_source > 0.0 ? n_target / n_source : 0.0;
    for (std::size_t c = 0; c < count; ++c) {
      numerator[c] += w[c] * s_l * jacobian;
      denominator[c] += w[c] * s_a * jacobian;
    }
  }
  if (variant == NeumannVariant::cross_product) {
    if (!(patch_denominator > 0.0)) throw Error(ErrorCategory::numeric, "target patch has zero area");
    return std::vector<double>(pair_count(count), patch_numerator / patch_denominator);
  }
  std::vector<double> sigma(count);
  for (std::size_t c = 0; c < count; ++c) {
    if (!(denominator[c] > 0.0)) {
      std::ostringstream msg;
      msg << "target net normals vanish over the support of control point " << c;
      throw Error(ErrorCategory::numeric, msg.str());
    }
    sigma[c] = numerator[c] / denominator[c];
  }
  return sigma;
}

void require_congruent(const Cage& source, const Cage& target) {
  if (source.size() != target.size()) {
    std::ostringstream msg;
    msg << "target cage has " << target.size() << " patches, source has " << source.size();
    throw Error(ErrorCategory::mismatch, msg.str());
  }
  for (std::size_t k = 0; k < source.size(); ++k)
    if (!same_shape(source.patch(k), target.patch(k)))
      throw Error(ErrorCategory::mismatch, patch_label(k) + ": kind or degree differs between source and target");
}

SigmaFactors cage_sigma(const Cage& source, const Cage& target, int resolution, NeumannVariant variant) {
  require_congruent(source, target);
  std::vector<std::vector<double>> per_patch(source.size());
  parallel_for(source.size(), 0, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      try {
        per_patch[k] = sigma_coefficients(source.patch(k), target.patch(k), resolution, variant);
      } catch (const Error& e) {
        throw Error(e.category(), patch_label(k) + ": " + e.what());
      }
    }
  });
  SigmaFactors out;
  for (const auto& values : per_patch) out.values.insert(out.values.end(), values.begin(), values.end());
  return out;
}

std::vector<Vec3> apply_deformation(const CoordinateTable& table, const Cage& target, const SigmaFactors& sigma,
                                    unsigned threads) {
  if (!(make_layout(target, table.layout.variant) == table.layout))
    throw Error(ErrorCategory::mismatch, "target cage does not match the coordinate layout");
  if (sigma.values.size() != table.layout.psi_count)
    throw Error(ErrorCategory::mismatch, "sigma count does not match the coordinate layout");
  const std::vector<Vec3> positions = stacked_control_points(target);
  std::vector<Vec3> neumann = neumann_vectors(target, table.layout.variant);
  for (std::size_t c = 0; c < neumann.size(); ++c) neumann[c] *= sigma.values[c];
  std::vector<Vec3> out(table.vertex_count);
  parallel_for(table.vertex_count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) out[v] = reconstruct(table, v, positions, neumann);
  });
  return out;
}

}  // namespace bgc
