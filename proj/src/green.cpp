#include "bgc/green.hpp"

#include "bgc/bezier.hpp"
#include "bgc/parallel.hpp"

#include <cmath>
#include <sstream>

namespace bgc {

CoordinateLayout make_layout(const Cage& cage, NeumannVariant variant) {
  CoordinateLayout layout;
  layout.variant = variant;
  for (const Patch& patch : cage.patches()) {
    PatchLayout p;
    p.kind = kind_of(patch);
    if (const auto* t = std::get_if<TensorPatch>(&patch)) {
      p.degree_u = t->degree_u();
      p.degree_v = t->degree_v();
    } else {
      p.degree_u = p.degree_v = std::get<TrianglePatch>(patch).degree();
    }
    p.control_count = control_count(patch);
    p.psi_count = variant == NeumannVariant::normals ? p.control_count : pair_count(p.control_count);
    p.phi_offset = layout.phi_count;
    layout.phi_count += p.control_count;
    layout.patches.push_back(p);
  }
  for (PatchLayout& p : layout.patches) {
    p.psi_offset = layout.phi_count + layout.psi_count;
    layout.psi_count += p.psi_count;
  }
  return layout;
}

namespace {

std::string exterior_message(const std::vector<std::size_t>& indices) {
  std::ostringstream msg;
  msg << indices.size() << " vertices outside the cage:";
  const std::size_t shown = std::min<std::size_t>(indices.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg << ' ' << indices[i];
  if (shown < indices.size()) msg << " ...";
  return msg.str();
}

constexpr std::size_t kMaxControls = (kMaxDegree + 1) * (kMaxDegree + 1);

struct Scratch {
  std::vector<Vec3> mapped;
  double weights[kMaxControls];
  double du[kMaxControls];
  double dv[kMaxControls];
};

void map_vertices(const Patch& patch, const TessellationPattern& tess, Scratch& s) {
  const auto pts = control_points(patch);
  const std::span<double> w(s.weights, pts.size());
  s.mapped.resize(tess.vertices.size());
  for (std::size_t k = 0; k < tess.vertices.size(); ++k) {
    basis_weights_into(patch, tess.vertices[k].x(), tess.vertices[k].y(), w);
    s.mapped[k] = combine(w, pts);
  }
}

struct PatchSums {
  double solid_angle = 0.0;
  std::size_t skipped = 0;
};

// Accumulates phi and psi (normal variant) of one patch into the given spans.
PatchSums accumulate_normals(const Patch& patch, const ControlNetNormals& net,
                             const TessellationPattern& tess, const Vec3& eta, std::span<double> phi,
                             std::span<double> psi, Scratch& s) {
  map_vertices(patch, tess, s);
  const std::size_t count = phi.size();
  const std::span<double> w(s.weights, count);
  PatchSums sums;
  for (std::size_t t = 0; t < tess.triangles.size(); ++t) {
    const auto& tri = tess.triangles[t];
    const ElementKernels k = element_kernels(s.mapped[tri[0]], s.mapped[tri[1]], s.mapped[tri[2]], eta);
    sums.solid_angle += k.solid_angle;
    basis_weights_into(patch, tess.centroids[t].x(), tess.centroids[t].y(), w);
    const double a = k.solid_angle / kFourPi;
    for (std::size_t c = 0; c < count; ++c) phi[c] += w[c] * a;
    const double normal = combine(w, net.normals).norm();
    if (!(normal > 0.0) || !std::isfinite(normal)) {
      ++sums.skipped;
      continue;
    }
    const double g = k.green / normal;
    for (std::size_t c = 0; c < count; ++c) psi[c] += w[c] * g;
  }
  return sums;
}

PatchSums accumulate_crossproduct(const Patch& patch, const TessellationPattern& tess,
                                  const Vec3& eta, std::span<double> phi, std::span<double> psi,
                                  Scratch& s) {
  map_vertices(patch, tess, s);
  const auto pts = control_points(patch);
  const std::size_t count = pts.size();
  const std::span<double> w(s.weights, count);
  const std::span<double> du(s.du, count);
  const std::span<double> dv(s.dv, count);
  PatchSums sums;
  for (std::size_t t = 0; t < tess.triangles.size(); ++t) {
    const auto& tri = tess.triangles[t];
    const ElementKernels k = element_kernels(s.mapped[tri[0]], s.mapped[tri[1]], s.mapped[tri[2]], eta);
    sums.solid_angle += k.solid_angle;
    const double u = tess.centroids[t].x();
    const double v = tess.centroids[t].y();
    basis_weights_into(patch, u, v, w);
    const double a = k.solid_angle / kFourPi;
    for (std::size_t c = 0; c < count; ++c) phi[c] += w[c] * a;
    basis_derivatives_into(patch, u, v, du, dv);
    const double jacobian = combine(du, pts).cross(combine(dv, pts)).norm();
    if (!(jacobian > 0.0) || !std::isfinite(jacobian)) {
      ++sums.skipped;
      continue;
    }
    const double g = k.green / jacobian;
    std::size_t idx = 0;
    for (std::size_t p = 0; p < count; ++p)
      for (std::size_t q = p + 1; q < count; ++q) psi[idx++] += (du[p] * dv[q] - du[q] * dv[p]) * g;
  }
  return sums;
}

}  // namespace

ExteriorVerticesError::ExteriorVerticesError(std::vector<std::size_t> indices)
    : Error(ErrorCategory::validation, exterior_message(indices)), indices_(std::move(indices)) {}

std::vector<double> patch_phi(const Patch& patch, const TessellationPattern& tess, const Vec3& eta) {
  Scratch s;
  std::vector<double> phi(control_count(patch), 0.0);
  std::vector<double> psi(control_count(patch), 0.0);
  accumulate_normals(patch, control_net_normals(patch), tess, eta, phi, psi, s);
  return phi;
}

std::vector<double> patch_psi(const Patch& patch, const ControlNetNormals& net,
                              const TessellationPattern& tess, const Vec3& eta, std::size_t* skipped) {
  Scratch s;
  std::vector<double> phi(control_count(patch), 0.0);
  std::vector<double> psi(control_count(patch), 0.0);
  const PatchSums sums = accumulate_normals(patch, net, tess, eta, phi, psi, s);
  if (skipped) *skipped += sums.skipped;
  return psi;
}

std::vector<double> patch_psi_crossproduct(const Patch& patch, const TessellationPattern& tess,
                                           const Vec3& eta, std::size_t* skipped) {
  Scratch s;
  std::vector<double> phi(control_count(patch), 0.0);
  std::vector<double> psi(pair_count(control_count(patch)), 0.0);
  const PatchSums sums = accumulate_crossproduct(patch, tess, eta, phi, psi, s);
  if (skipped) *skipped += sums.skipped;
  return psi;
}

CoordinateTable cage_coordinates(const Cage& cage, std::span<const Vec3> vertices,
                                 const CoordinateParams& params) {
  CoordinateTable table;
  table.layout = make_layout(cage, params.variant);
  table.tessellation = params.tessellation;
  table.vertex_count = vertices.size();
  table.values.assign(vertices.size() * table.layout.row_size(), 0.0);
  // Validates the tessellation parameters before spawning workers.
  build_uv_tessellation(PatchKind::tensor, {}, {params.tessellation.base, 0});
  if (params.tessellation.levels > 0) build_uv_tessellation(PatchKind::tensor, {}, params.tessellation);

  std::vector<ControlNetNormals> nets;
  for (const Patch& patch : cage.patches()) nets.push_back(control_net_normals(patch));

  std::vector<unsigned char> exterior(vertices.size(), 0);
  std::vector<std::size_t> skipped(vertices.size(), 0);
  parallel_for(vertices.size(), params.threads, [&](std::size_t begin, std::size_t end) {
    Scratch s;
    for (std::size_t v = begin; v < end; ++v) {
      const Vec3& eta = vertices[v];
      if (!is_finite(eta)) {
        exterior[v] = 1;
        continue;
      }
      const std::span<double> row = table.row(v);
      double solid_angle = 0.0;
      for (std::size_t k = 0; k < cage.size(); ++k) {
        const Patch& patch = cage.patch(k);
        const PatchLayout& p = table.layout.patches[k];
        const TessellationPattern tess =
            build_uv_tessellation(p.kind, invert_point(patch, eta), params.tessellation);
        const std::span<double> phi = row.subspan(p.phi_offset, p.control_count);
        const std::span<double> psi = row.subspan(p.psi_offset, p.psi_count);
        const PatchSums sums = params.variant == NeumannVariant::normals
                                   ? accumulate_normals(patch, nets[k], tess, eta, phi, psi, s)
                                   : accumulate_crossproduct(patch, tess, eta, phi, psi, s);
        solid_angle += sums.solid_angle;
        skipped[v] += sums.skipped;
      }
      if (!(std::abs(solid_angle - kFourPi) < 1e-2)) exterior[v] = 1;
    }
  });

  std::vector<std::size_t> rejected;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (exterior[v]) rejected.push_back(v);
    table.skipped_elements += skipped[v];
  }
  if (!rejected.empty()) throw ExteriorVerticesError(std::move(rejected));
  return table;
}

std::vector<Vec3> neumann_vectors(const Cage& cage, NeumannVariant variant) {
  std::vector<Vec3> out;
  if (variant == NeumannVariant::normals) {
    for (const Patch& patch : cage.patches()) {
      const ControlNetNormals net = control_net_normals(patch);
      out.insert(out.end(), net.normals.begin(), net.normals.end());
    }
    return out;
  }
  const Vec3 c = cage.centroid();
  for (const Patch& patch : cage.patches()) {
    const auto pts = control_points(patch);
    for (std::size_t p = 0; p < pts.size(); ++p)
      for (std::size_t q = p + 1; q < pts.size(); ++q) out.push_back((pts[p] - c).cross(pts[q] - c));
  }
  return out;
}

Vec3 reconstruct(const CoordinateTable& table, std::size_t v, std::span<const Vec3> positions,
                 std::span<const Vec3> neumann) {
  const auto phi = table.phi(v);
  const auto psi = table.psi(v);
  if (positions.size() != phi.size() || neumann.size() != psi.size())
    throw Error(ErrorCategory::mismatch, "cage does not match the coordinate layout");
  return combine(phi, positions) + combine(psi, neumann);
}

std::vector<Vec3> stacked_control_points(const Cage& cage) {
  std::vector<Vec3> out;
  for (const Patch& patch : cage.patches()) {
    const auto pts = control_points(patch);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

}  // namespace bgc
