#include "bgc/kernels.hpp"

#include "bgc/bezier.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bgc {

// --- solid angle and single-layer potential --------------------------------

double signed_solid_angle(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& eta) {
  if ((p2 - p1).cross(p3 - p1).squaredNorm() == 0.0) return 0.0;
  const Vec3 a = p1 - eta;
  const Vec3 b = p2 - eta;
  const Vec3 c = p3 - eta;
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double det = a.dot(b.cross(c));
  const double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
  return 2.0 * std::atan2(det, denom);
}

ElementKernels element_kernels(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& eta) {
  const Vec3 normal = (p2 - p1).cross(p3 - p1);
  const double twice_area = normal.norm();
  if (twice_area == 0.0) return {};
  const Vec3 n = normal / twice_area;
  const Vec3 e[3] = {p1 - eta, p2 - eta, p3 - eta};
  const double len[3] = {e[0].norm(), e[1].norm(), e[2].norm()};

  const double det = e[0].dot(e[1].cross(e[2]));
  const double denom = len[0] * len[1] * len[2] + e[0].dot(e[1]) * len[2] + e[1].dot(e[2]) * len[0] +
                       e[2].dot(e[0]) * len[1];
  ElementKernels out;
  out.solid_angle = 2.0 * std::atan2(det, denom);

  // int_T 1/r dA = sum_edges s_e * ln((R + l) / (R - l)) - h * omega, where s_e
  // is the in-plane distance from eta's projection to edge e (positive on the
  // inner side), R the sum of distances from eta to the edge ends, and h the
  // signed height of eta's plane offset along n. h * omega >= 0 always.
  const double h = n.dot(e[0]);
  double sum = -h * out.solid_angle;
  for (int v = 0; v < 3; ++v) {
    const int a = (v + 1) % 3;
    const int b = (v + 2) % 3;
    const double edge = (e[b] - e[a]).norm();
    if (edge == 0.0) continue;
    const double r = len[a] + len[b];
    const double gap = r - edge;
    if (gap <= 0.0) continue;  // eta on the edge segment; excluded upstream
    const double s = e[a].cross(e[b]).dot(n) / edge;
    sum += s * std::log((r + edge) / gap);
  }
  out.green = sum / kFourPi;
  return out;
}

double green_integral_triangle(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& eta) {
  return element_kernels(p1, p2, p3, eta).green;
}

// --- point inversion --------------------------------------------------------

namespace {

UV clamp_to_domain(PatchKind kind, UV x) {
  x = x.cwiseMax(0.0).cwiseMin(1.0);
  if (kind == PatchKind::triangle && x.sum() > 1.0) {
    x.array() -= 0.5 * (x.sum() - 1.0);
    x = x.cwiseMax(0.0).cwiseMin(1.0);
    if (x.sum() > 1.0) x /= x.sum();
  }
  return x;
}

double half_sq_distance(const Patch& patch, const UV& x, const Vec3& eta) {
  return 0.5 * (patch_point(patch, x.x(), x.y()) - eta).squaredNorm();
}

struct Descent {
  UV x;
  double f;
};

Descent descend(const Patch& patch, const Vec3& eta, UV x) {
  const PatchKind kind = kind_of(patch);
  constexpr int kMaxIterations = 100;
  constexpr double kStepTolerance = 1e-10;
  double f = half_sq_distance(patch, x, eta);
  for (int it = 0; it < kMaxIterations; ++it) {
    const Vec3 r = patch_point(patch, x.x(), x.y()) - eta;
    const auto [bu, bv] = patch_partials(patch, x.x(), x.y());
    const UV grad(r.dot(bu), r.dot(bv));
    if (grad.squaredNorm() == 0.0) break;
    // Steepest descent measured in the surface metric J^T J; falls back to the
    // Euclidean gradient when the metric is singular.
    Eigen::Matrix2d metric;
    metric << bu.dot(bu), bu.dot(bv), bu.dot(bv), bv.dot(bv);
    UV direction = -grad;
    const double det = metric.determinant();
    if (det > 1e-14 * metric.trace() * metric.trace()) direction = -metric.inverse() * grad;

    bool moved = false;
    for (int attempt = 0; attempt < 2 && !moved; ++attempt) {
      if (attempt == 1) {
        direction = -grad * (f / grad.squaredNorm());
      }
      double t = 1.0;
      for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
        const UV trial = clamp_to_domain(kind, x + t * direction);
        const UV step = trial - x;
        if (step.norm() < kStepTolerance) break;
        const double ft = half_sq_distance(patch, trial, eta);
        if (ft <= f + 1e-4 * grad.dot(step) && ft < f) {
          x = trial;
          f = ft;
          moved = true;
          break;
        }
      }
    }
    if (!moved) break;
  }
  return {x, f};
}

}  // namespace

ProjectedSeed invert_point(const Patch& patch, const Vec3& eta) {
  const PatchKind kind = kind_of(patch);
  constexpr int kScan = 8;
  constexpr std::size_t kStarts = 4;
  std::vector<Descent> candidates;
  for (int i = 0; i < kScan; ++i)
    for (int j = 0; j < kScan; ++j) {
      if (kind == PatchKind::triangle && i + j > kScan - 1) continue;
      const UV x(static_cast<double>(i) / (kScan - 1), static_cast<double>(j) / (kScan - 1));
      candidates.push_back({x, half_sq_distance(patch, x, eta)});
    }
  const std::size_t starts = std::min(kStarts, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(starts),
                    candidates.end(), [](const Descent& a, const Descent& b) { return a.f < b.f; });
  Descent best = candidates.front();
  for (std::size_t s = 0; s < starts; ++s) {
    const Descent d = descend(patch, eta, candidates[s].x);
    if (d.f < best.f) best = d;
  }
  return {best.x.x(), best.x.y(), std::sqrt(2.0 * best.f)};
}

// --- seeded tessellation ----------------------------------------------------

double TessellationPattern::parametric_area() const {
  double area = 0.0;
  for (const auto& t : triangles) {
    const UV a = vertices[t[1]] - vertices[t[0]];
    const UV b = vertices[t[2]] - vertices[t[0]];
    area += 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  return area;
}

namespace {

// All refinement and boundary vertices sit on the lattice (I, J) / M with
// M = g 2^L, so vertices are addressed by integer coordinates.
class LatticeIndex {
 public:
  void reset(int resolution) {
    for (std::size_t slot : touched_) slots_[slot] = -1;
    touched_.clear();
    resolution_ = resolution;
    const std::size_t size = static_cast<std::size_t>(resolution + 1) * static_cast<std::size_t>(resolution + 1);
    if (slots_.size() < size) slots_.assign(size, -1);
  }
  std::int32_t find(int i, int j) const { return slots_[slot(i, j)]; }
  void set(int i, int j, std::int32_t id) {
    const std::size_t s = slot(i, j);
    slots_[s] = id;
    touched_.push_back(s);
  }

 private:
  std::size_t slot(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution_ + 1) + static_cast<std::size_t>(j);
  }
  int resolution_ = 0;
  std::vector<std::int32_t> slots_;
  std::vector<std::size_t> touched_;
};

struct Builder {
  LatticeIndex index;
  std::vector<std::array<int, 2>> lattice;  // per lattice vertex
  std::vector<std::array<std::uint32_t, 3>> live;
  std::vector<std::array<std::uint32_t, 3>> next;
  std::vector<std::uint32_t> polygon;
};

constexpr int kMaxLattice = 4096;

}  // namespace

TessellationPattern build_uv_tessellation(PatchKind kind, const ProjectedSeed& seed,
                                          TessellationParams params) {
  const int g = params.base;
  const int levels = params.levels;
  if (g < 2) throw Error(ErrorCategory::domain, "tessellation base grid must be >= 2");
  if (levels < 0) throw Error(ErrorCategory::domain, "tessellation levels must be >= 0");
  if (levels > 20 || static_cast<long long>(g) << levels > kMaxLattice) {
    std::ostringstream msg;
    msg << "tessellation g * 2^L exceeds " << kMaxLattice;
    throw Error(ErrorCategory::domain, msg.str());
  }
  const int resolution = g << levels;
  const double inv = 1.0 / resolution;

  thread_local Builder b;
  b.index.reset(resolution);
  b.lattice.clear();
  b.live.clear();

  TessellationPattern out;
  out.kind = kind;
  out.seed = UV(seed.u_star, seed.v_star);

  auto vertex = [&](int i, int j) -> std::uint32_t {
    std::int32_t id = b.index.find(i, j);
    if (id < 0) {
      id = static_cast<std::int32_t>(out.vertices.size());
      b.index.set(i, j, id);
      out.vertices.emplace_back(i * inv, j * inv);
      b.lattice.push_back({i, j});
    }
    return static_cast<std::uint32_t>(id);
  };

  const int step = 1 << levels;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (kind == PatchKind::tensor) {
        const auto a = vertex(i * step, j * step), c = vertex((i + 1) * step, j * step),
                   d = vertex((i + 1) * step, (j + 1) * step), e = vertex(i * step, (j + 1) * step);
        // Diagonals point toward the domain center, keeping the grid symmetric
        // under the square's reflections.
        if ((2 * i + 1 < g) == (2 * j + 1 < g)) {
          b.live.push_back({a, c, d});
          b.live.push_back({a, d, e});
        } else {
          b.live.push_back({a, c, e});
          b.live.push_back({c, d, e});
        }
      } else {
        if (i + j > g - 1) continue;
        const auto a = vertex(i * step, j * step), c = vertex((i + 1) * step, j * step),
                   e = vertex(i * step, (j + 1) * step);
        b.live.push_back({a, c, e});
        if (i + j <= g - 2) b.live.push_back({c, vertex((i + 1) * step, (j + 1) * step), e});
      }
    }

  const double diameter = std::sqrt(2.0);
  auto midpoint = [&](std::uint32_t p, std::uint32_t q) {
    const auto& lp = b.lattice[p];
    const auto& lq = b.lattice[q];
    return vertex((lp[0] + lq[0]) / 2, (lp[1] + lq[1]) / 2);
  };
  for (int round = 1; round <= levels; ++round) {
    const double threshold = diameter * std::ldexp(1.0, -round);
    b.next.clear();
    for (const auto& t : b.live) {
      const UV centroid = (out.vertices[t[0]] + out.vertices[t[1]] + out.vertices[t[2]]) / 3.0;
      if ((centroid - out.seed).norm() < threshold) {
        const auto m01 = midpoint(t[0], t[1]);
        const auto m12 = midpoint(t[1], t[2]);
        const auto m20 = midpoint(t[2], t[0]);
        b.next.push_back({t[0], m01, m20});
        b.next.push_back({m01, t[1], m12});
        b.next.push_back({m20, m12, t[2]});
        b.next.push_back({m01, m12, m20});
      } else {
        b.next.push_back(t);
      }
    }
    std::swap(b.live, b.next);
  }

  // Domain boundary at the finest spacing.
  if (levels > 0) {
    for (int s = 0; s <= resolution; ++s) {
      vertex(s, 0);
      vertex(0, s);
      if (kind == PatchKind::tensor) {
        vertex(s, resolution);
        vertex(resolution, s);
      } else {
        vertex(s, resolution - s);
      }
    }
  }

  // Hanging vertices on an edge are its recursive lattice midpoints.
  auto collect = [&](auto&& self, std::uint32_t p, std::uint32_t q) -> void {
    const auto& lp = b.lattice[p];
    const auto& lq = b.lattice[q];
    const int si = lp[0] + lq[0];
    const int sj = lp[1] + lq[1];
    if ((si & 1) || (sj & 1)) return;
    const std::int32_t m = b.index.find(si / 2, sj / 2);
    if (m < 0) return;
    self(self, p, static_cast<std::uint32_t>(m));
    b.polygon.push_back(static_cast<std::uint32_t>(m));
    self(self, static_cast<std::uint32_t>(m), q);
  };

  out.triangles.reserve(b.live.size() + 4 * static_cast<std::size_t>(resolution));
  for (const auto& t : b.live) {
    b.polygon.clear();
    for (int e = 0; e < 3; ++e) {
      b.polygon.push_back(t[e]);
      collect(collect, t[e], t[(e + 1) % 3]);
    }
    if (b.polygon.size() == 3) {
      out.triangles.push_back(t);
      continue;
    }
    const auto center = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.push_back((out.vertices[t[0]] + out.vertices[t[1]] + out.vertices[t[2]]) / 3.0);
    for (std::size_t k = 0; k < b.polygon.size(); ++k)
      out.triangles.push_back({center, b.polygon[k], b.polygon[(k + 1) % b.polygon.size()]});
  }

  out.centroids.reserve(out.triangles.size());
  for (const auto& t : out.triangles)
    out.centroids.push_back((out.vertices[t[0]] + out.vertices[t[1]] + out.vertices[t[2]]) / 3.0);
  return out;
}

}  // namespace bgc
