#include "bgc/cage.hpp"

#include "bgc/bezier.hpp"
#include "bgc/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <unordered_map>

namespace bgc {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::mismatch: return "mismatch";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

namespace {

void check_points(std::span<const Vec3> points, std::size_t expected, const char* what) {
  if (points.size() != expected) {
    std::ostringstream msg;
    msg << what << " expects " << expected << " control points, got " << points.size();
    throw Error(ErrorCategory::validation, msg.str());
  }
  for (const Vec3& p : points)
    if (!is_finite(p)) throw Error(ErrorCategory::validation, std::string(what) + " has a non-finite control point");
}

void check_degree(int degree, const char* what) {
  if (degree < 1 || degree > kMaxDegree) {
    std::ostringstream msg;
    msg << what << " degree " << degree << " outside [1, " << kMaxDegree << "]";
    throw Error(ErrorCategory::validation, msg.str());
  }
}

// Bitwise key of a point, so that -0.0 and 0.0 are distinct like the rest of
// the exact-sharing rules.
struct PointKey {
  std::array<std::uint64_t, 3> bits;
  bool operator==(const PointKey&) const = default;
  bool operator<(const PointKey& o) const { return bits < o.bits; }
};

PointKey key_of(const Vec3& p) {
  return {std::bit_cast<std::uint64_t>(p.x()), std::bit_cast<std::uint64_t>(p.y()),
          std::bit_cast<std::uint64_t>(p.z())};
}

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t b : k.bits) h = (h ^ b) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

double net_area(const Patch& patch) {
  double area = 0.0;
  if (const auto* t = std::get_if<TensorPatch>(&patch)) {
    for (int i = 0; i < t->degree_u(); ++i)
      for (int j = 0; j < t->degree_v(); ++j) {
        const Vec3 d1 = t->at(i + 1, j + 1) - t->at(i, j);
        const Vec3 d2 = t->at(i, j + 1) - t->at(i + 1, j);
        area += 0.5 * d1.cross(d2).norm();
      }
    return area;
  }
  const auto& tri = std::get<TrianglePatch>(patch);
  const int n = tri.degree();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n - i; ++j) {
      const Vec3& a = tri.at(i, j);
      area += 0.5 * (tri.at(i + 1, j) - a).cross(tri.at(i, j + 1) - a).norm();
    }
  return area;
}

}  // namespace

TensorPatch::TensorPatch(int degree_u, int degree_v, std::vector<Vec3> control_points)
    : degree_u_(degree_u), degree_v_(degree_v), points_(std::move(control_points)) {
  check_degree(degree_u, "tensor patch");
  check_degree(degree_v, "tensor patch");
  check_points(points_, static_cast<std::size_t>((degree_u + 1) * (degree_v + 1)), "tensor patch");
}

TrianglePatch::TrianglePatch(int degree, std::vector<Vec3> control_points)
    : degree_(degree), points_(std::move(control_points)) {
  check_degree(degree, "triangle patch");
  check_points(points_, point_count(degree), "triangle patch");
}

PatchKind kind_of(const Patch& patch) {
  return std::holds_alternative<TensorPatch>(patch) ? PatchKind::tensor : PatchKind::triangle;
}

std::span<const Vec3> control_points(const Patch& patch) {
  return std::visit([](const auto& p) { return p.control_points(); }, patch);
}

std::size_t control_count(const Patch& patch) { return control_points(patch).size(); }

Patch with_points(const Patch& patch, std::vector<Vec3> points) {
  if (const auto* t = std::get_if<TensorPatch>(&patch))
    return TensorPatch(t->degree_u(), t->degree_v(), std::move(points));
  return TrianglePatch(std::get<TrianglePatch>(patch).degree(), std::move(points));
}

bool same_shape(const Patch& a, const Patch& b) {
  if (kind_of(a) != kind_of(b)) return false;
  if (const auto* ta = std::get_if<TensorPatch>(&a)) {
    const auto& tb = std::get<TensorPatch>(b);
    return ta->degree_u() == tb.degree_u() && ta->degree_v() == tb.degree_v();
  }
  return std::get<TrianglePatch>(a).degree() == std::get<TrianglePatch>(b).degree();
}

std::vector<std::vector<Vec3>> boundary_polylines(const Patch& patch) {
  std::vector<std::vector<Vec3>> sides;
  if (const auto* t = std::get_if<TensorPatch>(&patch)) {
    const int m = t->degree_u();
    const int n = t->degree_v();
    sides.resize(4);
    for (int i = 0; i <= m; ++i) sides[0].push_back(t->at(i, 0));
    for (int j = 0; j <= n; ++j) sides[1].push_back(t->at(m, j));
    for (int i = m; i >= 0; --i) sides[2].push_back(t->at(i, n));
    for (int j = n; j >= 0; --j) sides[3].push_back(t->at(0, j));
    return sides;
  }
  const auto& tri = std::get<TrianglePatch>(patch);
  const int n = tri.degree();
  sides.resize(3);
  for (int i = 0; i <= n; ++i) sides[0].push_back(tri.at(i, 0));
  for (int i = n; i >= 0; --i) sides[1].push_back(tri.at(i, n - i));
  for (int j = n; j >= 0; --j) sides[2].push_back(tri.at(0, j));
  return sides;
}

Cage::Cage(std::vector<Patch> patches, std::vector<std::string> names)
    : patches_(std::move(patches)), names_(std::move(names)) {
  if (patches_.empty()) throw Error(ErrorCategory::validation, "cage has no patches");
  if (names_.empty()) names_.resize(patches_.size());
  if (names_.size() != patches_.size())
    throw Error(ErrorCategory::validation, "cage patch names do not match the patch count");
}

double Cage::diameter() const {
  std::vector<Vec3> pts;
  for (const Patch& p : patches_) {
    const auto cp = control_points(p);
    pts.insert(pts.end(), cp.begin(), cp.end());
  }
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) best = std::max(best, (pts[a] - pts[b]).squaredNorm());
  return std::sqrt(best);
}

Vec3 Cage::centroid() const {
  Vec3 sum = Vec3::Zero();
  std::size_t count = 0;
  for (const Patch& p : patches_)
    for (const Vec3& q : control_points(p)) {
      sum += q;
      ++count;
    }
  return sum / static_cast<double>(count);
}

void EmbeddedMesh::check_indices() const {
  for (std::size_t f = 0; f < faces.size(); ++f)
    for (std::size_t idx : faces[f])
      if (idx >= vertices.size()) {
        std::ostringstream msg;
        msg << "face " << f << " references vertex " << idx << " but the mesh has " << vertices.size()
            << " vertices";
        throw Error(ErrorCategory::validation, msg.str());
      }
}

std::string ValidationReport::summary() const {
  if (passed()) return "cage is closed and consistently oriented";
  std::ostringstream out;
  auto list = [&](const char* label, const std::vector<BoundaryIssue>& issues) {
    if (issues.empty()) return;
    out << issues.size() << ' ' << label << ':';
    for (const auto& b : issues) out << " (patch " << b.patch << ", side " << b.side << ')';
    out << "; ";
  };
  list("unmatched boundary polylines", unmatched);
  list("orientation conflicts", orientation_conflicts);
  if (!degenerate_patches.empty()) {
    out << degenerate_patches.size() << " degenerate patches:";
    for (auto k : degenerate_patches) out << ' ' << k;
    out << "; ";
  }
  if (inverted) out << "normals point inward; ";
  std::string s = out.str();
  if (s.size() >= 2) s.resize(s.size() - 2);
  return s;
}

ValidationReport validate_cage(const Cage& cage) {
  ValidationReport report;
  using Polyline = std::vector<PointKey>;
  struct Entry {
    std::size_t patch;
    std::size_t side;
    Polyline keys;
  };
  std::vector<Entry> entries;
  std::map<Polyline, std::vector<std::size_t>> by_polyline;
  for (std::size_t k = 0; k < cage.size(); ++k) {
    const auto sides = boundary_polylines(cage.patch(k));
    for (std::size_t s = 0; s < sides.size(); ++s) {
      Polyline keys;
      keys.reserve(sides[s].size());
      for (const Vec3& p : sides[s]) keys.push_back(key_of(p));
      by_polyline[keys].push_back(entries.size());
      entries.push_back({k, s, std::move(keys)});
    }
  }
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const Entry& entry = entries[e];
    Polyline reversed(entry.keys.rbegin(), entry.keys.rend());
    std::size_t reverse_matches = 0;
    if (auto it = by_polyline.find(reversed); it != by_polyline.end())
      for (std::size_t other : it->second)
        if (other != e && entries[other].patch != entry.patch) ++reverse_matches;
    if (reverse_matches == 1) continue;
    std::size_t same_matches = 0;
    for (std::size_t other : by_polyline[entry.keys])
      if (other != e && entries[other].patch != entry.patch) ++same_matches;
    if (reverse_matches == 0 && same_matches > 0)
      report.orientation_conflicts.push_back({entry.patch, entry.side});
    else
      report.unmatched.push_back({entry.patch, entry.side});
  }

  const double diam = cage.diameter();
  for (std::size_t k = 0; k < cage.size(); ++k)
    if (net_area(cage.patch(k)) <= 1e-14 * diam * diam) report.degenerate_patches.push_back(k);

  if (report.passed()) {
    // Enclosed volume by the divergence theorem on a fine sampling.
    const EmbeddedMesh surface = tessellate_cage(cage, 8);
    double volume = 0.0;
    for (const auto& f : surface.faces)
      volume += surface.vertices[f[0]].dot(surface.vertices[f[1]].cross(surface.vertices[f[2]]));
    report.inverted = volume < 0.0;
  }
  return report;
}

void require_valid(const Cage& cage) {
  const ValidationReport report = validate_cage(cage);
  if (!report.passed()) throw Error(ErrorCategory::validation, "invalid cage: " + report.summary());
}

namespace {

// ((d - k) a + k b) / d with the endpoints taken in ascending index order, so
// both quads sharing an edge produce identical bits.
Vec3 edge_point(std::span<const Vec3> vertices, std::size_t from, std::size_t to, int k, int d) {
  if (from > to) {
    std::swap(from, to);
    k = d - k;
  }
  const double t = static_cast<double>(k) / d;
  if (k == 0) return vertices[from];
  if (k == d) return vertices[to];
  return (1.0 - t) * vertices[from] + t * vertices[to];
}

}  // namespace

Cage elevate_quad_cage(std::span<const Vec3> vertices, std::span<const Quad> quads, int degree) {
  if (degree < 1 || degree > kMaxDegree) {
    std::ostringstream msg;
    msg << "elevation degree " << degree << " outside [1, " << kMaxDegree << "]";
    throw Error(ErrorCategory::domain, msg.str());
  }
  if (quads.empty()) throw Error(ErrorCategory::validation, "quad cage is empty");
  std::vector<Patch> patches;
  patches.reserve(quads.size());
  const int d = degree;
  for (std::size_t qi = 0; qi < quads.size(); ++qi) {
    const auto& c = quads[qi].corners;
    for (std::size_t a = 0; a < 4; ++a) {
      if (c[a] >= vertices.size()) {
        std::ostringstream msg;
        msg << "quad " << qi << " references vertex " << c[a] << " out of range";
        throw Error(ErrorCategory::validation, msg.str());
      }
    }
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = a + 1; b < 4; ++b)
        if (c[a] == c[b] || key_of(vertices[c[a]]) == key_of(vertices[c[b]])) {
          std::ostringstream msg;
          msg << "quad " << qi << " is degenerate (repeated corner)";
          throw Error(ErrorCategory::validation, msg.str());
        }
    const Vec3& q0 = vertices[c[0]];
    const Vec3& q1 = vertices[c[1]];
    const Vec3& q2 = vertices[c[2]];
    const Vec3& q3 = vertices[c[3]];
    std::vector<Vec3> pts(static_cast<std::size_t>((d + 1) * (d + 1)));
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j) {
        Vec3 p;
        if (j == 0) p = edge_point(vertices, c[0], c[1], i, d);
        else if (j == d) p = edge_point(vertices, c[3], c[2], i, d);
        else if (i == 0) p = edge_point(vertices, c[0], c[3], j, d);
        else if (i == d) p = edge_point(vertices, c[1], c[2], j, d);
        else {
          const double u = static_cast<double>(i) / d;
          const double v = static_cast<double>(j) / d;
          p = (1 - u) * (1 - v) * q0 + u * (1 - v) * q1 + u * v * q2 + v * (1 - u) * q3;
        }
        pts[static_cast<std::size_t>(i * (d + 1) + j)] = p;
      }
    patches.emplace_back(TensorPatch(d, d, std::move(pts)));
  }
  return Cage(std::move(patches));
}

EmbeddedMesh tessellate_cage(const Cage& cage, int resolution) {
  if (resolution < 1) throw Error(ErrorCategory::domain, "tessellation resolution must be >= 1");
  EmbeddedMesh mesh;
  std::unordered_map<PointKey, std::size_t, PointKeyHash> welded;
  auto vertex = [&](const Vec3& p) {
    auto [it, inserted] = welded.try_emplace(key_of(p), mesh.vertices.size());
    if (inserted) mesh.vertices.push_back(p);
    return it->second;
  };
  const int r = resolution;
  for (const Patch& patch : cage.patches()) {
    if (kind_of(patch) == PatchKind::tensor) {
      std::vector<std::size_t> ids(static_cast<std::size_t>((r + 1) * (r + 1)));
      for (int i = 0; i <= r; ++i)
        for (int j = 0; j <= r; ++j)
          ids[static_cast<std::size_t>(i * (r + 1) + j)] =
              vertex(patch_point(patch, static_cast<double>(i) / r, static_cast<double>(j) / r));
      auto id = [&](int i, int j) { return ids[static_cast<std::size_t>(i * (r + 1) + j)]; };
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
          mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
          mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    } else {
      std::map<std::pair<int, int>, std::size_t> ids;
      for (int i = 0; i <= r; ++i)
        for (int j = 0; j <= r - i; ++j)
          ids[{i, j}] = vertex(patch_point(patch, static_cast<double>(i) / r, static_cast<double>(j) / r));
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r - i; ++j) {
          mesh.faces.push_back({ids[{i, j}], ids[{i + 1, j}], ids[{i, j + 1}]});
          if (i + j <= r - 2) mesh.faces.push_back({ids[{i + 1, j}], ids[{i + 1, j + 1}], ids[{i, j + 1}]});
        }
    }
  }
  return mesh;
}

double mesh_solid_angle(const EmbeddedMesh& surface, const Vec3& probe) {
  double total = 0.0;
  for (const auto& f : surface.faces)
    total += signed_solid_angle(surface.vertices[f[0]], surface.vertices[f[1]], surface.vertices[f[2]], probe);
  return total;
}

std::vector<std::size_t> exterior_points(const EmbeddedMesh& surface, std::span<const Vec3> points,
                                         double tolerance) {
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!(std::abs(mesh_solid_angle(surface, points[i]) - kFourPi) < tolerance)) outside.push_back(i);
  return outside;
}

}  // namespace bgc
