#include "bgc/cage.hpp"
#include "bgc/coons.hpp"
#include "bgc/deformation.hpp"
#include "bgc/green.hpp"
#include "bgc/io.hpp"
#include "bgc/reproduction.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <optional>

using namespace bgc;

namespace {

// Exit status per error category; 0 is success.
int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::parse: return 3;
    case ErrorCategory::validation: return 4;
    case ErrorCategory::domain: return 5;
    case ErrorCategory::numeric: return 6;
    case ErrorCategory::mismatch: return 7;
    case ErrorCategory::io: return 8;
  }
  return 70;
}

constexpr int kUsageExit = 2;

int report(std::string_view category, const std::string& message, int code) {
  std::cerr << "error[" << category << "]: " << message << '\n';
  return code;
}

NeumannVariant parse_variant(const std::string& name) {
  if (name == "normals") return NeumannVariant::normals;
  return NeumannVariant::cross_product;
}

std::string variant_name(NeumannVariant v) { return v == NeumannVariant::normals ? "normals" : "crossprod"; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Reports exterior vertices with 1-based OBJ indices.
[[noreturn]] void rethrow_exterior(const ExteriorVerticesError& e) {
  std::string msg = std::to_string(e.indices().size()) + " mesh vertices outside the cage (OBJ vertex numbers):";
  const std::size_t shown = std::min<std::size_t>(e.indices().size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg += " " + std::to_string(e.indices()[i] + 1);
  if (shown < e.indices().size()) msg += " ...";
  throw Error(ErrorCategory::validation, msg);
}

CoordinateTable compute_table(const Cage& cage, const EmbeddedMesh& mesh, const CoordinateParams& params) {
  try {
    return cage_coordinates(cage, mesh.vertices, params);
  } catch (const ExteriorVerticesError& e) {
    rethrow_exterior(e);
  }
}

struct Stats {
  double max = 0.0;
  double mean = 0.0;
};

Stats reproduction_stats(const Cage& cage, const CoordinateTable& table, std::span<const Vec3> vertices) {
  const auto positions = stacked_control_points(cage);
  const auto neumann = neumann_vectors(cage, table.layout.variant);
  Stats s;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const double e = (reconstruct(table, v, positions, neumann) - vertices[v]).norm();
    s.max = std::max(s.max, e);
    s.mean += e;
  }
  if (!vertices.empty()) s.mean /= static_cast<double>(vertices.size());
  return s;
}

Stats unity_stats(const CoordinateTable& table) {
  Stats s;
  for (std::size_t v = 0; v < table.vertex_count; ++v) {
    const auto phi = table.phi(v);
    const double e = std::abs(std::accumulate(phi.begin(), phi.end(), 0.0) - 1.0);
    s.max = std::max(s.max, e);
    s.mean += e;
  }
  if (table.vertex_count) s.mean /= static_cast<double>(table.vertex_count);
  return s;
}

void print_stats(const char* label, const Stats& s) { std::printf("%s: max %.6e mean %.6e\n", label, s.max, s.mean); }

void check_hashes(const CoordinateFile& file, const Cage& cage, const EmbeddedMesh& mesh) {
  if (file.cage_hash != cage_hash(cage))
    throw Error(ErrorCategory::mismatch, "coordinate file was computed for a different cage");
  if (file.mesh_hash != mesh_hash(mesh.vertices))
    throw Error(ErrorCategory::mismatch, "coordinate file was computed for a different mesh");
  if (file.table.vertex_count != mesh.vertices.size())
    throw Error(ErrorCategory::mismatch, "coordinate file vertex count differs from the mesh");
  if (!(file.table.layout == make_layout(cage, file.table.layout.variant)))
    throw Error(ErrorCategory::mismatch, "coordinate file layout differs from the cage");
}

struct CoordsArgs {
  std::string cage, mesh, out, variant = "normals";
  int grid = 8, levels = 4;
  bool project = true;
  unsigned threads = 0;
};

void run_coords(const CoordsArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const Cage cage = load_cage(a.cage);
  const EmbeddedMesh mesh = read_mesh(a.mesh);
  CoordinateParams params;
  params.tessellation = {a.grid, a.levels};
  params.variant = parse_variant(a.variant);
  params.threads = a.threads;
  CoordinateFile file;
  file.table = compute_table(cage, mesh, params);
  if (a.project) project_table(constraint_matrix(cage, params.variant), mesh.vertices, file.table);
  file.cage_hash = cage_hash(cage);
  file.mesh_hash = mesh_hash(mesh.vertices);
  save_coordinates(a.out, file);
  std::printf("vertices: %zu\nrow size: %zu\nvariant: %s\nprojected: %s\nskipped elements: %zu\nseconds: %.3f\n",
              file.table.vertex_count, file.table.layout.row_size(), variant_name(params.variant).c_str(),
              file.table.projected ? "yes" : "no", file.table.skipped_elements, seconds_since(start));
}

struct DeformArgs {
  std::string coords, cage, target, mesh, out;
  int sigma_res = 16;
  bool project = true;
  unsigned threads = 0;
};

void run_deform(const DeformArgs& a) {
  const Cage cage = load_cage(a.cage);
  const Cage target = load_cage(a.target, false);
  const EmbeddedMesh mesh = read_mesh(a.mesh);
  CoordinateFile file = load_coordinates(a.coords);
  check_hashes(file, cage, mesh);
  require_congruent(cage, target);
  if (a.project && !file.table.projected)
    project_table(constraint_matrix(cage, file.table.layout.variant), mesh.vertices, file.table);
  const SigmaFactors sigma = cage_sigma(cage, target, a.sigma_res, file.table.layout.variant);
  EmbeddedMesh out;
  out.vertices = apply_deformation(file.table, target, sigma, a.threads);
  out.faces = mesh.faces;
  write_mesh(a.out, out);
}

struct CoonsArgs {
  std::string loops, out;
  std::vector<int> degree;
  bool validate = true;
};

void run_coons(const CoonsArgs& a) {
  const auto loops = parse_loops(read_text(a.loops));
  std::vector<Patch> patches;
  for (std::size_t k = 0; k < loops.size(); ++k) {
    try {
      patches.emplace_back(fill_interior(loops[k], a.degree[0], a.degree[1]));
    } catch (const Error& e) {
      throw Error(e.category(), "loop " + std::to_string(k) + ": " + e.what());
    }
  }
  const Cage cage(std::move(patches));
  if (a.validate) require_valid(cage);
  save_cage(a.out, cage);
}

struct ElevateArgs {
  std::string quads, out;
  int degree = 3;
};

void run_elevate(const ElevateArgs& a) {
  const QuadMesh quads = parse_quad_obj(read_text(a.quads));
  const Cage cage = elevate_quad_cage(quads.vertices, quads.quads, a.degree);
  require_valid(cage);
  save_cage(a.out, cage);
}

struct ValidateArgs {
  std::string cage, mesh, coords, variant = "normals";
  int grid = 8, levels = 4;
  unsigned threads = 0;
};

int run_validate(const ValidateArgs& a) {
  const Cage cage = load_cage(a.cage, false);
  const ValidationReport report = validate_cage(cage);
  std::printf("patches: %zu\ndiameter: %.17g\ncage valid: %s\n", cage.size(), cage.diameter(),
              report.passed() ? "yes" : "no");
  if (!report.passed()) {
    std::printf("%s\n", report.summary().c_str());
    throw Error(ErrorCategory::validation, "cage failed validation");
  }
  NeumannVariant variant = parse_variant(a.variant);
  std::optional<CoordinateFile> file;
  std::optional<EmbeddedMesh> mesh;
  if (!a.mesh.empty()) mesh = read_mesh(a.mesh);
  if (!a.coords.empty()) {
    file = load_coordinates(a.coords);
    check_hashes(*file, cage, *mesh);
    variant = file->table.layout.variant;
  }
  const ConstraintSystem system = constraint_matrix(cage, variant);
  std::printf("variant: %s\nrank(A): %d\nposition rank: %d\ngram condition: %.6e\n", variant_name(variant).c_str(),
              system.rank(), position_rank(cage), system.gram_condition());
  if (!mesh) return 0;

  CoordinateTable table;
  if (file) {
    table = std::move(file->table);
  } else {
    CoordinateParams params;
    params.tessellation = {a.grid, a.levels};
    params.variant = variant;
    params.threads = a.threads;
    table = compute_table(cage, *mesh, params);
  }
  std::printf("vertices: %zu\n", mesh->vertices.size());
  const double diameter = cage.diameter();
  if (!table.projected) {
    const Stats raw = reproduction_stats(cage, table, mesh->vertices);
    print_stats("raw reproduction error", raw);
    std::printf("raw reproduction error / diameter: max %.6e\n", raw.max / diameter);
    print_stats("raw partition of unity residual", unity_stats(table));
    project_table(system, mesh->vertices, table);
  }
  const Stats projected = reproduction_stats(cage, table, mesh->vertices);
  print_stats("projected reproduction error", projected);
  std::printf("projected reproduction error / diameter: max %.6e\n", projected.max / diameter);
  print_stats("projected partition of unity residual", unity_stats(table));
  return 0;
}

struct TessellateArgs {
  std::string cage, out;
  int res = 16;
};

void run_tessellate(const TessellateArgs& a) {
  const Cage cage = load_cage(a.cage, false);
  write_mesh(a.out, tessellate_cage(cage, a.res));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green coordinates for Bezier-patch cages"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  CoordsArgs coords;
  auto* c = app.add_subcommand("coords", "Precompute coordinates of mesh vertices inside a cage");
  c->add_option("--cage", coords.cage, "Source cage (JSON)")->required();
  c->add_option("--mesh", coords.mesh, "Embedded mesh (OBJ)")->required();
  c->add_option("--out", coords.out, "Coordinate file to write")->required();
  c->add_option("--grid", coords.grid, "Base tessellation grid g")->capture_default_str();
  c->add_option("--levels", coords.levels, "Refinement levels L")->capture_default_str();
  c->add_option("--variant", coords.variant, "Neumann variant")
      ->check(CLI::IsMember({"normals", "crossprod"}))
      ->capture_default_str();
  c->add_flag("--project,!--no-project", coords.project, "Store projected coordinates (default) or raw ones");
  c->add_option("--threads", coords.threads, "Worker threads (0: all cores)");

  DeformArgs deform;
  auto* d = app.add_subcommand("deform", "Deform a mesh by moving its cage");
  d->add_option("--coords", deform.coords, "Coordinate file")->required();
  d->add_option("--cage", deform.cage, "Source cage")->required();
  d->add_option("--target", deform.target, "Deformed cage with the same patch structure")->required();
  d->add_option("--mesh", deform.mesh, "Embedded mesh the coordinates were computed for")->required();
  d->add_option("--out", deform.out, "Deformed mesh (OBJ)")->required();
  d->add_option("--sigma-res", deform.sigma_res, "Midpoint samples per side for sigma (>= 4)")->capture_default_str();
  d->add_flag("--project,!--no-project", deform.project, "Project raw coordinates on load (default)");
  d->add_option("--threads", deform.threads, "Worker threads (0: all cores)");

  CoonsArgs coons;
  auto* co = app.add_subcommand("coons", "Build patches from boundary loops by Coons interpolation");
  co->add_option("--loops", coons.loops, "Boundary loops (JSON)")->required();
  co->add_option("--degree", coons.degree, "Patch degree m n")->required()->expected(2)->check(CLI::Range(1, kMaxDegree));
  co->add_option("--out", coons.out, "Cage to write")->required();
  co->add_flag("--validate,!--no-validate", coons.validate, "Require a closed, consistently oriented cage (default)");

  ElevateArgs elevate;
  auto* e = app.add_subcommand("elevate", "Elevate a quad mesh to a cage of degree-(d, d) patches");
  e->add_option("--quads", elevate.quads, "Quad mesh (OBJ)")->required();
  e->add_option("--degree", elevate.degree, "Target degree d")->required();
  e->add_option("--out", elevate.out, "Cage to write")->required();

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "Check a cage and report reproduction quality");
  v->add_option("--cage", validate.cage, "Cage (JSON)")->required();
  auto* vm = v->add_option("--mesh", validate.mesh, "Mesh to evaluate");
  v->add_option("--coords", validate.coords, "Precomputed coordinates for the mesh")->needs(vm);
  v->add_option("--grid", validate.grid, "Base tessellation grid g when computing")->capture_default_str();
  v->add_option("--levels", validate.levels, "Refinement levels L when computing")->capture_default_str();
  v->add_option("--variant", validate.variant, "Neumann variant when computing")
      ->check(CLI::IsMember({"normals", "crossprod"}))
      ->capture_default_str();
  v->add_option("--threads", validate.threads, "Worker threads (0: all cores)");

  TessellateArgs tess;
  auto* t = app.add_subcommand("tessellate", "Write a triangle mesh of the cage surface");
  t->add_option("--cage", tess.cage, "Cage (JSON)")->required();
  t->add_option("--res", tess.res, "Samples per patch side")->capture_default_str();
  t->add_option("--out", tess.out, "Mesh to write (OBJ)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& p) {
    return report("usage", p.what(), kUsageExit);
  }

  try {
    if (c->parsed()) run_coords(coords);
    if (d->parsed()) run_deform(deform);
    if (co->parsed()) run_coons(coons);
    if (e->parsed()) run_elevate(elevate);
    if (v->parsed()) return run_validate(validate);
    if (t->parsed()) run_tessellate(tess);
  } catch (const Error& err) {
    return report(to_string(err.category()), err.what(), exit_code(err.category()));
  } catch (const std::bad_alloc&) {
    return report("resource", "out of memory", 71);
  } catch (const std::exception& err) {
    return report("internal", err.what(), 70);
  }
  return 0;
}
