#include "bgc/bezier.hpp"
#include "bgc/cage.hpp"
#include "bgc/control_normals.hpp"
#include "bgc/coons.hpp"
#include "bgc/deformation.hpp"
#include "bgc/green.hpp"
#include "bgc/io.hpp"
#include "bgc/kernels.hpp"
#include "bgc/reproduction.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace bgc;

namespace {

using Points = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Vec3> to_points(const Points& array) {
  if (array.ndim() != 2 || array.shape(1) != 3) throw Error(ErrorCategory::domain, "expected an (n, 3) array");
  const auto a = array.unchecked<2>();
  std::vector<Vec3> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[static_cast<std::size_t>(i)] = Vec3(a(i, 0), a(i, 1), a(i, 2));
  return out;
}

py::array_t<double> from_points(std::span<const Vec3> points) {
  py::array_t<double> out({static_cast<py::ssize_t>(points.size()), py::ssize_t{3}});
  auto o = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (int c = 0; c < 3; ++c) o(static_cast<py::ssize_t>(i), c) = points[i][c];
  return out;
}

py::array_t<double> block(const CoordinateTable& t, std::size_t offset, std::size_t width) {
  py::array_t<double> out({static_cast<py::ssize_t>(t.vertex_count), static_cast<py::ssize_t>(width)});
  auto o = out.mutable_unchecked<2>();
  for (std::size_t v = 0; v < t.vertex_count; ++v)
    for (std::size_t i = 0; i < width; ++i) o(static_cast<py::ssize_t>(v), static_cast<py::ssize_t>(i)) = t.row(v)[offset + i];
  return out;
}

NeumannVariant variant_of(const std::string& name) {
  if (name == "normals") return NeumannVariant::normals;
  if (name == "crossprod") return NeumannVariant::cross_product;
  throw Error(ErrorCategory::domain, "variant must be \"normals\" or \"crossprod\"");
}

std::string variant_name(NeumannVariant v) { return v == NeumannVariant::normals ? "normals" : "crossprod"; }

Patch make_patch(const std::string& kind, const std::vector<int>& degree, const Points& points) {
  if (kind == "tensor") {
    if (degree.size() != 2) throw Error(ErrorCategory::domain, "tensor degree must be (m, n)");
    return TensorPatch(degree[0], degree[1], to_points(points));
  }
  if (kind == "triangle") {
    if (degree.size() != 1) throw Error(ErrorCategory::domain, "triangle degree must be (n,)");
    return TrianglePatch(degree[0], to_points(points));
  }
  throw Error(ErrorCategory::domain, "kind must be \"tensor\" or \"triangle\"");
}

py::dict patch_dict(const Patch& patch) {
  py::dict d;
  if (const auto* t = std::get_if<TensorPatch>(&patch)) {
    d["kind"] = "tensor";
    d["degree"] = py::make_tuple(t->degree_u(), t->degree_v());
  } else {
    d["kind"] = "triangle";
    d["degree"] = py::make_tuple(std::get<TrianglePatch>(patch).degree());
  }
  d["points"] = from_points(control_points(patch));
  return d;
}

}  // namespace

PYBIND11_MODULE(_bgc, m) {
  m.doc() = "Green coordinates for cages made of Bezier patches";

  static py::exception<Error> error(m, "BgcError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ExteriorVerticesError& e) {
      py::object value = py::handle(error.ptr())(e.what());
      value.attr("category") = std::string(to_string(e.category()));
      value.attr("indices") = e.indices();
      PyErr_SetObject(error.ptr(), value.ptr());
    } catch (const Error& e) {
      py::object value = py::handle(error.ptr())(e.what());
      value.attr("category") = std::string(to_string(e.category()));
      PyErr_SetObject(error.ptr(), value.ptr());
    }
  });

  py::class_<Cage>(m, "Cage")
      .def(py::init([](const std::vector<py::dict>& patches) {
             std::vector<Patch> out;
             for (const py::dict& p : patches) {
               std::vector<int> degree;
               for (py::handle d : py::iter(p["degree"])) degree.push_back(d.cast<int>());
               out.push_back(make_patch(p["kind"].cast<std::string>(), degree, p["points"].cast<Points>()));
             }
             return Cage(std::move(out));
           }),
           py::arg("patches"), "Build from dicts with keys kind, degree and points.")
      .def("__len__", &Cage::size)
      .def("patch", [](const Cage& c, std::size_t k) { return patch_dict(c.patch(k)); })
      .def_property_readonly("diameter", &Cage::diameter)
      .def_property_readonly("control_points", [](const Cage& c) { return from_points(stacked_control_points(c)); })
      .def("validate", [](const Cage& c) {
        const ValidationReport r = validate_cage(c);
        py::dict d;
        d["passed"] = r.passed();
        d["inverted"] = r.inverted;
        d["unmatched"] = r.unmatched.size();
        d["orientation_conflicts"] = r.orientation_conflicts.size();
        d["degenerate_patches"] = r.degenerate_patches;
        d["summary"] = r.summary();
        return d;
      })
      .def("point", [](const Cage& c, std::size_t k, double u, double v) {
        const Vec3 p = patch_point(c.patch(k), u, v);
        return py::make_tuple(p.x(), p.y(), p.z());
      })
      .def("normal", [](const Cage& c, std::size_t k, double u, double v) {
        const Patch& patch = c.patch(k);
        const Vec3 n = surface_normal(patch, control_net_normals(patch), u, v);
        return py::make_tuple(n.x(), n.y(), n.z());
      });

  m.def("parse_cage", &parse_cage, py::arg("text"), py::arg("validate") = true);
  m.def("write_cage", &write_cage);
  m.def("load_cage", &load_cage, py::arg("path"), py::arg("validate") = true);
  m.def("save_cage", &save_cage);
  m.def("elevate_quads", [](const Points& vertices, const std::vector<std::array<std::size_t, 4>>& quads, int degree) {
    std::vector<Quad> q;
    for (const auto& c : quads) q.push_back({c});
    return elevate_quad_cage(to_points(vertices), q, degree);
  });
  m.def("coons_patch", [](const Points& u0, const Points& u1, const Points& v0, const Points& v1, int m_, int n_) {
    const BoundaryLoop loop{to_points(u0), to_points(u1), to_points(v0), to_points(v1)};
    return patch_dict(fill_interior(loop, m_, n_));
  });
  m.def("tessellate", [](const Cage& c, int resolution) {
    const EmbeddedMesh mesh = tessellate_cage(c, resolution);
    py::array_t<std::int64_t> faces({static_cast<py::ssize_t>(mesh.faces.size()), py::ssize_t{3}});
    auto f = faces.mutable_unchecked<2>();
    for (std::size_t i = 0; i < mesh.faces.size(); ++i)
      for (int c = 0; c < 3; ++c) f(static_cast<py::ssize_t>(i), c) = static_cast<std::int64_t>(mesh.faces[i][c]);
    return py::make_tuple(from_points(mesh.vertices), faces);
  });

  m.def("signed_solid_angle", [](const Points& tri, const Points& eta) {
    const auto t = to_points(tri);
    const auto e = to_points(eta);
    if (t.size() != 3 || e.size() != 1) throw Error(ErrorCategory::domain, "expected a (3, 3) triangle and a (1, 3) point");
    return signed_solid_angle(t[0], t[1], t[2], e[0]);
  });
  m.def("green_integral", [](const Points& tri, const Points& eta) {
    const auto t = to_points(tri);
    const auto e = to_points(eta);
    if (t.size() != 3 || e.size() != 1) throw Error(ErrorCategory::domain, "expected a (3, 3) triangle and a (1, 3) point");
    return green_integral_triangle(t[0], t[1], t[2], e[0]);
  });

  py::class_<CoordinateTable>(m, "Coordinates")
      .def_property_readonly("phi", [](const CoordinateTable& t) { return block(t, 0, t.layout.phi_count); })
      .def_property_readonly("psi", [](const CoordinateTable& t) { return block(t, t.layout.phi_count, t.layout.psi_count); })
      .def_property_readonly("projected", [](const CoordinateTable& t) { return t.projected; })
      .def_property_readonly("variant", [](const CoordinateTable& t) { return variant_name(t.layout.variant); })
      .def_property_readonly("grid", [](const CoordinateTable& t) { return t.tessellation.base; })
      .def_property_readonly("levels", [](const CoordinateTable& t) { return t.tessellation.levels; })
      .def("__len__", [](const CoordinateTable& t) { return t.vertex_count; });

  m.def(
      "coordinates",
      [](const Cage& cage, const Points& vertices, int grid, int levels, const std::string& variant, bool project,
         unsigned threads) {
        const std::vector<Vec3> points = to_points(vertices);
        CoordinateParams params;
        params.tessellation = {grid, levels};
        params.variant = variant_of(variant);
        params.threads = threads;
        CoordinateTable table;
        {
          py::gil_scoped_release release;
          table = cage_coordinates(cage, points, params);
          if (project) project_table(constraint_matrix(cage, params.variant), points, table);
        }
        return table;
      },
      py::arg("cage"), py::arg("vertices"), py::arg("grid") = 8, py::arg("levels") = 4,
      py::arg("variant") = "normals", py::arg("project") = true, py::arg("threads") = 0);

  m.def(
      "project",
      [](const Cage& cage, const Points& vertices, CoordinateTable table) {
        project_table(constraint_matrix(cage, table.layout.variant), to_points(vertices), table);
        return table;
      },
      py::arg("cage"), py::arg("vertices"), py::arg("coordinates"));

  m.def("constraint_rank", [](const Cage& cage, const std::string& variant) {
    return constraint_matrix(cage, variant_of(variant)).rank();
  }, py::arg("cage"), py::arg("variant") = "normals");

  m.def(
      "sigma",
      [](const Cage& source, const Cage& target, int resolution, const std::string& variant) {
        return cage_sigma(source, target, resolution, variant_of(variant)).values;
      },
      py::arg("source"), py::arg("target"), py::arg("resolution") = 16, py::arg("variant") = "normals");

  m.def(
      "deform",
      [](const CoordinateTable& table, const Cage& source, const Cage& target, int sigma_resolution, unsigned threads) {
        std::vector<Vec3> out;
        {
          py::gil_scoped_release release;
          require_congruent(source, target);
          const SigmaFactors sigma = cage_sigma(source, target, sigma_resolution, table.layout.variant);
          out = apply_deformation(table, target, sigma, threads);
        }
        return from_points(out);
      },
      py::arg("coordinates"), py::arg("source"), py::arg("target"), py::arg("sigma_resolution") = 16,
      py::arg("threads") = 0);

  m.def("save_coordinates", [](const std::filesystem::path& path, const CoordinateTable& table, const Cage& cage,
                               const Points& vertices) {
    CoordinateFile file;
    file.table = table;
    file.cage_hash = cage_hash(cage);
    file.mesh_hash = mesh_hash(to_points(vertices));
    save_coordinates(path, file);
  });
  m.def("load_coordinates", [](const std::filesystem::path& path) { return load_coordinates(path).table; });
}
