#include "bgc/io.hpp"

#include "../support/shapes.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace bgc;

namespace {

const char* kCubeText = R"({
  "format": "bgc-cage", "version": 1,
  "patches": [
    {"kind": "tensor", "degree": [1, 1], "name": "bottom", "points": [[0,0,0],[1,0,0],[0,1,0],[1,1,0]]},
    {"kind": "tensor", "degree": [1, 1], "name": "top",    "points": [[0,0,1],[0,1,1],[1,0,1],[1,1,1]]},
    {"kind": "tensor", "degree": [1, 1], "points": [[0,0,0],[0,0,1],[1,0,0],[1,0,1]]},
    {"kind": "tensor", "degree": [1, 1], "points": [[0,1,0],[1,1,0],[0,1,1],[1,1,1]]},
    {"kind": "tensor", "degree": [1, 1], "points": [[0,0,0],[0,1,0],[0,0,1],[0,1,1]]},
    {"kind": "tensor", "degree": [1, 1], "points": [[1,0,0],[1,0,1],[1,1,0],[1,1,1]]}
  ]
})";

ErrorCategory category_of(const auto& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected an error");
  return ErrorCategory::io;
}

std::string message_of(const auto& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

CoordinateFile sample_file() {
  const Cage cube = test::unit_cube();
  const std::vector<Vec3> points = {{0.5, 0.5, 0.5}, {0.25, 0.5, 0.75}};
  CoordinateFile file;
  file.table = cage_coordinates(cube, points, {});
  file.cage_hash = cage_hash(cube);
  file.mesh_hash = mesh_hash(points);
  return file;
}

}  // namespace

TEST_SUITE("cli-io") {
  TEST_CASE("cube document parses and validates") {
    const Cage cube = parse_cage(kCubeText);
    CHECK(cube.size() == 6);
    CHECK(cube.name(0) == "bottom");
    CHECK(cube.name(2).empty());
    CHECK(validate_cage(cube).passed());
  }

  TEST_CASE("wrong point count names the patch") {
    std::string text = R"({"format": "bgc-cage", "version": 1, "patches": [
      {"kind": "tensor", "degree": [3, 3], "name": "lid", "points": [)";
    for (int i = 0; i < 15; ++i) text += std::string(i ? "," : "") + "[0,0," + std::to_string(i) + "]";
    text += "]}]}";
    const std::string message = message_of([&] { parse_cage(text, false); });
    CHECK(message.find("patch 0 (lid)") != std::string::npos);
    CHECK(category_of([&] { parse_cage(text, false); }) == ErrorCategory::validation);
  }

  TEST_CASE("unknown and malformed fields are rejected") {
    CHECK(category_of([] { parse_cage(replace(kCubeText, "\"version\": 1", "\"version\": 1, \"units\": \"m\"")); }) ==
          ErrorCategory::parse);
    CHECK(category_of([] { parse_cage(replace(kCubeText, "\"name\": \"top\"", "\"weight\": 2")); }) ==
          ErrorCategory::parse);
    CHECK(category_of([] { parse_cage(replace(kCubeText, "bgc-cage", "cage")); }) == ErrorCategory::parse);
    CHECK(category_of([] { parse_cage(replace(kCubeText, "[0,0,1],[0,1,1]", "[0,0,1],[0,1]")); }) ==
          ErrorCategory::parse);
    CHECK(category_of([] { parse_cage("{\"format\": "); }) == ErrorCategory::parse);
    CHECK(category_of([] { parse_cage(replace(kCubeText, "\"tensor\"", "\"nurbs\"")); }) == ErrorCategory::parse);
  }

  TEST_CASE("invalid cages are rejected unless validation is skipped") {
    const std::string open = replace(kCubeText, "[1,0,0],[1,0,1],[1,1,0],[1,1,1]", "[1,0,0],[1,0,1],[1,1,0],[1,1,2]");
    CHECK(category_of([&] { parse_cage(open); }) == ErrorCategory::validation);
    CHECK(parse_cage(open, false).size() == 6);
  }

  TEST_CASE("canonical text round-trips byte for byte") {
    for (const Cage& cage : {test::unit_cube(), test::rounded_cube(), test::bulged_octahedron(), test::triangular_prism()}) {
      const std::string text = write_cage(cage);
      const Cage back = parse_cage(text);
      CHECK(write_cage(back) == text);
      CHECK(cage_hash(back) == cage_hash(cage));
      for (std::size_t k = 0; k < cage.size(); ++k) {
        const auto a = control_points(cage.patch(k));
        const auto b = control_points(back.patch(k));
        CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
      }
    }
  }

  TEST_CASE("inward orientation is flipped on load") {
    const Cage cube = parse_cage(kCubeText);
    std::vector<Patch> patches;
    for (const Patch& p : cube.patches()) {
      const auto& t = std::get<TensorPatch>(p);
      patches.emplace_back(TensorPatch(1, 1, {t.at(0, 0), t.at(1, 0), t.at(0, 1), t.at(1, 1)}));
    }
    const Cage flipped_cube(patches);
    CHECK(validate_cage(flipped_cube).inverted);
    const std::string text = replace(write_cage(flipped_cube), "\"outward\"", "\"inward\"");
    const Cage loaded = parse_cage(text);
    CHECK(validate_cage(loaded).passed());
  }

  TEST_CASE("OBJ meshes") {
    const EmbeddedMesh mesh = parse_obj(
        "# comment\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\nf -4 -2 -1\n");
    CHECK(mesh.vertices.size() == 4);
    CHECK(mesh.faces.size() == 3);
    CHECK(mesh.faces[2] == std::array<std::size_t, 3>{0, 2, 3});
    const EmbeddedMesh back = parse_obj(write_obj(mesh));
    CHECK(back.vertices == mesh.vertices);
    CHECK(back.faces == mesh.faces);

    EmbeddedMesh odd;
    odd.vertices = {{0.1, 1.0 / 3.0, -2e-300}};
    CHECK(parse_obj(write_obj(odd)).vertices == odd.vertices);

    CHECK(category_of([] { parse_obj("v 0 0 0\nf 1 2 3\n"); }) == ErrorCategory::validation);
    CHECK(category_of([] { parse_obj("v 0 zero 0\n"); }) == ErrorCategory::parse);
  }

  TEST_CASE("quad OBJ for elevation") {
    const QuadMesh q = parse_quad_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    CHECK(q.quads.size() == 1);
    CHECK(q.quads[0].corners == std::array<std::size_t, 4>{0, 1, 2, 3});
    CHECK(category_of([] { parse_quad_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nf 1 2 3\n"); }) == ErrorCategory::parse);
  }

  TEST_CASE("boundary loops") {
    const auto loops = parse_loops(R"({"format": "bgc-loops", "version": 1, "loops": [
      {"u0": [[0,0,0],[0,1,0]], "u1": [[1,0,0],[1,1,0]], "v0": [[0,0,0],[1,0,0]], "v1": [[0,1,0],[1,1,0]]}]})");
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].v1.back() == Vec3(1, 1, 0));
    const std::string broken = R"({"format": "bgc-loops", "version": 1, "loops": [
      {"u0": [[0,0,0],[0,1,0]], "u1": [[1,0,0],[1,1,0]], "v0": [[0,0,0],[1,0,0]], "v1": [[0,1,0],[1,1,1]]}]})";
    CHECK(message_of([&] { parse_loops(broken); }).find("loop 0") != std::string::npos);
  }

  TEST_CASE("coordinate files round-trip exactly") {
    const CoordinateFile file = sample_file();
    std::stringstream buffer;
    write_coordinates(buffer, file);
    const CoordinateFile back = read_coordinates(buffer);
    CHECK(back.cage_hash == file.cage_hash);
    CHECK(back.mesh_hash == file.mesh_hash);
    CHECK(back.table.layout == file.table.layout);
    CHECK(back.table.tessellation.base == file.table.tessellation.base);
    CHECK(back.table.tessellation.levels == file.table.tessellation.levels);
    CHECK(back.table.projected == file.table.projected);
    CHECK(back.table.values == file.table.values);

    const std::filesystem::path path = std::filesystem::temp_directory_path() / "bgc_io_test.bin";
    save_coordinates(path, file);
    CHECK(load_coordinates(path).table.values == file.table.values);
    std::filesystem::remove(path);
    CHECK(category_of([&] { load_coordinates(path); }) == ErrorCategory::io);
  }

  TEST_CASE("corrupt coordinate files are rejected") {
    std::stringstream buffer;
    write_coordinates(buffer, sample_file());
    const std::string bytes = buffer.str();

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    std::stringstream a(bad_magic);
    CHECK(category_of([&] { read_coordinates(a); }) == ErrorCategory::parse);

    std::stringstream b(bytes.substr(0, bytes.size() - 3));
    CHECK(message_of([&] { read_coordinates(b); }).find("truncated") != std::string::npos);

    std::stringstream c(bytes + "x");
    CHECK(category_of([&] { read_coordinates(c); }) == ErrorCategory::parse);
  }

  TEST_CASE("hashes distinguish inputs") {
    CHECK(cage_hash(test::unit_cube()) != cage_hash(test::box_cage(0, 1, 2)));
    const std::vector<Vec3> a = {{0, 0, 0}}, b = {{0, 0, 1e-300}};
    CHECK(mesh_hash(a) != mesh_hash(b));
  }
}
