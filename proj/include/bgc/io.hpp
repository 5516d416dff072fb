#pragma once

#include "bgc/cage.hpp"
#include "bgc/coons.hpp"
#include "bgc/green.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bgc {

// Cage text format (JSON):
//   { "format": "bgc-cage", "version": 1, "orientation": "outward",
//     "patches": [ { "kind": "tensor", "degree": [m, n], "points": [[x,y,z], ...],
//                    "name": "optional" },
//                  { "kind": "triangle", "degree": n, "points": [...] } ] }
// Tensor points are i-major, triangle points lexicographic in (i, j).
// "orientation": "inward" is accepted and flipped on load.

/// Strict parse; unknown fields are rejected. Validates the cage unless
/// `validate` is false.
Cage parse_cage(std::string_view text, bool validate = true);
/// Canonical text: write_cage(parse_cage(write_cage(c))) == write_cage(c).
std::string write_cage(const Cage& cage);

Cage load_cage(const std::filesystem::path& path, bool validate = true);
void save_cage(const std::filesystem::path& path, const Cage& cage);

/// OBJ subset: `v x y z` and `f a b c ...` records (polygons fan-triangulated,
/// `a/b/c` index forms and negative indices accepted); everything else ignored.
EmbeddedMesh parse_obj(std::string_view text);
std::string write_obj(const EmbeddedMesh& mesh);
EmbeddedMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const EmbeddedMesh& mesh);

/// Quad cage input for elevation: an OBJ whose faces all have four corners.
struct QuadMesh {
  std::vector<Vec3> vertices;
  std::vector<Quad> quads;
};
QuadMesh parse_quad_obj(std::string_view text);

// Boundary-loop format (JSON):
//   { "format": "bgc-loops", "version": 1,
//     "loops": [ { "u0": [[x,y,z],...], "u1": [...], "v0": [...], "v1": [...],
//                  "name": "optional" } ] }
// u0 = s(0, v), u1 = s(1, v), v0 = s(u, 0), v1 = s(u, 1), each by increasing parameter.
std::vector<BoundaryLoop> parse_loops(std::string_view text);

// Coordinate file (binary, little-endian):
//   magic "BGCC", u32 version (1), u64 cage hash, u64 mesh hash, u8 variant,
//   u8 projected, u16 reserved, u32 g, u32 L, u64 vertex count, u32 patch count,
//   per patch { u8 kind, u8 pad[3], u32 degree_u, u32 degree_v, u32 phi count,
//   u32 psi count }, then per vertex the phi block followed by the psi block as
//   f64.
inline constexpr std::uint32_t kCoordinateFileVersion = 1;

/// FNV-1a over the canonical cage text.
std::uint64_t cage_hash(const Cage& cage);
/// FNV-1a over the little-endian bytes of the vertex positions.
std::uint64_t mesh_hash(std::span<const Vec3> vertices);

struct CoordinateFile {
  std::uint64_t cage_hash = 0;
  std::uint64_t mesh_hash = 0;
  CoordinateTable table;
};

void write_coordinates(std::ostream& out, const CoordinateFile& file);
CoordinateFile read_coordinates(std::istream& in);
void save_coordinates(const std::filesystem::path& path, const CoordinateFile& file);
CoordinateFile load_coordinates(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace bgc
