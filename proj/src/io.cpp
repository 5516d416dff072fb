#include "bgc/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace bgc {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& message) { throw Error(ErrorCategory::parse, message); }

void require_keys(const json& object, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!object.is_object()) parse_error(where + ": expected an object");
  for (const auto& [key, value] : object.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      parse_error(where + ": unknown field \"" + key + "\"");
  }
}

const json& field(const json& object, const char* key, const std::string& where) {
  const auto it = object.find(key);
  if (it == object.end()) parse_error(where + ": missing field \"" + key + "\"");
  return *it;
}

int integer(const json& value, const std::string& where) {
  if (!value.is_number_integer()) parse_error(where + ": expected an integer");
  const auto v = value.get<long long>();
  if (v < -1000000 || v > 1000000) parse_error(where + ": integer out of range");
  return static_cast<int>(v);
}

Vec3 point(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 3) parse_error(where + ": expected [x, y, z]");
  Vec3 p;
  for (int c = 0; c < 3; ++c) {
    if (!value[static_cast<std::size_t>(c)].is_number()) parse_error(where + ": coordinates must be numbers");
    p[c] = value[static_cast<std::size_t>(c)].get<double>();
  }
  return p;
}

std::vector<Vec3> point_list(const json& value, const std::string& where) {
  if (!value.is_array()) parse_error(where + ": expected an array of points");
  std::vector<Vec3> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(point(value[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
}

void check_header(const json& doc, const char* format) {
  const json& f = field(doc, "format", "document");
  if (!f.is_string() || f.get<std::string>() != format)
    parse_error(std::string("document: format must be \"") + format + "\"");
  if (integer(field(doc, "version", "document"), "document.version") != 1)
    parse_error("document: unsupported version");
}

// Reverses the orientation of a patch by swapping its parameters.
Patch flipped(const Patch& patch) {
  if (const auto* t = std::get_if<TensorPatch>(&patch)) {
    const int m = t->degree_u();
    const int n = t->degree_v();
    std::vector<Vec3> pts;
    pts.reserve(control_count(patch));
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= m; ++i) pts.push_back(t->at(i, j));
    return TensorPatch(n, m, std::move(pts));
  }
  const auto& tri = std::get<TrianglePatch>(patch);
  const int n = tri.degree();
  std::vector<Vec3> pts;
  pts.reserve(control_count(patch));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j) pts.push_back(tri.at(j, i));
  return TrianglePatch(n, std::move(pts));
}

std::string number(double x) { return json(x).dump(); }

std::string point_text(const Vec3& p) {
  return "[" + number(p.x()) + ", " + number(p.y()) + ", " + number(p.z()) + "]";
}

std::uint64_t fnv1a(std::uint64_t hash, const unsigned char* bytes, std::size_t size) {
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  unsigned char bytes[sizeof(T)];
  auto u = static_cast<std::make_unsigned_t<T>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) parse_error("coordinate file truncated");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
  return static_cast<T>(u);
}

void le_double_bytes(double x, unsigned char* out) {
  const auto u = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xffu);
}

constexpr char kMagic[4] = {'B', 'G', 'C', 'C'};

}  // namespace

// --- cages ------------------------------------------------------------------

Cage parse_cage(std::string_view text, bool validate) {
  const json doc = parse_json(text);
  require_keys(doc, {"format", "version", "orientation", "patches"}, "document");
  check_header(doc, "bgc-cage");
  bool inward = false;
  if (doc.contains("orientation")) {
    const json& o = doc["orientation"];
    if (!o.is_string() || (o != "outward" && o != "inward"))
      parse_error("document.orientation must be \"outward\" or \"inward\"");
    inward = o == "inward";
  }
  const json& list = field(doc, "patches", "document");
  if (!list.is_array() || list.empty()) parse_error("document.patches must be a non-empty array");
  std::vector<Patch> patches;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "patch " + std::to_string(k);
    const json& p = list[k];
    require_keys(p, {"kind", "degree", "points", "name"}, where);
    const json& kind = field(p, "kind", where);
    std::string name;
    if (p.contains("name")) {
      if (!p["name"].is_string()) parse_error(where + ": name must be a string");
      name = p["name"].get<std::string>();
    }
    std::vector<Vec3> pts = point_list(field(p, "points", where), where + ".points");
    const json& degree = field(p, "degree", where);
    try {
      if (kind == "tensor") {
        if (!degree.is_array() || degree.size() != 2) parse_error(where + ": tensor degree must be [m, n]");
        patches.emplace_back(TensorPatch(integer(degree[0], where + ".degree"), integer(degree[1], where + ".degree"),
                                         std::move(pts)));
      } else if (kind == "triangle") {
        patches.emplace_back(TrianglePatch(integer(degree, where + ".degree"), std::move(pts)));
      } else {
        parse_error(where + ": kind must be \"tensor\" or \"triangle\"");
      }
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::parse) throw;
      throw Error(e.category(), where + (name.empty() ? "" : " (" + name + ")") + ": " + e.what());
    }
    if (inward) patches.back() = flipped(patches.back());
    names.push_back(std::move(name));
  }
  Cage cage(std::move(patches), std::move(names));
  if (validate) require_valid(cage);
  return cage;
}

std::string write_cage(const Cage& cage) {
  std::string out;
  out += "{\n  \"format\": \"bgc-cage\",\n  \"version\": 1,\n  \"orientation\": \"outward\",\n  \"patches\": [\n";
  for (std::size_t k = 0; k < cage.size(); ++k) {
    const Patch& patch = cage.patch(k);
    out += "    {\n";
    if (const auto* t = std::get_if<TensorPatch>(&patch)) {
      out += "      \"kind\": \"tensor\",\n      \"degree\": [" + std::to_string(t->degree_u()) + ", " +
             std::to_string(t->degree_v()) + "],\n";
    } else {
      out += "      \"kind\": \"triangle\",\n      \"degree\": " +
             std::to_string(std::get<TrianglePatch>(patch).degree()) + ",\n";
    }
    if (!cage.name(k).empty()) out += "      \"name\": " + json(cage.name(k)).dump() + ",\n";
    out += "      \"points\": [\n";
    const auto pts = control_points(patch);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out += "        " + point_text(pts[i]);
      out += i + 1 < pts.size() ? ",\n" : "\n";
    }
    out += "      ]\n    }";
    out += k + 1 < cage.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

Cage load_cage(const std::filesystem::path& path, bool validate) { return parse_cage(read_text(path), validate); }

void save_cage(const std::filesystem::path& path, const Cage& cage) { write_text(path, write_cage(cage)); }

// --- OBJ --------------------------------------------------------------------

namespace {

struct ObjData {
  std::vector<Vec3> vertices;
  std::vector<std::vector<std::size_t>> faces;
};

double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size())
    parse_error("OBJ line " + std::to_string(line) + ": bad number \"" + std::string(token) + "\"");
  return value;
}

ObjData parse_obj_records(std::string_view text) {
  ObjData data;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tokens.empty()) continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) parse_error("OBJ line " + std::to_string(line_number) + ": vertex needs 3 coordinates");
      data.vertices.emplace_back(parse_double(tokens[1], line_number), parse_double(tokens[2], line_number),
                                 parse_double(tokens[3], line_number));
      if (!is_finite(data.vertices.back()))
        parse_error("OBJ line " + std::to_string(line_number) + ": non-finite vertex");
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) parse_error("OBJ line " + std::to_string(line_number) + ": face needs 3 corners");
      std::vector<std::size_t> face;
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        const std::string_view ref = tokens[t].substr(0, tokens[t].find('/'));
        long long index = 0;
        const auto [end_ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), index);
        if (ec != std::errc() || end_ptr != ref.data() + ref.size() || index == 0)
          parse_error("OBJ line " + std::to_string(line_number) + ": bad face index \"" + std::string(tokens[t]) + "\"");
        const auto count = static_cast<long long>(data.vertices.size());
        const long long resolved = index > 0 ? index - 1 : count + index;
        if (resolved < 0)
          throw Error(ErrorCategory::validation, "OBJ line " + std::to_string(line_number) + ": face index out of range");
        face.push_back(static_cast<std::size_t>(resolved));
      }
      data.faces.push_back(std::move(face));
    }
  }
  return data;
}

}  // namespace

EmbeddedMesh parse_obj(std::string_view text) {
  ObjData data = parse_obj_records(text);
  EmbeddedMesh mesh;
  mesh.vertices = std::move(data.vertices);
  for (const auto& face : data.faces)
    for (std::size_t k = 1; k + 1 < face.size(); ++k) mesh.faces.push_back({face[0], face[k], face[k + 1]});
  mesh.check_indices();
  return mesh;
}

std::string write_obj(const EmbeddedMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 64 + mesh.faces.size() * 24);
  char buffer[128];
  for (const Vec3& p : mesh.vertices) {
    std::snprintf(buffer, sizeof buffer, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out += buffer;
  }
  for (const auto& f : mesh.faces) {
    std::snprintf(buffer, sizeof buffer, "f %zu %zu %zu\n", f[0] + 1, f[1] + 1, f[2] + 1);
    out += buffer;
  }
  return out;
}

EmbeddedMesh read_mesh(const std::filesystem::path& path) { return parse_obj(read_text(path)); }

void write_mesh(const std::filesystem::path& path, const EmbeddedMesh& mesh) { write_text(path, write_obj(mesh)); }

QuadMesh parse_quad_obj(std::string_view text) {
  ObjData data = parse_obj_records(text);
  QuadMesh out;
  out.vertices = std::move(data.vertices);
  for (std::size_t f = 0; f < data.faces.size(); ++f) {
    const auto& face = data.faces[f];
    if (face.size() != 4) parse_error("face " + std::to_string(f) + " is not a quad");
    for (std::size_t c : face)
      if (c >= out.vertices.size())
        throw Error(ErrorCategory::validation, "face " + std::to_string(f) + " references a missing vertex");
    out.quads.push_back({{face[0], face[1], face[2], face[3]}});
  }
  if (out.quads.empty()) parse_error("no quad faces");
  return out;
}

// --- boundary loops -----------------------------------------------------------

std::vector<BoundaryLoop> parse_loops(std::string_view text) {
  const json doc = parse_json(text);
  require_keys(doc, {"format", "version", "loops"}, "document");
  check_header(doc, "bgc-loops");
  const json& list = field(doc, "loops", "document");
  if (!list.is_array() || list.empty()) parse_error("document.loops must be a non-empty array");
  std::vector<BoundaryLoop> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "loop " + std::to_string(k);
    const json& l = list[k];
    require_keys(l, {"u0", "u1", "v0", "v1", "name"}, where);
    BoundaryLoop loop;
    loop.u0 = point_list(field(l, "u0", where), where + ".u0");
    loop.u1 = point_list(field(l, "u1", where), where + ".u1");
    loop.v0 = point_list(field(l, "v0", where), where + ".v0");
    loop.v1 = point_list(field(l, "v1", where), where + ".v1");
    try {
      check_loop(loop);
    } catch (const Error& e) {
      throw Error(e.category(), where + ": " + e.what());
    }
    out.push_back(std::move(loop));
  }
  return out;
}

// --- coordinate files -------------------------------------------------------

std::uint64_t cage_hash(const Cage& cage) {
  const std::string text = write_cage(cage);
  return fnv1a(kFnvOffset, reinterpret_cast<const unsigned char*>(text.data()), text.size());
}

std::uint64_t mesh_hash(std::span<const Vec3> vertices) {
  std::uint64_t hash = kFnvOffset;
  unsigned char bytes[8];
  for (const Vec3& p : vertices)
    for (int c = 0; c < 3; ++c) {
      le_double_bytes(p[c], bytes);
      hash = fnv1a(hash, bytes, 8);
    }
  return hash;
}

void write_coordinates(std::ostream& out, const CoordinateFile& file) {
  const CoordinateTable& t = file.table;
  if (t.values.size() != t.vertex_count * t.layout.row_size())
    throw Error(ErrorCategory::mismatch, "coordinate table size does not match its layout");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kCoordinateFileVersion);
  put<std::uint64_t>(out, file.cage_hash);
  put<std::uint64_t>(out, file.mesh_hash);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(t.layout.variant));
  put<std::uint8_t>(out, t.projected ? 1 : 0);
  put<std::uint16_t>(out, 0);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.tessellation.base));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.tessellation.levels));
  put<std::uint64_t>(out, t.vertex_count);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.layout.patches.size()));
  for (const PatchLayout& p : t.layout.patches) {
    put<std::uint8_t>(out, p.kind == PatchKind::tensor ? 0 : 1);
    put<std::uint8_t>(out, 0);
    put<std::uint16_t>(out, 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.degree_u));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.degree_v));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.control_count));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.psi_count));
  }
  std::vector<unsigned char> buffer(t.values.size() * 8);
  for (std::size_t i = 0; i < t.values.size(); ++i) le_double_bytes(t.values[i], buffer.data() + 8 * i);
  out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw Error(ErrorCategory::io, "failed to write coordinate data");
}

CoordinateFile read_coordinates(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) parse_error("not a coordinate file (bad magic)");
  if (get<std::uint32_t>(in) != kCoordinateFileVersion) parse_error("unsupported coordinate file version");
  CoordinateFile file;
  file.cage_hash = get<std::uint64_t>(in);
  file.mesh_hash = get<std::uint64_t>(in);
  CoordinateTable& t = file.table;
  const auto variant = get<std::uint8_t>(in);
  if (variant > 1) parse_error("coordinate file: unknown Neumann variant");
  t.layout.variant = static_cast<NeumannVariant>(variant);
  const auto projected = get<std::uint8_t>(in);
  if (projected > 1) parse_error("coordinate file: bad projected flag");
  t.projected = projected == 1;
  get<std::uint16_t>(in);
  t.tessellation.base = static_cast<int>(get<std::uint32_t>(in));
  t.tessellation.levels = static_cast<int>(get<std::uint32_t>(in));
  t.vertex_count = get<std::uint64_t>(in);
  const auto patch_count = get<std::uint32_t>(in);
  if (patch_count == 0 || patch_count > 1000000) parse_error("coordinate file: bad patch count");
  for (std::uint32_t k = 0; k < patch_count; ++k) {
    PatchLayout p;
    const auto kind = get<std::uint8_t>(in);
    if (kind > 1) parse_error("coordinate file: bad patch kind");
    p.kind = kind == 0 ? PatchKind::tensor : PatchKind::triangle;
    get<std::uint8_t>(in);
    get<std::uint16_t>(in);
    p.degree_u = static_cast<int>(get<std::uint32_t>(in));
    p.degree_v = static_cast<int>(get<std::uint32_t>(in));
    p.control_count = get<std::uint32_t>(in);
    p.psi_count = get<std::uint32_t>(in);
    if (p.degree_u < 1 || p.degree_u > kMaxDegree || p.degree_v < 1 || p.degree_v > kMaxDegree)
      parse_error("coordinate file: bad patch degree");
    const std::size_t expected = p.kind == PatchKind::tensor
                                     ? static_cast<std::size_t>((p.degree_u + 1) * (p.degree_v + 1))
                                     : TrianglePatch::point_count(p.degree_u);
    const std::size_t expected_psi =
        t.layout.variant == NeumannVariant::normals ? expected : pair_count(expected);
    if (p.control_count != expected || p.psi_count != expected_psi ||
        (p.kind == PatchKind::triangle && p.degree_u != p.degree_v))
      parse_error("coordinate file: patch layout inconsistent with its degree");
    p.phi_offset = t.layout.phi_count;
    t.layout.phi_count += p.control_count;
    t.layout.patches.push_back(p);
  }
  for (PatchLayout& p : t.layout.patches) {
    p.psi_offset = t.layout.phi_count + t.layout.psi_count;
    t.layout.psi_count += p.psi_count;
  }
  const std::size_t row = t.layout.row_size();
  if (t.vertex_count > (std::size_t{1} << 40) / row) parse_error("coordinate file: vertex count too large");
  const std::size_t total = t.vertex_count * row;
  // Read in bounded chunks so a corrupt count cannot force a huge allocation.
  constexpr std::size_t kChunk = std::size_t{1} << 20;
  std::vector<unsigned char> buffer;
  t.values.reserve(std::min(total, kChunk));
  for (std::size_t done = 0; done < total;) {
    const std::size_t n = std::min(kChunk, total - done);
    buffer.resize(n * 8);
    if (!in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size())))
      parse_error("coordinate file truncated");
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t u = 0;
      for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(buffer[8 * i + b]) << (8 * b);
      t.values.push_back(std::bit_cast<double>(u));
    }
    done += n;
  }
  if (in.peek() != std::char_traits<char>::eof()) parse_error("coordinate file has trailing bytes");
  return file;
}

void save_coordinates(const std::filesystem::path& path, const CoordinateFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
  write_coordinates(out, file);
}

CoordinateFile load_coordinates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io, "cannot open " + path.string());
  return read_coordinates(in);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCategory::io, "failed to write " + path.string());
}

}  // namespace bgc
