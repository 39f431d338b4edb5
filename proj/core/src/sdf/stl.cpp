#include "trigrid/sdf/surface.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace trigrid {

namespace {

std::vector<std::array<Vec3, 3>> parse_binary(const std::string& bytes) {
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + 80, 4);
  std::vector<std::array<Vec3, 3>> soup;
  soup.reserve(count);
  const char* rec = bytes.data() + 84;
  for (std::uint32_t i = 0; i < count; ++i, rec += 50) {
    float f[12];
    std::memcpy(f, rec, sizeof(f));
    std::array<Vec3, 3> tri;
    for (int k = 0; k < 3; ++k) {
      tri[k] = Vec3(f[3 + 3 * k], f[4 + 3 * k], f[5 + 3 * k]);
    }
    soup.push_back(tri);
  }
  return soup;
}

std::vector<std::array<Vec3, 3>> parse_ascii(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::array<Vec3, 3>> soup;
  std::array<Vec3, 3> tri;
  int corner = 0;
  std::string token;
  while (in >> token) {
    if (token == "vertex") {
      double x, y, z;
      if (!(in >> x >> y >> z)) throw GeometryError("ASCII STL: malformed vertex");
      if (corner >= 3) throw GeometryError("ASCII STL: facet with more than three vertices");
      tri[corner++] = Vec3(x, y, z);
    } else if (token == "endfacet") {
      if (corner != 3) throw GeometryError("ASCII STL: facet without three vertices");
      soup.push_back(tri);
      corner = 0;
    }
  }
  return soup;
}

}  // namespace

TriangleSurface read_stl(const std::filesystem::path& path, double weld_tolerance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeometryError("cannot open STL file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  bool binary = false;
  if (bytes.size() >= 84) {
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    binary = bytes.size() == 84 + 50ull * count;
  }
  if (!binary && bytes.rfind("solid", 0) != 0) {
    throw GeometryError("unrecognised STL file " + path.string());
  }
  const auto soup = binary ? parse_binary(bytes) : parse_ascii(bytes);
  if (soup.empty()) throw GeometryError("STL file has no triangles: " + path.string());
  return TriangleSurface::from_soup(soup, weld_tolerance);
}

void write_stl_binary(const std::filesystem::path& path, const TriangleSurface& surface) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError("cannot write STL file " + path.string());
  char header[80] = {};
  std::strncpy(header, "trigrid binary stl", sizeof(header) - 1);
  out.write(header, 80);
  const auto count = static_cast<std::uint32_t>(surface.triangles.size());
  out.write(reinterpret_cast<const char*>(&count), 4);
  for (std::size_t t = 0; t < surface.triangles.size(); ++t) {
    float f[12];
    const Vec3& n = surface.normals[t];
    f[0] = static_cast<float>(n.x());
    f[1] = static_cast<float>(n.y());
    f[2] = static_cast<float>(n.z());
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = surface.vertices[surface.triangles[t][k]];
      f[3 + 3 * k] = static_cast<float>(v.x());
      f[4 + 3 * k] = static_cast<float>(v.y());
      f[5 + 3 * k] = static_cast<float>(v.z());
    }
    out.write(reinterpret_cast<const char*>(f), sizeof(f));
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), 2);
  }
}

void write_stl_ascii(const std::filesystem::path& path, const TriangleSurface& surface) {
  std::ofstream out(path);
  if (!out) throw GeometryError("cannot write STL file " + path.string());
  out.precision(17);
  out << "solid trigrid\n";
  for (std::size_t t = 0; t < surface.triangles.size(); ++t) {
    const Vec3& n = surface.normals[t];
    out << "  facet normal " << n.x() << " " << n.y() << " " << n.z() << "\n    outer loop\n";
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = surface.vertices[surface.triangles[t][k]];
      out << "      vertex " << v.x() << " " << v.y() << " " << v.z() << "\n";
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid trigrid\n";
}

}  // namespace trigrid
