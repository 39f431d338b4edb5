#include "trigrid/io/vtk.hpp"

#include "trigrid/fem/solution.hpp"

#include <fstream>
#include <sstream>

namespace trigrid {

namespace {

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(10);
  return out;
}

void header(std::ostream& out, const std::string& title, const char* type) {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET " << type << "\n";
}

struct CellSet {
  std::vector<Vec3> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> types;
};

void write_unstructured(std::ostream& out, const CellSet& s) {
  out << "POINTS " << s.points.size() << " double\n";
  for (const auto& p : s.points) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  std::size_t size = 0;
  for (const auto& c : s.cells) size += c.size() + 1;
  out << "CELLS " << s.cells.size() << ' ' << size << '\n';
  for (const auto& c : s.cells) {
    out << c.size();
    for (int i : c) out << ' ' << i;
    out << '\n';
  }
  out << "CELL_TYPES " << s.cells.size() << '\n';
  for (int t : s.types) out << t << '\n';
}

constexpr int kVtkTriangle = 5;
constexpr int kVtkTetra = 10;
constexpr int kVtkHexahedron = 12;
// VTK hexahedron vertex order in terms of the (x, y, z) bit corner index.
constexpr int kHexOrder[8] = {0, 1, 3, 2, 4, 5, 7, 6};

void add_hex(CellSet& s, const Box3& b) {
  std::vector<int> c;
  for (int k : kHexOrder) {
    c.push_back(static_cast<int>(s.points.size()));
    s.points.emplace_back(k & 1 ? b.hi[0] : b.lo[0], k & 2 ? b.hi[1] : b.lo[1], k & 4 ? b.hi[2] : b.lo[2]);
  }
  s.cells.push_back(c);
  s.types.push_back(kVtkHexahedron);
}

}  // namespace

int write_band_vtk(const std::filesystem::path& directory, const SparseDistanceGrid& grid) {
  std::filesystem::create_directories(directory);
  int files = 0;
  constexpr int B = SparseDistanceGrid::kBlock;
  grid.for_each_block([&](const SparseDistanceGrid::Index3& b, const double* values) {
    std::ostringstream name;
    name << "block_" << b[0] << '_' << b[1] << '_' << b[2] << ".vtk";
    auto out = open(directory / name.str());
    header(out, "narrow band block", "STRUCTURED_POINTS");
    const Vec3 origin = grid.node_position({b[0] * B, b[1] * B, b[2] * B});
    out << "DIMENSIONS " << B << ' ' << B << ' ' << B << '\n';
    out << "ORIGIN " << origin[0] << ' ' << origin[1] << ' ' << origin[2] << '\n';
    out << "SPACING " << grid.spacing() << ' ' << grid.spacing() << ' ' << grid.spacing() << '\n';
    out << "POINT_DATA " << B * B * B << "\nSCALARS phi double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < B * B * B; ++i) out << values[i] << '\n';
    ++files;
  });
  return files;
}

void write_grid_vtk(const std::filesystem::path& path, const FeGrid& grid, const Partition* partition) {
  CellSet s;
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) add_hex(s, grid.cell_box(i));
  auto out = open(path);
  header(out, "finite element grid", "UNSTRUCTURED_GRID");
  write_unstructured(out, s);
  out << "CELL_DATA " << grid.size() << "\nSCALARS class int 1\nLOOKUP_TABLE default\n";
  for (const auto& c : grid.leaves()) out << static_cast<int>(c.label) << '\n';
  out << "SCALARS level int 1\nLOOKUP_TABLE default\n";
  for (const auto& c : grid.leaves()) out << c.level << '\n';
  if (partition) {
    out << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
    for (int d : partition->subdomain) out << d << '\n';
  }
}

void write_decomposition_vtk(const std::filesystem::path& path, const std::vector<Tet>& tets,
                             const std::vector<BoundaryTriangle>& triangles) {
  CellSet s;
  for (const auto& t : tets) {
    std::vector<int> c;
    for (const auto& v : t.v) {
      c.push_back(static_cast<int>(s.points.size()));
      s.points.push_back(v);
    }
    s.cells.push_back(c);
    s.types.push_back(kVtkTetra);
  }
  for (const auto& t : triangles) {
    std::vector<int> c;
    for (const auto& v : t.v) {
      c.push_back(static_cast<int>(s.points.size()));
      s.points.push_back(v);
    }
    s.cells.push_back(c);
    s.types.push_back(kVtkTriangle);
  }
  auto out = open(path);
  header(out, "cut cell decomposition", "UNSTRUCTURED_GRID");
  write_unstructured(out, s);
  out << "CELL_DATA " << s.cells.size() << "\nSCALARS kind int 1\nLOOKUP_TABLE default\n";
  for (int t : s.types) out << (t == kVtkTetra ? 0 : 1) << '\n';
}

void write_solution_vtk(const std::filesystem::path& path, const FeGrid& grid, const DofMap& dofs,
                        const FeSolution& solution, const CutCellQuadrature& quad) {
  CellSet s;
  std::vector<double> u;
  for (int leaf : dofs.cells()) {
    const std::size_t first = s.points.size();
    if (grid.leaf(leaf).label == CellClass::Active) {
      add_hex(s, grid.cell_box(leaf));
    } else {
      const CellDecomposition dec = quad.decomposition(leaf);
      for (const auto& c : dec.cells) add_hex(s, c.box);
      for (const auto& t : dec.tets) {
        std::vector<int> c;
        for (const auto& v : t.v) {
          c.push_back(static_cast<int>(s.points.size()));
          s.points.push_back(v);
        }
        s.cells.push_back(c);
        s.types.push_back(kVtkTetra);
      }
    }
    for (std::size_t p = first; p < s.points.size(); ++p) u.push_back(solution.value_in(leaf, s.points[p]));
  }
  auto out = open(path);
  header(out, "solution", "UNSTRUCTURED_GRID");
  write_unstructured(out, s);
  out << "POINT_DATA " << s.points.size() << "\nSCALARS u double 1\nLOOKUP_TABLE default\n";
  for (double v : u) out << v << '\n';
}

}  // namespace trigrid
