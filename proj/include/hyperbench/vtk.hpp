#pragma once

#include <ostream>
#include <vector>

#include "hyperbench/csv.hpp"
#include "hyperbench/fem2d.hpp"

namespace hyperbench {

// Legacy ASCII VTK unstructured grid: deformed points, quad cells,
// point-data displacement vectors, cell-data jacobian and cell-averaged
// Cauchy stress components (11,22,33,12,13,23).
inline void write_vtk(std::ostream& os, const Mesh& mesh, const std::vector<double>& u,
                      const std::vector<double>& cell_J,
                      const std::vector<SymTensor2>& cell_sigma, const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";

  os << "POINTS " << mesh.nodes.size() << " double\n";
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
    os << fmt17(mesh.nodes[n][0] + u[2 * n]) << " " << fmt17(mesh.nodes[n][1] + u[2 * n + 1])
       << " 0\n";

  os << "CELLS " << mesh.quads.size() << " " << 5 * mesh.quads.size() << "\n";
  for (const auto& q : mesh.quads)
    os << "4 " << q[0] << " " << q[1] << " " << q[2] << " " << q[3] << "\n";
  os << "CELL_TYPES " << mesh.quads.size() << "\n";
  for (std::size_t e = 0; e < mesh.quads.size(); ++e) os << "9\n";

  os << "POINT_DATA " << mesh.nodes.size() << "\n";
  os << "VECTORS displacement double\n";
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
    os << fmt17(u[2 * n]) << " " << fmt17(u[2 * n + 1]) << " 0\n";

  os << "CELL_DATA " << mesh.quads.size() << "\n";
  os << "SCALARS jacobian double 1\nLOOKUP_TABLE default\n";
  for (double j : cell_J) os << fmt17(j) << "\n";
  os << "FIELD stress 1\nsigma 6 " << mesh.quads.size() << " double\n";
  for (const SymTensor2& s : cell_sigma)
    os << fmt17(s[0]) << " " << fmt17(s[1]) << " " << fmt17(s[2]) << " " << fmt17(s[3]) << " "
       << fmt17(s[4]) << " " << fmt17(s[5]) << "\n";
}

}  // namespace hyperbench
