#ifndef OPIDENT_MESH_HPP
#define OPIDENT_MESH_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace opident {

/// Uniform right-triangle mesh of the unit square (0,1)^2 with n_y cells per
/// side. Every grid square is split along its bottom-left-to-top-right
/// diagonal, giving 2*n_y^2 triangles of area h^2/2 on (n_y+1)^2 vertices.
/// Vertices are ordered lexicographically by (row, column), triangles by
/// square in the same order (lower triangle first).
struct Mesh {
  int n_y = 0;
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;   // counterclockwise
  std::vector<std::uint8_t> boundary_mask;     // 1 iff vertex lies on the boundary

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  double width() const { return 1.0 / n_y; }

  /// Index of the vertex in grid position (row, col), row = y-direction.
  int vertex_index(int row, int col) const { return row * (n_y + 1) + col; }
};

/// Builds the mesh for a given number of cells per side. Throws
/// std::invalid_argument for n_y < 1.
Mesh build_mesh(int n_y);

/// Signed area of triangle t (positive for counterclockwise orientation).
double triangle_area(const Mesh& mesh, int t);

}  // namespace opident

#endif
