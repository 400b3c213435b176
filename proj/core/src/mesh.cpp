#include "opident/mesh.hpp"

#include <stdexcept>

namespace opident {

Mesh build_mesh(int n_y) {
  if (n_y < 1) {
    throw std::invalid_argument("build_mesh: n_y must be >= 1");
  }
  Mesh mesh;
  mesh.n_y = n_y;
  const int n = n_y + 1;
  const double h = 1.0 / n_y;

  mesh.vertices.reserve(static_cast<std::size_t>(n) * n);
  mesh.boundary_mask.reserve(static_cast<std::size_t>(n) * n);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      mesh.vertices.push_back({col * h, row * h});
      const bool on_boundary = row == 0 || row == n_y || col == 0 || col == n_y;
      mesh.boundary_mask.push_back(on_boundary ? 1 : 0);
    }
  }

  mesh.triangles.reserve(2u * n_y * n_y);
  for (int row = 0; row < n_y; ++row) {
    for (int col = 0; col < n_y; ++col) {
      const int v00 = mesh.vertex_index(row, col);
      const int v10 = mesh.vertex_index(row, col + 1);
      const int v01 = mesh.vertex_index(row + 1, col);
      const int v11 = mesh.vertex_index(row + 1, col + 1);
      // split along the v00 -- v11 diagonal
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

double triangle_area(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles.at(static_cast<std::size_t>(t));
  const auto& a = mesh.vertices[tri[0]];
  const auto& b = mesh.vertices[tri[1]];
  const auto& c = mesh.vertices[tri[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

}  // namespace opident
