#include "opident/fem.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <utility>

namespace opident {

bool SparseSpdMatrix::is_symmetric(double tol) const {
  Eigen::SparseMatrix<double> diff = mat - Eigen::SparseMatrix<double>(mat.transpose());
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) {
      if (std::abs(it.value()) > tol) return false;
    }
  }
  return true;
}

NodalField::NodalField(std::shared_ptr<const Mesh> m, Eigen::VectorXd v)
    : mesh(std::move(m)), values(std::move(v)) {
  if (values.size() != mesh->vertex_count()) {
    throw std::invalid_argument("NodalField: value count does not match vertex count");
  }
}

SparseSpdMatrix assemble_stiffness(const Mesh& mesh) {
  const int n = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9u * mesh.triangles.size());

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& a = mesh.vertices[tri[0]];
    const auto& b = mesh.vertices[tri[1]];
    const auto& c = mesh.vertices[tri[2]];
    const double area = triangle_area(mesh, t);
    // grad(phi_i) = perp(opposite edge) / (2 area)
    const double gx[3] = {(b[1] - c[1]) / (2 * area), (c[1] - a[1]) / (2 * area),
                          (a[1] - b[1]) / (2 * area)};
    const double gy[3] = {(c[0] - b[0]) / (2 * area), (a[0] - c[0]) / (2 * area),
                          (b[0] - a[0]) / (2 * area)};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        trips.emplace_back(tri[i], tri[j], area * (gx[i] * gx[j] + gy[i] * gy[j]));
      }
    }
  }

  SparseSpdMatrix out;
  out.mat.resize(n, n);
  out.mat.setFromTriplets(trips.begin(), trips.end());
  out.mat.makeCompressed();
  return out;
}

SparseSpdMatrix assemble_lumped_mass(const Mesh& mesh) {
  const int n = mesh.vertex_count();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double third = triangle_area(mesh, t) / 3.0;
    for (int i = 0; i < 3; ++i) diag[mesh.triangles[t][i]] += third;
  }
  SparseSpdMatrix out;
  out.mat.resize(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n);
  for (int i = 0; i < n; ++i) trips.emplace_back(i, i, diag[i]);
  out.mat.setFromTriplets(trips.begin(), trips.end());
  out.mat.makeCompressed();
  return out;
}

SparseSpdMatrix assemble_consistent_mass(const Mesh& mesh) {
  const int n = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9u * mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = triangle_area(mesh, t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        trips.emplace_back(tri[i], tri[j], area * (i == j ? 2.0 : 1.0) / 12.0);
      }
    }
  }
  SparseSpdMatrix out;
  out.mat.resize(n, n);
  out.mat.setFromTriplets(trips.begin(), trips.end());
  out.mat.makeCompressed();
  return out;
}

Eigen::VectorXd solve_spd(const SparseSpdMatrix& a, const Eigen::VectorXd& b, double tol) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a.mat);
  if (ldlt.info() != Eigen::Success) {
    throw SolverError("solve_spd: Cholesky factorization failed", 0.0, 0);
  }
  const double bound = tol * (1.0 + b.norm());
  Eigen::VectorXd x = ldlt.solve(b);
  Eigen::VectorXd r = b - a.mat * x;
  for (int pass = 0; pass < 3 && r.norm() > bound; ++pass) {
    x += ldlt.solve(r);
    r = b - a.mat * x;
  }
  if (r.norm() > bound) {
    throw SolverError("solve_spd: residual above tolerance", r.norm(), 3);
  }
  return x;
}

DirichletSystem::DirichletSystem(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)),
      stiffness_(assemble_stiffness(*mesh_)),
      mass_(assemble_lumped_mass(*mesh_)),
      consistent_mass_(assemble_consistent_mass(*mesh_)) {
  const int n = mesh_->vertex_count();
  interior_pos_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!mesh_->boundary_mask[i]) {
      interior_pos_[i] = static_cast<int>(interior_.size());
      interior_.push_back(i);
    }
  }
  a_int_ = restrict_interior(stiffness_, *mesh_);
  mass_int_.resize(interior_.size());
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    mass_int_[static_cast<int>(k)] = mass_.mat.coeff(interior_[k], interior_[k]);
  }

  // Fixed sparsity: the shift only touches the diagonal, so the symbolic
  // factorization can be computed once.
  shifted_ = a_int_.mat;
  diag_slots_.assign(interior_.size(), -1);
  for (int k = 0; k < shifted_.outerSize(); ++k) {
    for (int p = shifted_.outerIndexPtr()[k]; p < shifted_.outerIndexPtr()[k + 1]; ++p) {
      if (shifted_.innerIndexPtr()[p] == k) diag_slots_[k] = p;
    }
  }
  ldlt_.analyzePattern(shifted_);
}

SparseSpdMatrix restrict_interior(const SparseSpdMatrix& a, const Mesh& mesh) {
  const int n = mesh.vertex_count();
  std::vector<int> pos(n, -1);
  int m = 0;
  for (int i = 0; i < n; ++i) {
    if (!mesh.boundary_mask[i]) pos[i] = m++;
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.mat.nonZeros());
  for (int k = 0; k < a.mat.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a.mat, k); it; ++it) {
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) {
        trips.emplace_back(pos[it.row()], pos[it.col()], it.value());
      }
    }
  }
  SparseSpdMatrix out;
  out.mat.resize(m, m);
  out.mat.setFromTriplets(trips.begin(), trips.end());
  out.mat.makeCompressed();
  return out;
}

Eigen::VectorXd DirichletSystem::apply(const Eigen::VectorXd& coeff, const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = stiffness_.mat * v;
  out.array() += mass_.mat.diagonal().array() * coeff.array() * v.array();
  return out;
}

void DirichletSystem::factorize(const Eigen::VectorXd& coeff_int) const {
  if (has_factorization_ && cached_coeff_.size() == coeff_int.size() && cached_coeff_ == coeff_int) {
    return;
  }
  double* vals = shifted_.valuePtr();
  const double* base = a_int_.mat.valuePtr();
  std::copy(base, base + a_int_.mat.nonZeros(), vals);
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    vals[diag_slots_[k]] += mass_int_[static_cast<int>(k)] * coeff_int[static_cast<int>(k)];
  }
  ldlt_.factorize(shifted_);
  if (ldlt_.info() != Eigen::Success) {
    throw SolverError("DirichletSystem: factorization failed (matrix not SPD?)", 0.0, 0);
  }
  cached_coeff_ = coeff_int;
  has_factorization_ = true;
}

Eigen::VectorXd DirichletSystem::solve_shifted(const Eigen::VectorXd& coeff,
                                               const Eigen::VectorXd& rhs, double tol) const {
  const int m = static_cast<int>(interior_.size());
  Eigen::VectorXd coeff_int(m), b(m);
  for (int k = 0; k < m; ++k) {
    coeff_int[k] = coeff[interior_[k]];
    b[k] = rhs[interior_[k]];
  }
  const std::lock_guard<std::mutex> lock(cache_mutex_);
  factorize(coeff_int);

  const double bound = tol * (1.0 + b.norm());
  Eigen::VectorXd x = ldlt_.solve(b);
  Eigen::VectorXd r = b - shifted_ * x;
  for (int pass = 0; pass < 3 && r.norm() > bound; ++pass) {
    x += ldlt_.solve(r);
    r = b - shifted_ * x;
  }
  if (r.norm() > bound) {
    throw SolverError("DirichletSystem: linear residual above tolerance", r.norm(), 3);
  }

  Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh_->vertex_count());
  for (int k = 0; k < m; ++k) full[interior_[k]] = x[k];
  return full;
}

NodalField solve_dirichlet(const DirichletSystem& sys, const Eigen::VectorXd& rhs, double tol) {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.mesh().vertex_count());
  return NodalField(sys.mesh_ptr(), sys.solve_shifted(zero, rhs, tol));
}

double h1_norm(const DirichletSystem& sys, const Eigen::VectorXd& v) {
  const double grad = v.dot(sys.stiffness().mat * v);
  const double l2 = v.dot(sys.lumped_mass().mat * v);
  return std::sqrt(grad + l2);
}

}  // namespace opident
