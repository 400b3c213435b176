#ifndef OPIDENT_FEM_HPP
#define OPIDENT_FEM_HPP

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "opident/mesh.hpp"

namespace opident {

/// Thrown when a linear or nonlinear solve fails to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}
  double residual = 0.0;
  int iterations = 0;
};

/// Symmetric positive (semi)definite sparse operator. Both triangles are
/// stored so that products and row queries stay cheap; symmetry is an
/// invariant of the assembly routines, not of the storage.
struct SparseSpdMatrix {
  Eigen::SparseMatrix<double> mat;

  int dimension() const { return static_cast<int>(mat.rows()); }
  bool is_symmetric(double tol = 1e-12) const;
};

/// P1 nodal function: one value per mesh vertex.
struct NodalField {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd values;

  NodalField() = default;
  explicit NodalField(std::shared_ptr<const Mesh> m)
      : mesh(std::move(m)), values(Eigen::VectorXd::Zero(mesh->vertex_count())) {}
  NodalField(std::shared_ptr<const Mesh> m, Eigen::VectorXd v);

  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

/// Samples f(x, y) at every vertex.
template <typename F>
NodalField sample_nodal(std::shared_ptr<const Mesh> mesh, F&& f) {
  NodalField out(mesh);
  for (int i = 0; i < mesh->vertex_count(); ++i) {
    out.values[i] = f(mesh->vertices[i][0], mesh->vertices[i][1]);
  }
  return out;
}

/// Stiffness matrix A[i][j] = int grad(phi_i) . grad(phi_j) dx over all
/// vertices (no boundary conditions applied). Rows sum to zero.
SparseSpdMatrix assemble_stiffness(const Mesh& mesh);

/// Row-sum lumped mass matrix, M[i][i] = sum of adjacent triangle areas / 3.
/// Diagonal; trace equals |Omega| = 1.
SparseSpdMatrix assemble_lumped_mass(const Mesh& mesh);

/// Consistent P1 mass matrix, M[i][j] = int phi_i phi_j dx. Its row sums
/// equal the lumped diagonal.
SparseSpdMatrix assemble_consistent_mass(const Mesh& mesh);

/// Solves A_int x = b for an SPD matrix via sparse Cholesky with one step of
/// iterative refinement. Throws SolverError when the final residual exceeds
/// tol * (1 + |b|_2).
Eigen::VectorXd solve_spd(const SparseSpdMatrix& a, const Eigen::VectorXd& b, double tol = 1e-12);

/// Assembled homogeneous-Dirichlet system on a mesh: stiffness and lumped
/// mass together with the interior-node restriction. Solves of
/// (A + M diag(c))|interior are cached by coefficient so that repeated solves
/// with an unchanged zeroth-order term reuse the factorization.
class DirichletSystem {
 public:
  explicit DirichletSystem(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const SparseSpdMatrix& stiffness() const { return stiffness_; }
  const SparseSpdMatrix& lumped_mass() const { return mass_; }
  const SparseSpdMatrix& consistent_mass() const { return consistent_mass_; }
  const std::vector<int>& interior() const { return interior_; }

  /// Applies the full operator v -> A v + M (coeff .* v) (all nodes).
  Eigen::VectorXd apply(const Eigen::VectorXd& coeff, const Eigen::VectorXd& v) const;

  /// Solves (A + M diag(coeff)) x = rhs on interior nodes, x = 0 on the
  /// boundary. coeff and rhs are full-length nodal vectors; coeff must keep
  /// A + M diag(coeff) positive definite (coeff >= -eps_P suffices).
  Eigen::VectorXd solve_shifted(const Eigen::VectorXd& coeff, const Eigen::VectorXd& rhs,
                                double tol = 1e-12) const;

  /// Interior restriction of the stiffness matrix.
  const SparseSpdMatrix& interior_stiffness() const { return a_int_; }

 private:
  void factorize(const Eigen::VectorXd& coeff_int) const;

  std::shared_ptr<const Mesh> mesh_;
  SparseSpdMatrix stiffness_;
  SparseSpdMatrix mass_;
  SparseSpdMatrix consistent_mass_;
  std::vector<int> interior_;      // interior vertex ids
  std::vector<int> interior_pos_;  // vertex id -> interior position or -1
  SparseSpdMatrix a_int_;
  Eigen::VectorXd mass_int_;

  // factorization cache; the mutex keeps concurrent solves safe
  mutable std::mutex cache_mutex_;
  mutable Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  mutable Eigen::SparseMatrix<double> shifted_;
  mutable std::vector<int> diag_slots_;
  mutable Eigen::VectorXd cached_coeff_;
  mutable bool has_factorization_ = false;
};

/// Restriction of a matrix to the interior nodes of the mesh.
SparseSpdMatrix restrict_interior(const SparseSpdMatrix& a, const Mesh& mesh);

/// Solves A_int y = rhs_int on the interior nodes and scatters the result to
/// a full nodal field with zero boundary values. rhs is full length; its
/// boundary entries are ignored.
NodalField solve_dirichlet(const DirichletSystem& sys, const Eigen::VectorXd& rhs, double tol = 1e-12);

/// Discrete H1 norm sqrt(v' (A + M) v).
double h1_norm(const DirichletSystem& sys, const Eigen::VectorXd& v);

}  // namespace opident

#endif
