#include "opident/state.hpp"

#include <cmath>
#include <stdexcept>

namespace opident {

Eigen::VectorXd data_mass_apply(const DirichletSystem& sys, DataQuadrature quadrature,
                                const Eigen::VectorXd& v) {
  if (quadrature == DataQuadrature::Consistent) {
    return sys.consistent_mass().mat * v;
  }
  return sys.lumped_mass().mat.diagonal().cwiseProduct(v);
}

namespace {

double interior_sup(const Mesh& mesh, const Eigen::VectorXd& v) {
  double sup = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    if (!mesh.boundary_mask[i]) sup = std::max(sup, std::abs(v[i]));
  }
  return sup;
}

struct NewtonOutcome {
  bool converged = false;
  Eigen::VectorXd y;
  int iters = 0;
  double residual = 0.0;
};

NewtonOutcome newton_loop(const PwcControl& u, const ProblemParams& params,
                          const DirichletSystem& sys, const NewtonSettings& settings,
                          Eigen::VectorXd y) {
  const Eigen::VectorXd& mass = sys.lumped_mass().mat.diagonal();
  const Eigen::VectorXd load = data_mass_apply(sys, params.data_quadrature, params.rhs.values);
  NewtonOutcome out;
  std::shared_ptr<const Mesh> mesh = sys.mesh_ptr();

  for (int it = 0; it <= settings.max_iters; ++it) {
    NodalField yf(mesh, y);
    Eigen::VectorXd residual =
        sys.stiffness().mat * y + mass.cwiseProduct(g_u_field(u, yf).values) - load;
    out.residual = interior_sup(*mesh, residual);
    out.iters = it;
    if (out.residual <= settings.tol) {
      out.converged = true;
      out.y = std::move(y);
      return out;
    }
    if (it == settings.max_iters) break;
    // Generalized Jacobian: A + M diag(u(y)), with the right-continuous
    // representative of u at breakpoints.
    const Eigen::VectorXd coeff = compose_u_of_y(u, yf).values;
    residual = -residual;
    y += sys.solve_shifted(coeff, residual, settings.linear_tol);
  }
  out.y = std::move(y);
  return out;
}

}  // namespace

StateResult solve_state(const PwcControl& u, const ProblemParams& params,
                        const DirichletSystem& sys, const NewtonSettings& settings) {
  if (u.cell_count() == 0 || u.r != params.r) {
    throw std::invalid_argument("solve_state: control grid does not match the problem");
  }
  if (u.cells.minCoeff() < -params.eps_p) {
    throw std::invalid_argument("solve_state: control below -eps_p is infeasible");
  }

  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(sys.mesh().vertex_count());
  bool warm = false;
  if (settings.warm_start != nullptr && settings.warm_start->values.size() == y0.size()) {
    y0 = settings.warm_start->values;
    warm = true;
  }

  NewtonOutcome out = newton_loop(u, params, sys, settings, std::move(y0));
  int total_iters = out.iters;
  if (!out.converged && warm) {
    out = newton_loop(u, params, sys, settings,
                      Eigen::VectorXd::Zero(sys.mesh().vertex_count()));
    total_iters += out.iters;
  }
  if (!out.converged) {
    throw SolverError("solve_state: Newton did not reach tolerance", out.residual, total_iters);
  }
  return StateResult{NodalField(sys.mesh_ptr(), std::move(out.y)), total_iters, out.residual};
}

PoissonResult solve_poisson(const ProblemParams& params, const DirichletSystem& sys,
                            double linear_tol) {
  const Eigen::VectorXd load = data_mass_apply(sys, params.data_quadrature, params.rhs.values);
  NodalField y_p = solve_dirichlet(sys, load, linear_tol);
  const double r_p = 2.0 * y_p.max_abs();
  return PoissonResult{std::move(y_p), r_p};
}

bool check_supnorm_bound(const NodalField& y, double r_p, double slack) {
  return y.max_abs() <= r_p * (1.0 + slack);
}

}  // namespace opident
