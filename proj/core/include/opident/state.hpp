#ifndef OPIDENT_STATE_HPP
#define OPIDENT_STATE_HPP

#include "opident/control.hpp"
#include "opident/fem.hpp"

namespace opident {

/// Applies the mass quadrature selected for the data terms: consistent
/// M_C v or lumped diag(M_L) .* v.
Eigen::VectorXd data_mass_apply(const DirichletSystem& sys, DataQuadrature quadrature,
                                const Eigen::VectorXd& v);

struct NewtonSettings {
  double tol = 1e-12;        // sup-norm of the algebraic residual on interior nodes
  int max_iters = 50;
  double linear_tol = 1e-12;
  const NodalField* warm_start = nullptr;  // non-owning; falls back to y = 0 on failure
};

struct StateResult {
  NodalField y;
  int newton_iters = 0;
  double residual_sup = 0.0;
};

/// Solves the discrete state equation A y + M g_u(y) = M f with homogeneous
/// Dirichlet conditions by a semismooth Newton method. Requires u >= -eps_p
/// cellwise. A failing warm-started run is retried once from y = 0 before a
/// SolverError carrying the last residual is thrown.
StateResult solve_state(const PwcControl& u, const ProblemParams& params,
                        const DirichletSystem& sys, const NewtonSettings& settings = {});

struct PoissonResult {
  NodalField y_p;
  double r_p = 0.0;  // 2 * max |y_p|
};

/// Solves A y_p = M f and returns the a-priori state bound r_p = 2 |y_p|_inf.
PoissonResult solve_poisson(const ProblemParams& params, const DirichletSystem& sys,
                            double linear_tol = 1e-12);

/// Sanity assertion max |y| <= r_p (1 + slack); the slack absorbs
/// discretization error. Never throws.
bool check_supnorm_bound(const NodalField& y, double r_p, double slack = 0.02);

}  // namespace opident

#endif
