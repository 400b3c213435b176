#ifndef OPIDENT_ADJOINT_HPP
#define OPIDENT_ADJOINT_HPP

#include "opident/control.hpp"
#include "opident/fem.hpp"
#include "opident/state.hpp"

namespace opident {

struct ObjectiveBreakdown {
  double tracking = 0.0;  // 1/2 |y - y_D|^2 in the lumped L2 inner product
  double l1_term = 0.0;   // nu1 * int u
  double l2_term = 0.0;   // nu2/2 * int (u - u_D)^2
  double total() const { return tracking + l1_term + l2_term; }
};

/// Objective value for a control u with its state y. The control integrals
/// are exact cell sums.
ObjectiveBreakdown objective(const PwcControl& u, const NodalField& y, const ProblemParams& params,
                             const DirichletSystem& sys);

/// Solves (A + M diag(u(y))) p1 = M (y - y_D), p1 = 0 on the boundary.
NodalField solve_adjoint_p1(const PwcControl& u, const NodalField& y, const ProblemParams& params,
                            const DirichletSystem& sys, double linear_tol = 1e-12);

/// Pointwise evaluator for the dual variable
///   p2(s) = sum_i w_i [y_i >= s]   for s >= 0,
///   p2(s) = -sum_i w_i [y_i <= s]  for s < 0,
/// where w carries the mass quadrature of the adjoint state (w = M p1).
/// Backed by a sort of the nodal values so each query is a binary search.
class LevelSetIntegral {
 public:
  LevelSetIntegral(const Eigen::VectorXd& weights, const Eigen::VectorXd& y_values);
  LevelSetIntegral(const NodalField& p1, const NodalField& y, const SparseSpdMatrix& lumped_mass);
  double operator()(double s) const;

 private:
  std::vector<double> sorted_y_;
  std::vector<double> suffix_;  // suffix_[k] = sum of weights with y >= sorted_y_[k]
  std::vector<double> prefix_;  // prefix_[k] = sum of weights with y <= sorted_y_[k]
};

/// Level-set weights for p2 under the configured data quadrature.
Eigen::VectorXd dual_weights(const NodalField& p1, const ProblemParams& params,
                             const DirichletSystem& sys);

/// Cell averages of p2 on the control grid via the q-point quadrature rule.
PwcControl compute_p2(const NodalField& p1, const NodalField& y, const ProblemParams& params,
                      int n_cells, int q_points);

/// Gradient cells from precomputed p2 averages: -p2 + nu1 + nu2 (u - u_D).
PwcControl gradient_from_p2(const PwcControl& u, const PwcControl& p2_avg,
                            const ProblemParams& params);

/// Full gradient chain at u: state solve, adjoint solve, p2 quadrature,
/// cellwise combination.
PwcControl l2_gradient(const PwcControl& u, const ProblemParams& params, const DirichletSystem& sys,
                       int q_points, const NewtonSettings& settings = {});

}  // namespace opident

#endif
