#ifndef OPIDENT_CONTROL_HPP
#define OPIDENT_CONTROL_HPP

#include <Eigen/Core>
#include <functional>
#include <string>

#include "opident/fem.hpp"

namespace opident {

/// Piecewise-constant function on (-r, r) with n equal cells of width
/// 2r/n. Cell k covers (k h - r, (k+1) h - r), k = 0..n-1. Controls, cell
/// averages of the dual variable p2, and L2-gradients all live here.
struct PwcControl {
  double r = 0.0;
  Eigen::VectorXd cells;

  PwcControl() = default;
  PwcControl(double r, Eigen::VectorXd values) : r(r), cells(std::move(values)) {}
  PwcControl(double r, int n, double fill = 0.0) : r(r), cells(Eigen::VectorXd::Constant(n, fill)) {}

  int cell_count() const { return static_cast<int>(cells.size()); }
  double cell_width() const { return 2.0 * r / cell_count(); }
  /// Left endpoint of cell k.
  double cell_left(double k) const { return k * cell_width() - r; }

  bool same_grid(const PwcControl& other) const {
    return r == other.r && cells.size() == other.cells.size();
  }
  bool is_nonnegative() const { return cells.size() == 0 || cells.minCoeff() >= 0.0; }
};

/// Quadrature used for the data terms: the load vector, the tracking term,
/// and the dual level-set weights. The semilinearity is always lumped.
/// Consistent is the reference-experiment convention; Lumped makes the
/// computed gradient the exact derivative of the discrete objective (up to
/// the cell-average rule) and is what the validation suite differentiates.
enum class DataQuadrature { Lumped, Consistent };

/// Problem data: Tikhonov weights, desired control/state, right-hand side.
struct ProblemParams {
  double r = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  PwcControl u_desired;   // u_D sampled on the control grid
  NodalField y_desired;   // y_D at the vertices
  NodalField rhs;         // f at the vertices
  double eps_p = 9.8696044010893586;  // pi^2 = half the unit-square Poincare constant
  DataQuadrature data_quadrature = DataQuadrature::Consistent;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Antiderivative g_u(t) = int_0^t u(s) ds of the zero-extended control,
/// evaluated in closed form. g_u(0) = 0 and int_b^a = -int_a^b.
double g_u_eval(const PwcControl& u, double t);

/// Nodewise application of g_u to a nodal field.
NodalField g_u_field(const PwcControl& u, const NodalField& y);

/// Nodewise value of the zero-extended control at y, taking the
/// right-continuous representative at cell breakpoints: u(-r) is the first
/// cell's value, u(t) = 0 for t < -r and t >= r.
double compose_u_of_y(const PwcControl& u, double t);
NodalField compose_u_of_y(const PwcControl& u, const NodalField& y);

/// Cell-wise quadrature projection onto the piecewise-constant space: cell k
/// gets the average of v at the q interior points left + j h/(q+1),
/// j = 1..q. Linear in v, idempotent on functions already in the space, and
/// never evaluates v at cell endpoints.
PwcControl project_onto_pwc(const std::function<double(double)>& v, double r, int n_cells, int q_points);

struct A2Report {
  bool passed = true;
  double max_fraction = 0.0;   // largest share of interior nodes with one f value
  double level_value = 0.0;    // the most frequent value
  double threshold = 0.0;
};

/// Discrete surrogate for the flat-level-set condition on f: reports the
/// largest fraction of interior nodes sharing a single value and warns above
/// the threshold. Advisory only; the continuous condition concerns the
/// analytic datum.
A2Report check_a2(const NodalField& f, double warn_threshold = 0.10);

}  // namespace opident

#endif
