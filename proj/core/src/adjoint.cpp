#include "opident/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opident {

ObjectiveBreakdown objective(const PwcControl& u, const NodalField& y, const ProblemParams& params,
                             const DirichletSystem& sys) {
  if (!u.same_grid(params.u_desired)) {
    throw std::invalid_argument("objective: control grid does not match u_desired");
  }
  ObjectiveBreakdown out;
  const Eigen::VectorXd diff = y.values - params.y_desired.values;
  out.tracking = 0.5 * diff.dot(data_mass_apply(sys, params.data_quadrature, diff));

  const double h = u.cell_width();
  double l1 = 0.0, l2 = 0.0;
  for (int k = 0; k < u.cell_count(); ++k) {
    l1 += u.cells[k];
    const double d = u.cells[k] - params.u_desired.cells[k];
    l2 += d * d;
  }
  out.l1_term = params.nu1 * h * l1;
  out.l2_term = 0.5 * params.nu2 * h * l2;
  return out;
}

NodalField solve_adjoint_p1(const PwcControl& u, const NodalField& y, const ProblemParams& params,
                            const DirichletSystem& sys, double linear_tol) {
  const Eigen::VectorXd coeff = compose_u_of_y(u, y).values;
  const Eigen::VectorXd rhs =
      data_mass_apply(sys, params.data_quadrature, y.values - params.y_desired.values);
  return NodalField(sys.mesh_ptr(), sys.solve_shifted(coeff, rhs, linear_tol));
}

LevelSetIntegral::LevelSetIntegral(const Eigen::VectorXd& weights, const Eigen::VectorXd& y_values) {
  const int n = static_cast<int>(y_values.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return y_values[a] != y_values[b] ? y_values[a] < y_values[b] : a < b;
  });

  sorted_y_.resize(n);
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) {
    sorted_y_[k] = y_values[order[k]];
    w[k] = weights[order[k]];
  }
  prefix_.resize(n);
  suffix_.resize(n);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) prefix_[k] = (acc += w[k]);
  acc = 0.0;
  for (int k = n - 1; k >= 0; --k) suffix_[k] = (acc += w[k]);
}

LevelSetIntegral::LevelSetIntegral(const NodalField& p1, const NodalField& y,
                                   const SparseSpdMatrix& lumped_mass)
    : LevelSetIntegral(lumped_mass.mat.diagonal().cwiseProduct(p1.values).eval(), y.values) {}

Eigen::VectorXd dual_weights(const NodalField& p1, const ProblemParams& params,
                             const DirichletSystem& sys) {
  return data_mass_apply(sys, params.data_quadrature, p1.values);
}

double LevelSetIntegral::operator()(double s) const {
  if (sorted_y_.empty()) return 0.0;
  if (s >= 0.0) {
    // sum of weights over { y >= s }
    const auto it = std::lower_bound(sorted_y_.begin(), sorted_y_.end(), s);
    if (it == sorted_y_.end()) return 0.0;
    return suffix_[static_cast<std::size_t>(it - sorted_y_.begin())];
  }
  // -sum of weights over { y <= s }
  const auto it = std::upper_bound(sorted_y_.begin(), sorted_y_.end(), s);
  if (it == sorted_y_.begin()) return 0.0;
  return -prefix_[static_cast<std::size_t>(it - sorted_y_.begin()) - 1];
}

PwcControl compute_p2(const NodalField& p1, const NodalField& y, const ProblemParams& params,
                      int n_cells, int q_points) {
  Eigen::VectorXd weights;
  if (params.data_quadrature == DataQuadrature::Consistent) {
    weights = assemble_consistent_mass(*y.mesh).mat * p1.values;
  } else {
    weights = assemble_lumped_mass(*y.mesh).mat.diagonal().cwiseProduct(p1.values);
  }
  const LevelSetIntegral p2(weights, y.values);
  return project_onto_pwc([&p2](double s) { return p2(s); }, params.r, n_cells, q_points);
}

PwcControl gradient_from_p2(const PwcControl& u, const PwcControl& p2_avg,
                            const ProblemParams& params) {
  PwcControl g(u.r, u.cell_count());
  g.cells = -p2_avg.cells.array() + params.nu1 +
            params.nu2 * (u.cells - params.u_desired.cells).array();
  return g;
}

PwcControl l2_gradient(const PwcControl& u, const ProblemParams& params, const DirichletSystem& sys,
                       int q_points, const NewtonSettings& settings) {
  const StateResult state = solve_state(u, params, sys, settings);
  const NodalField p1 = solve_adjoint_p1(u, state.y, params, sys, settings.linear_tol);
  const LevelSetIntegral p2(dual_weights(p1, params, sys), state.y.values);
  const PwcControl p2_avg = project_onto_pwc([&p2](double s) { return p2(s); }, params.r,
                                             u.cell_count(), q_points);
  return gradient_from_p2(u, p2_avg, params);
}

}  // namespace opident
