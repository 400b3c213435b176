#include "opident/control.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace opident {

void ProblemParams::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("ProblemParams: r must be positive");
  if (!(nu2 > 0.0)) throw std::invalid_argument("ProblemParams: nu2 must be positive");
  if (nu1 < 0.0) throw std::invalid_argument("ProblemParams: nu1 must be nonnegative");
  if (!(eps_p > 0.0)) throw std::invalid_argument("ProblemParams: eps_p must be positive");
  if (u_desired.cell_count() == 0 || u_desired.r != r) {
    throw std::invalid_argument("ProblemParams: u_desired must live on the control grid over (-r, r)");
  }
  if (!rhs.mesh || !y_desired.mesh) {
    throw std::invalid_argument("ProblemParams: rhs and y_desired need a mesh");
  }
  if (rhs.values.size() != y_desired.values.size()) {
    throw std::invalid_argument("ProblemParams: rhs and y_desired live on different meshes");
  }
  bool nonzero = false;
  for (int i = 0; i < rhs.values.size(); ++i) {
    if (rhs.values[i] != 0.0 && !rhs.mesh->boundary_mask[i]) {
      nonzero = true;
      break;
    }
  }
  if (!nonzero) throw std::invalid_argument("ProblemParams: rhs f must not be identically zero");
}

namespace {

// Cumulative integral of the control from -r to the k-th breakpoint.
// Kept local: g_u_eval is called in hot loops, but n is small and the
// evaluation below is already O(1) given the cell index.
double cumulative_to(const PwcControl& u, double t_clamped) {
  const double h = u.cell_width();
  const int n = u.cell_count();
  double idx_f = (t_clamped + u.r) / h;
  int idx = static_cast<int>(std::floor(idx_f));
  idx = std::clamp(idx, 0, n - 1);
  double acc = 0.0;
  for (int k = 0; k < idx; ++k) acc += u.cells[k];
  acc *= h;
  acc += (t_clamped - u.cell_left(idx)) * u.cells[idx];
  return acc;
}

}  // namespace

double g_u_eval(const PwcControl& u, double t) {
  if (u.cell_count() == 0) return 0.0;
  const double a = std::clamp(t, -u.r, u.r);
  return cumulative_to(u, a) - cumulative_to(u, 0.0);
}

NodalField g_u_field(const PwcControl& u, const NodalField& y) {
  NodalField out(y.mesh);
  // Precompute breakpoint cumulative sums so each node costs O(1).
  const int n = u.cell_count();
  const double h = n ? u.cell_width() : 0.0;
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(n + 1);
  for (int k = 0; k < n; ++k) cum[k + 1] = cum[k] + h * u.cells[k];
  auto eval = [&](double t) {
    const double a = std::clamp(t, -u.r, u.r);
    int idx = std::clamp(static_cast<int>(std::floor((a + u.r) / h)), 0, n - 1);
    return cum[idx] + (a - u.cell_left(idx)) * u.cells[idx];
  };
  if (n == 0) return out;
  const double at_zero = eval(0.0);
  for (int i = 0; i < y.values.size(); ++i) {
    out.values[i] = eval(y.values[i]) - at_zero;
  }
  return out;
}

double compose_u_of_y(const PwcControl& u, double t) {
  if (u.cell_count() == 0 || t < -u.r || t >= u.r) return 0.0;
  const int idx = static_cast<int>(std::floor((t + u.r) / u.cell_width()));
  if (idx < 0 || idx >= u.cell_count()) return 0.0;
  return u.cells[idx];
}

NodalField compose_u_of_y(const PwcControl& u, const NodalField& y) {
  NodalField out(y.mesh);
  for (int i = 0; i < y.values.size(); ++i) {
    out.values[i] = compose_u_of_y(u, y.values[i]);
  }
  return out;
}

PwcControl project_onto_pwc(const std::function<double(double)>& v, double r, int n_cells,
                            int q_points) {
  if (n_cells < 1) throw std::invalid_argument("project_onto_pwc: need at least one cell");
  if (q_points < 1) throw std::invalid_argument("project_onto_pwc: need at least one quadrature point");
  PwcControl out(r, n_cells);
  const double h = out.cell_width();
  for (int k = 0; k < n_cells; ++k) {
    const double left = out.cell_left(k);
    double acc = 0.0;
    for (int j = 1; j <= q_points; ++j) {
      acc += v(left + j * h / (q_points + 1));
    }
    out.cells[k] = acc / q_points;
  }
  return out;
}

A2Report check_a2(const NodalField& f, double warn_threshold) {
  A2Report report;
  report.threshold = warn_threshold;
  std::map<double, int> counts;
  int interior = 0;
  for (int i = 0; i < f.values.size(); ++i) {
    if (f.mesh->boundary_mask[i]) continue;
    ++interior;
    ++counts[f.values[i]];
  }
  for (const auto& [value, count] : counts) {
    const double frac = static_cast<double>(count) / interior;
    if (frac > report.max_fraction) {
      report.max_fraction = frac;
      report.level_value = value;
    }
  }
  report.passed = report.max_fraction <= warn_threshold;
  return report;
}

}  // namespace opident
