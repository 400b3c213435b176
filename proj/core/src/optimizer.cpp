#include "opident/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace opident {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::TauFloor: return "tau_floor";
    case StopReason::MaxOuter: return "max_outer";
  }
  return "unknown";
}

double theta_eps(const PwcControl& u, const PwcControl& g, double eps) {
  if (!u.same_grid(g)) throw std::invalid_argument("theta_eps: mismatched grids");
  if (!(eps > 0.0)) throw std::invalid_argument("theta_eps: eps must be positive");
  double acc = 0.0;
  for (int k = 0; k < u.cell_count(); ++k) {
    acc += std::min(u.cells[k] / eps, g.cells[k]) * g.cells[k];
  }
  return std::sqrt(std::max(0.0, u.cell_width() * acc));
}

double theta_zero(const PwcControl& u, const PwcControl& g) {
  if (!u.same_grid(g)) throw std::invalid_argument("theta_zero: mismatched grids");
  double acc = 0.0;
  for (int k = 0; k < u.cell_count(); ++k) {
    const double v = u.cells[k] > 0.0 ? g.cells[k] : std::min(0.0, g.cells[k]);
    acc += v * v;
  }
  return std::sqrt(u.cell_width() * acc);
}

PwcControl projected_step(const PwcControl& u, const PwcControl& g, double tau) {
  PwcControl out(u.r, u.cell_count());
  out.cells = (u.cells - tau * g.cells).cwiseMax(0.0);
  return out;
}

namespace {

struct Evaluation {
  NodalField y;
  double objective = 0.0;
  int newton_iters = 0;
};

double projection_residual(const PwcControl& u, const PwcControl& p2_avg,
                           const ProblemParams& params) {
  double acc = 0.0;
  for (int k = 0; k < u.cell_count(); ++k) {
    const double fixed_point =
        std::max(0.0, params.u_desired.cells[k] + (p2_avg.cells[k] - params.nu1) / params.nu2);
    const double d = u.cells[k] - fixed_point;
    acc += d * d;
  }
  return std::sqrt(u.cell_width() * acc);
}

Evaluation evaluate(const PwcControl& u, const ProblemParams& params, const DirichletSystem& sys,
                    const NewtonSettings& base, const NodalField* warm) {
  NewtonSettings settings = base;
  settings.warm_start = warm;
  StateResult state = solve_state(u, params, sys, settings);
  Evaluation out;
  out.objective = objective(u, state.y, params, sys).total();
  out.newton_iters = state.newton_iters;
  out.y = std::move(state.y);
  return out;
}

}  // namespace

RunReport gradient_projection(const PwcControl& u0, const ProblemParams& params,
                              const DirichletSystem& sys, const OptimSettings& opt,
                              const NewtonSettings& newton) {
  if (!u0.is_nonnegative()) {
    throw std::invalid_argument("gradient_projection: initial control must be nonnegative");
  }
  params.validate();

  RunReport report;
  PwcControl u = u0;
  Evaluation cur = evaluate(u, params, sys, newton, nullptr);
  report.reason = StopReason::MaxOuter;

  for (int i = 0; i <= opt.max_outer; ++i) {
    int newton_iters = cur.newton_iters;
    int max_newton = cur.newton_iters;
    cur.newton_iters = 0;

    const NodalField p1 = solve_adjoint_p1(u, cur.y, params, sys, newton.linear_tol);
    const LevelSetIntegral p2(dual_weights(p1, params, sys), cur.y.values);
    const PwcControl p2_avg = project_onto_pwc([&p2](double s) { return p2(s); }, params.r,
                                               u.cell_count(), opt.q_points);
    const PwcControl grad = gradient_from_p2(u, p2_avg, params);
    const double theta_i = theta_eps(u, grad, opt.eps1);
    report.stationarity_residual = projection_residual(u, p2_avg, params);

    IterationRecord rec;
    rec.i = i;
    rec.objective = cur.objective;
    rec.theta = theta_i;

    if (theta_i <= opt.eps2) {
      rec.newton_iters = newton_iters;
      rec.max_newton_iters = max_newton;
      report.history.push_back(rec);
      report.reason = StopReason::Converged;
      break;
    }
    if (i == opt.max_outer) {
      rec.newton_iters = newton_iters;
      rec.max_newton_iters = max_newton;
      report.history.push_back(rec);
      report.reason = StopReason::MaxOuter;
      break;
    }

    // Backtracking on e_j = F(u_i) - F(trial_j) - sigma_j theta Theta^2.
    double sigma_j = opt.sigma;
    int trials = 0;
    bool accepted = false;
    PwcControl trial;
    Evaluation trial_eval;
    while (sigma_j >= opt.tau_floor) {
      trial = projected_step(u, grad, sigma_j);
      trial_eval = evaluate(trial, params, sys, newton, &cur.y);
      ++trials;
      newton_iters += trial_eval.newton_iters;
      max_newton = std::max(max_newton, trial_eval.newton_iters);
      const double e_j = cur.objective - trial_eval.objective -
                         sigma_j * opt.theta * theta_i * theta_i;
      if (e_j < 0.0) {
        sigma_j *= opt.omega;
      } else {
        accepted = true;
        break;
      }
    }

    rec.ls_trials = trials;
    rec.newton_iters = newton_iters;
    rec.max_newton_iters = max_newton;
    if (!accepted) {
      rec.tau = 0.0;
      report.history.push_back(rec);
      report.reason = StopReason::TauFloor;
      break;
    }
    rec.tau = sigma_j;
    report.history.push_back(rec);
    u = std::move(trial);
    cur = std::move(trial_eval);
  }

  report.final_control = u;
  report.final_objective = cur.objective;
  report.final_state = std::move(cur.y);
  report.final_theta = report.history.empty() ? 0.0 : report.history.back().theta;
  return report;
}

StationarityReport verify_stationarity_system(const PwcControl& u, const ProblemParams& params,
                                              const DirichletSystem& sys, const OptimSettings& opt,
                                              const NewtonSettings& newton) {
  NewtonSettings settings = newton;
  StateResult state = solve_state(u, params, sys, settings);
  const NodalField p1 = solve_adjoint_p1(u, state.y, params, sys, newton.linear_tol);
  const LevelSetIntegral p2(dual_weights(p1, params, sys), state.y.values);
  const PwcControl p2_avg = project_onto_pwc([&p2](double s) { return p2(s); }, params.r,
                                             u.cell_count(), opt.q_points);

  StationarityReport out;
  out.residual = projection_residual(u, p2_avg, params);
  const PwcControl grad = gradient_from_p2(u, p2_avg, params);
  out.theta_eps1 = theta_eps(u, grad, opt.eps1);
  out.theta0 = theta_zero(u, grad);
  return out;
}

}  // namespace opident
