#ifndef OPIDENT_OPTIMIZER_HPP
#define OPIDENT_OPTIMIZER_HPP

#include <string>
#include <vector>

#include "opident/adjoint.hpp"
#include "opident/control.hpp"
#include "opident/state.hpp"

namespace opident {

struct OptimSettings {
  double sigma = 512.0;    // initial line-search step
  double omega = 0.8;      // backtracking factor
  double theta = 0.8;      // sufficient-decrease factor
  double eps1 = 1e-16;     // relaxation in Theta_eps
  double eps2 = 1e-8;      // termination tolerance on Theta_eps1 (0 disables)
  double tau_floor = 1e-10;  // abort the line search below this step size
  int max_outer = 500;
  int q_points = 5;        // cell-wise quadrature points for p2 averaging
};

enum class StopReason { Converged, TauFloor, MaxOuter };
std::string to_string(StopReason reason);

struct IterationRecord {
  int i = 0;
  double objective = 0.0;
  double theta = 0.0;      // Theta_eps1 at iterate i
  double tau = 0.0;        // accepted step (0 for the terminal record)
  int ls_trials = 0;
  int newton_iters = 0;      // Newton iterations spent during this outer iteration
  int max_newton_iters = 0;  // largest single state solve within it
};

struct RunReport {
  std::vector<IterationRecord> history;  // one record per iterate, terminal included
  PwcControl final_control;
  NodalField final_state;
  double final_objective = 0.0;
  double final_theta = 0.0;
  StopReason reason = StopReason::MaxOuter;
  double stationarity_residual = 0.0;
  int iterations() const { return history.empty() ? 0 : history.back().i; }
};

/// Relaxed stationarity measure
///   Theta_eps(u)^2 = int min(u/eps, g) g dt,
/// with the radicand clamped at zero against roundoff (it is nonnegative in
/// exact arithmetic for u >= 0).
double theta_eps(const PwcControl& u, const PwcControl& g, double eps);

/// Theta_0(u) = | g 1_{u>0} + min(0, g) 1_{u=0} |_{L2}; zero exactly at
/// projected-stationary points.
double theta_zero(const PwcControl& u, const PwcControl& g);

/// Projected-gradient update max(0, u - tau g).
PwcControl projected_step(const PwcControl& u, const PwcControl& g, double tau);

/// Gradient projection method with backtracking line search. Terminates when
/// Theta_eps1 <= eps2, when the trial step size falls below tau_floor, or at
/// max_outer. Every accepted step satisfies
///   F(u_i) >= F(u_{i+1}) + tau_i theta Theta_eps1(u_i)^2
/// and every iterate is nonnegative cellwise.
RunReport gradient_projection(const PwcControl& u0, const ProblemParams& params,
                              const DirichletSystem& sys, const OptimSettings& opt,
                              const NewtonSettings& newton = {});

struct StationarityReport {
  double residual = 0.0;   // | u - max(0, u_D + (p2 - nu1)/nu2) |_{L2(-r,r)}
  double theta_eps1 = 0.0;
  double theta0 = 0.0;
};

/// Measures how far u is from the fixed point of the projection formula
/// u = max(0, u_D + (p2 - nu1)/nu2), with p2 computed from the state and
/// adjoint at u.
StationarityReport verify_stationarity_system(const PwcControl& u, const ProblemParams& params,
                                              const DirichletSystem& sys, const OptimSettings& opt,
                                              const NewtonSettings& newton = {});

}  // namespace opident

#endif
