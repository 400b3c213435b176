// Acceptance suite: runs the reference experiments end to end and checks
// every published target at its stated tolerance, one PASS/FAIL line per
// criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "opident/adjoint.hpp"
#include "opident/experiment.hpp"
#include "opident/optimizer.hpp"

using namespace opident;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  explicit Criterion(std::string label) : label(std::move(label)) {}
  std::string label;
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& note) {
    if (!cond) {
      ok = false;
      notes.push_back(note);
    }
  }
  void info(const std::string& note) { notes.push_back(note); }
};

std::vector<Criterion> g_criteria;

void report(const Criterion& c) {
  std::printf("[%s] %s\n", c.ok ? "PASS" : "FAIL", c.label.c_str());
  for (const auto& note : c.notes) {
    std::printf("       %s\n", note.c_str());
  }
  std::fflush(stdout);
  g_criteria.push_back(c);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

RunConfig example_config(Preset preset, int n_y, int n_u) {
  RunConfig config = default_config(preset);
  config.n_y = n_y;
  config.n_u = n_u;
  return config;
}

struct NamedRun {
  std::string name;
  RunConfig config;
  SingleRunResult result;
};

std::vector<NamedRun> g_runs;  // shared across criteria 3, 6c and 7

const SingleRunResult& record_run(const std::string& name, const RunConfig& config) {
  NamedRun run;
  run.name = name;
  run.config = config;
  run.result = run_single(config);
  g_runs.push_back(std::move(run));
  return g_runs.back().result;
}

PwcControl random_control(std::mt19937& rng, double r, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  PwcControl u(r, n);
  for (int k = 0; k < n; ++k) u.cells[k] = dist(rng);
  return u;
}

// ---------------------------------------------------------------------------

void criterion_1_poisson_bound() {
  Criterion c("criterion 1: Poisson bound r_P for both examples (1%, < 5 s each)");

  auto check = [&c](Preset preset, double expected) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig config = example_config(preset, 128, 128);
    const ProblemSetup setup = make_problem(config);
    DirichletSystem sys(setup.mesh);
    const double r_p = solve_poisson(setup.params, sys).r_p;
    const double elapsed = seconds_since(t0);
    c.require(std::abs(r_p - expected) <= 0.01 * expected,
              to_string(preset) + fmt(": r_P = %.6f, expected %.6f", r_p, expected));
    c.require(elapsed < 5.0, to_string(preset) + fmt(": took %.2f s (limit 5 s)", elapsed));
    c.info(to_string(preset) + fmt(": r_P = %.6f in %.2f s", r_p, elapsed));
  };
  check(Preset::Example1, (8 * kPi * kPi + 1) / (4 * kPi * kPi));
  check(Preset::Example2, 2.0);
  report(c);
}

void criteria_2_3_refinement() {
  Criterion c2(
      "criterion 2: example 1 control error vs exact solution over h = 1/32,1/64,1/128 "
      "(factor 2, ratios in [3,5.5], < 3 min)");
  Criterion c3("criterion 3: objective plateau drops >= 10x per mesh halving");

  const double expected_err[3] = {5.373e-2, 1.404e-2, 3.580e-3};
  const int widths[3] = {32, 64, 128};
  double errors[3] = {0, 0, 0};
  double objectives[3] = {0, 0, 0};

  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 3; ++k) {
    RunConfig config = example_config(Preset::Example1, widths[k], 6 * widths[k]);
    config.optim.eps2 = 0.0;  // run into the discretization plateau
    const SingleRunResult& res =
        record_run("ex1_floor_ny" + std::to_string(widths[k]), config);
    errors[k] = res.linf_error.value_or(-1.0);
    objectives[k] = res.report.final_objective;
    c2.info(fmt("h = 1/%.0f: Linf error %.4e, F_r %.4e", widths[k], errors[k], objectives[k]));
  }
  const double elapsed = seconds_since(t0);

  for (int k = 0; k < 3; ++k) {
    c2.require(errors[k] >= expected_err[k] / 2 && errors[k] <= expected_err[k] * 2,
               fmt("error %.4e outside factor 2 of %.4e", errors[k], expected_err[k]));
  }
  for (int k = 0; k + 1 < 3; ++k) {
    const double ratio = errors[k] / errors[k + 1];
    c2.require(ratio >= 3.0 && ratio <= 5.5, fmt("error ratio %.2f outside [3, 5.5]", ratio));
  }
  c2.require(elapsed < 180.0, fmt("runs took %.1f s (limit 180 s)", elapsed));
  c2.info(fmt("total %.1f s", elapsed));
  report(c2);

  for (int k = 0; k + 1 < 3; ++k) {
    const double drop = objectives[k] / objectives[k + 1];
    c3.require(drop >= 10.0, fmt("F_r drop %.2fx below 10x at halving %d", drop, k));
    c3.info(fmt("F_r drop per halving: %.1fx", drop));
  }
  report(c3);
}

void criterion_4_mesh_independence() {
  Criterion c(
      "criterion 4: mesh-independent iteration counts at h_y = 1/128 "
      "(example 1: 32 +- 3, example 2: 46 +- 4, < 10 min)");
  const auto t0 = std::chrono::steady_clock::now();

  for (const int nu : {192, 384, 768, 1536, 3072, 6144}) {
    RunConfig config = example_config(Preset::Example1, 128, nu);
    const SingleRunResult& res = record_run("ex1_grid_nu" + std::to_string(nu), config);
    const int iters = res.report.iterations();
    const bool converged = res.report.reason == StopReason::Converged;
    c.require(converged && std::abs(iters - 32) <= 3,
              "example1 nu = " + std::to_string(nu) + ": " + to_string(res.report.reason) +
                  " after " + std::to_string(iters) + " iterations (want 32 +- 3)");
    c.info("example1 nu = " + std::to_string(nu) + ": " + std::to_string(iters) + " iterations");
  }
  for (const int nu : {128, 256, 512, 1024, 2048, 4096}) {
    RunConfig config = example_config(Preset::Example2, 128, nu);
    config.nu1 = 1.0 / 1024.0;
    const SingleRunResult& res = record_run("ex2_grid_nu" + std::to_string(nu), config);
    const int iters = res.report.iterations();
    const bool converged = res.report.reason == StopReason::Converged;
    c.require(converged && std::abs(iters - 46) <= 4,
              "example2 nu = " + std::to_string(nu) + ": " + to_string(res.report.reason) +
                  " after " + std::to_string(iters) + " iterations (want 46 +- 4)");
    c.info("example2 nu = " + std::to_string(nu) + ": " + std::to_string(iters) + " iterations");
  }
  const double elapsed = seconds_since(t0);
  c.require(elapsed < 600.0, fmt("grid took %.1f s (limit 600 s)", elapsed));
  c.info(fmt("total %.1f s", elapsed));
  report(c);
}

void criterion_5_sparsity() {
  Criterion c(
      "criterion 5: example 2 support of the final control shrinks with nu1 and vanishes at "
      "nu1 = 1/128");
  const double nu1_values[7] = {0.0,       1.0 / 4096, 1.0 / 2048, 1.0 / 1024,
                                1.0 / 512, 1.0 / 256,  1.0 / 128};
  double previous = -1.0;
  for (int k = 0; k < 7; ++k) {
    RunConfig config = example_config(Preset::Example2, 128, 512);
    config.nu1 = nu1_values[k];
    const SingleRunResult& res =
        record_run("ex2_sparsity_" + std::to_string(k), config);
    const double support = res.support_measure;
    c.info(fmt("nu1 = %.8f: support measure %.4f", nu1_values[k], support));
    if (previous >= 0.0) {
      c.require(support <= previous + 1e-12,
                fmt("support %.4f grew over %.4f", support, previous));
    }
    if (k == 6) {
      c.require(support == 0.0, fmt("support at nu1 = 1/128 is %.3e, expected exactly 0", support));
      c.require(res.report.final_control.cells.cwiseAbs().maxCoeff() == 0.0,
                "final control at nu1 = 1/128 is not identically zero");
    }
    previous = support;
  }
  report(c);
}

void criterion_6_properties() {
  Criterion c("criterion 6: property suite (gradient FD, Theta ordering, descent, state bound, "
              "g_u oracle, adjoint pairing)");

  // a) gradient vs central finite differences, h = 1/16, 16 control cells.
  // Lumped data terms (where the adjoint gradient is the exact discrete
  // derivative) with the p2 cell averaging refined far past the production
  // quadrature, so that only the adjoint machinery is measured.
  {
    RunConfig config = example_config(Preset::Example1, 16, 16);
    ProblemSetup setup = make_problem(config);
    DirichletSystem sys(setup.mesh);
    ProblemParams params = setup.params;
    params.data_quadrature = DataQuadrature::Lumped;
    params.nu1 = 0.002;
    std::mt19937 rng(31415);
    const PwcControl u = random_control(rng, params.r, 16, 0.2, 1.8);
    const PwcControl grad = l2_gradient(u, params, sys, 4096);
    auto objective_at = [&](const PwcControl& v) {
      return objective(v, solve_state(v, params, sys).y, params, sys).total();
    };
    const double step = 1e-5;
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const PwcControl z = random_control(rng, params.r, 16, -1.0, 1.0);
      PwcControl up = u, dn = u;
      up.cells += step * z.cells;
      dn.cells -= step * z.cells;
      const double fd = (objective_at(up) - objective_at(dn)) / (2 * step);
      const double pairing = u.cell_width() * grad.cells.dot(z.cells);
      worst = std::max(worst, std::abs(fd - pairing) /
                                  std::max({std::abs(fd), std::abs(pairing), 1e-30}));
    }
    c.require(worst <= 1e-4, fmt("6a: worst FD relative error %.3e > 1e-4", worst));
    c.info(fmt("6a: worst FD relative error %.3e over 20 directions", worst));
  }

  // b) Theta ordering on 100 random pairs.
  {
    std::mt19937 rng(140);
    bool ordered = true;
    for (int rep = 0; rep < 100 && ordered; ++rep) {
      const int n = 4 + static_cast<int>(rng() % 60);
      PwcControl u = random_control(rng, 2.0, n, 0.0, 2.0);
      for (int k = 0; k < n; k += 3) u.cells[k] = 0.0;
      const PwcControl g = random_control(rng, 2.0, n, -3.0, 3.0);
      std::uniform_real_distribution<double> eps_dist(1e-12, 1e-2);
      double e1 = eps_dist(rng), e2 = eps_dist(rng);
      if (e1 < e2) std::swap(e1, e2);
      const double t1 = theta_eps(u, g, e1);
      const double t2 = theta_eps(u, g, e2);
      const double t0 = theta_zero(u, g);
      ordered = t1 >= 0 && t1 <= t2 * (1 + 1e-13) + 1e-15 && t2 <= t0 * (1 + 1e-13) + 1e-15;
    }
    c.require(ordered, "6b: Theta ordering violated");
    c.info("6b: Theta_eps1 <= Theta_eps2 <= Theta_0 on 100 random pairs");
  }

  // c) descent inequality at every accepted step of every recorded run.
  {
    int steps = 0;
    bool descent_ok = true;
    for (const NamedRun& run : g_runs) {
      const double theta_factor = run.config.optim.theta;
      const auto& hist = run.result.report.history;
      for (std::size_t k = 0; k + 1 < hist.size(); ++k) {
        ++steps;
        const bool ok = hist[k + 1].objective +
                            hist[k].tau * theta_factor * hist[k].theta * hist[k].theta <=
                        hist[k].objective + 1e-14 * (1 + hist[k].objective);
        if (!ok) {
          descent_ok = false;
          c.require(false, "6c: descent inequality violated in run " + run.name +
                               " at step " + std::to_string(k));
        }
      }
    }
    c.require(steps > 0, "6c: no accepted steps recorded");
    if (descent_ok) c.info(fmt("6c: descent inequality held at %.0f accepted steps",
                               static_cast<double>(steps)));
  }

  // d) sup-norm bound for 50 random nonnegative controls per example.
  {
    bool bound_ok = true;
    for (const Preset preset : {Preset::Example1, Preset::Example2}) {
      RunConfig config = example_config(preset, 32, static_cast<int>(default_config(preset).r) * 64);
      const ProblemSetup setup = make_problem(config);
      DirichletSystem sys(setup.mesh);
      const double r_p = solve_poisson(setup.params, sys).r_p;
      std::mt19937 rng(preset == Preset::Example1 ? 71 : 72);
      NodalField warm(setup.mesh);
      for (int rep = 0; rep < 50; ++rep) {
        const PwcControl u = random_control(rng, setup.params.r, config.n_u, 0.0, 4.0);
        NewtonSettings settings = config.newton;
        settings.warm_start = rep ? &warm : nullptr;
        const StateResult state = solve_state(u, setup.params, sys, settings);
        if (!check_supnorm_bound(state.y, r_p, 0.02)) bound_ok = false;
        warm = state.y;
      }
    }
    c.require(bound_ok, "6d: a state exceeded r_P * 1.02");
    c.info("6d: |y|_inf <= 1.02 r_P for 50 random controls per example");
  }

  // e) closed-form g_u vs a one-million-panel midpoint oracle.
  {
    std::mt19937 rng(20240901);
    std::uniform_real_distribution<double> tdist(-4.0, 4.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const int n = 1 + static_cast<int>(rng() % 48);
      const PwcControl u = random_control(rng, 3.0, n, 0.0, 5.0);
      const double t = tdist(rng);

      const double lo = std::min(0.0, t), hi = std::max(0.0, t);
      std::vector<double> cuts{lo, hi};
      for (int k = 0; k <= n; ++k) {
        const double b = u.cell_left(k);
        if (b > lo && b < hi) cuts.push_back(b);
      }
      std::sort(cuts.begin(), cuts.end());
      double sum = 0.0, comp = 0.0;
      for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
        const double a = cuts[piece], b = cuts[piece + 1];
        const long panels =
            std::max<long>(1, static_cast<long>(1000000 * (b - a) / std::max(hi - lo, 1e-300)));
        const double w = (b - a) / panels;
        for (long j = 0; j < panels; ++j) {
          const double term = w * compose_u_of_y(u, a + (j + 0.5) * w) - comp;
          const double next = sum + term;
          comp = (next - sum) - term;
          sum = next;
        }
      }
      const double oracle = t >= 0 ? sum : -sum;
      worst = std::max(worst, std::abs(g_u_eval(u, t) - oracle));
    }
    c.require(worst <= 1e-9, fmt("6e: worst |closed form - oracle| = %.3e > 1e-9", worst));
    c.info(fmt("6e: worst quadrature mismatch %.3e over 100 samples", worst));
  }

  // f) forward sensitivity vs adjoint pairing.
  {
    RunConfig config = example_config(Preset::Example1, 16, 96);
    const ProblemSetup setup = make_problem(config);
    DirichletSystem sys(setup.mesh);
    std::mt19937 rng(2718);
    const PwcControl u = random_control(rng, setup.params.r, 96, 0.0, 2.0);
    const StateResult state = solve_state(u, setup.params, sys);
    const NodalField p1 = solve_adjoint_p1(u, state.y, setup.params, sys);
    const Eigen::VectorXd mass = sys.lumped_mass().mat.diagonal();
    const Eigen::VectorXd coeff = compose_u_of_y(u, state.y).values;
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const PwcControl z = random_control(rng, setup.params.r, 96, -1.0, 1.0);
      const Eigen::VectorXd gz = g_u_field(z, state.y).values;
      const Eigen::VectorXd delta = sys.solve_shifted(coeff, -mass.cwiseProduct(gz));
      const double lhs = delta.dot(data_mass_apply(sys, setup.params.data_quadrature,
                                                   state.y.values - setup.params.y_desired.values));
      const double rhs = -gz.dot(mass.cwiseProduct(p1.values));
      worst = std::max(worst,
                       std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    c.require(worst <= 1e-10, fmt("6f: worst pairing mismatch %.3e > 1e-10", worst));
    c.info(fmt("6f: worst adjoint pairing mismatch %.3e over 10 directions", worst));
  }

  report(c);
}

void criterion_7_stationarity_residual() {
  Criterion c("criterion 7: projection-formula residual <= 1e-4 (1 + |u|) at every converged "
              "terminus");
  int checked = 0;
  for (const NamedRun& run : g_runs) {
    if (run.result.report.reason != StopReason::Converged) continue;
    if (run.config.optim.eps2 != 1e-8) continue;
    ++checked;
    const PwcControl& u = run.result.report.final_control;
    const double u_norm = std::sqrt(u.cell_width() * u.cells.squaredNorm());
    const double residual = run.result.report.stationarity_residual;
    c.require(residual <= 1e-4 * (1 + u_norm),
              run.name + fmt(": residual %.3e > 1e-4 (1 + %.3f)", residual, u_norm));
  }
  c.require(checked > 0, "no converged runs were recorded");
  c.info(fmt("checked %.0f converged runs", static_cast<double>(checked)));
  report(c);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_poisson_bound();
  criteria_2_3_refinement();
  criterion_4_mesh_independence();
  criterion_5_sparsity();
  criterion_6_properties();
  criterion_7_stationarity_residual();

  int failed = 0;
  for (const auto& c : g_criteria) {
    if (!c.ok) ++failed;
  }
  std::printf("----\n%zu criteria, %d failed, %.1f s total\n", g_criteria.size(), failed,
              seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
