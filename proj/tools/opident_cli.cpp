// Command-line driver for the superposition-operator identification solver.
//
//   opident run   --preset example1 --ny 128 --eps2 1e-8 --out results/
//   opident sweep --preset example2 --nu1-list 0,1/4096,1/2048 --ny 128 --out sweep/
//
// `run` solves a single configuration and writes history.csv, control.txt,
// state.txt and summary.txt; `sweep` aggregates runs over grid or nu1 lists
// into table.csv. Exit codes: 0 converged or stopped at the step-size floor,
// 3 iteration budget exhausted, 1 configuration or solver error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "opident/experiment.hpp"
#include "opident/io.hpp"

namespace {

struct CliOptions {
  std::string config_file;
  std::map<std::string, std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_file, "flat key-value config file");
  auto capture = [&opts](const std::string& key) {
    return [&opts, key](const std::string& value) { opts.overrides[key] = value; };
  };
  cmd->add_option_function<std::string>("--preset", capture("preset"),
                                        "example1 | example2 | custom");
  cmd->add_option_function<std::string>("--ny", capture("ny"), "state cells per side (h_y = 1/ny)");
  cmd->add_option_function<std::string>("--nu", capture("nu"), "control cells over (-r, r)");
  cmd->add_option_function<std::string>("--r", capture("r"), "control half-interval");
  cmd->add_option_function<std::string>("--nu1", capture("nu1"), "L1 weight (accepts a/b)");
  cmd->add_option_function<std::string>("--nu2", capture("nu2"), "L2 weight (accepts a/b)");
  cmd->add_option_function<std::string>("--q", capture("q"), "cell-quadrature points");
  cmd->add_option_function<std::string>("--eps1", capture("eps1"), "Theta relaxation");
  cmd->add_option_function<std::string>("--eps2", capture("eps2"), "termination tolerance");
  cmd->add_option_function<std::string>("--sigma", capture("sigma"), "initial step size");
  cmd->add_option_function<std::string>("--omega", capture("omega"), "backtracking factor");
  cmd->add_option_function<std::string>("--theta", capture("theta"), "sufficient-decrease factor");
  cmd->add_option_function<std::string>("--tau-floor", capture("tau_floor"),
                                        "step-size floor that stops the run");
  cmd->add_option_function<std::string>("--max-outer", capture("max_outer"),
                                        "outer iteration budget");
  cmd->add_option_function<std::string>("--newton-tol", capture("newton_tol"),
                                        "state residual tolerance");
  cmd->add_option_function<std::string>("--out", capture("out"), "output directory");
  cmd->add_option_function<std::string>("--f-file", capture("f_file"), "custom rhs nodal dump");
  cmd->add_option_function<std::string>("--yd-file", capture("yd_file"),
                                        "custom desired-state nodal dump");
  cmd->add_option_function<std::string>("--ud-file", capture("ud_file"),
                                        "custom desired-control file");
}

opident::RunConfig resolve(const CliOptions& opts) {
  std::map<std::string, std::string> entries;
  if (!opts.config_file.empty()) {
    entries = opident::parse_config_file(opts.config_file);
  }
  for (const auto& [key, value] : opts.overrides) {
    entries[key] = value;
  }
  return opident::config_from_entries(entries);
}

void print_run(const opident::SingleRunResult& result) {
  const auto& rep = result.report;
  std::printf("termination       %s after %d iterations\n",
              opident::to_string(rep.reason).c_str(), rep.iterations());
  std::printf("final F_r         %.6e\n", rep.final_objective);
  std::printf("final Theta_eps1  %.6e\n", rep.final_theta);
  std::printf("stationarity res  %.6e\n", rep.stationarity_residual);
  std::printf("r_P               %.6f\n", result.r_p);
  std::printf("support measure   %.6f\n", result.support_measure);
  if (result.linf_error) {
    std::printf("Linf error        %.6e\n", *result.linf_error);
  }
  if (!result.a2.passed) {
    std::printf("warning: %.1f%% of interior rhs nodes share the value %g\n",
                100.0 * result.a2.max_fraction, result.a2.level_value);
  }
  if (!result.supnorm_ok) {
    std::printf("warning: final state exceeds the a-priori bound r_P\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"identification of the superposition operator in -Lap y + g_u(y) = f"};
  app.require_subcommand(1);

  CliOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "solve one configuration");
  add_common_flags(run_cmd, run_opts);

  CliOptions sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "aggregate runs over parameter lists");
  add_common_flags(sweep_cmd, sweep_opts);
  auto capture_sweep = [&sweep_opts](const std::string& key) {
    return [&sweep_opts, key](const std::string& value) { sweep_opts.overrides[key] = value; };
  };
  sweep_cmd->add_option_function<std::string>("--ny-list", capture_sweep("ny_list"),
                                              "comma-separated ny values");
  sweep_cmd->add_option_function<std::string>("--nu-list", capture_sweep("nu_list"),
                                              "comma-separated nu values (grid mode)");
  sweep_cmd->add_option_function<std::string>("--nu1-list", capture_sweep("nu1_list"),
                                              "comma-separated nu1 values (accepts a/b)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const opident::RunConfig config = resolve(run_opts);
      const opident::SingleRunResult result = opident::run_single(config);
      print_run(result);
      return result.report.reason == opident::StopReason::MaxOuter ? 3 : 0;
    }
    const opident::RunConfig config = resolve(sweep_opts);
    const opident::SweepResult table = opident::run_sweep(config);
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      std::printf("%s%s", j ? "," : "", table.header[j].c_str());
    }
    std::printf("\n");
    for (const auto& row : table.rows) {
      for (std::size_t j = 0; j < row.values.size(); ++j) {
        std::printf("%s%s", j ? "," : "", row.values[j].c_str());
      }
      std::printf("\n");
    }
    return 0;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
