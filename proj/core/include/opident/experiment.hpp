#ifndef OPIDENT_EXPERIMENT_HPP
#define OPIDENT_EXPERIMENT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opident/optimizer.hpp"

namespace opident {

enum class Preset { Example1, Example2, Custom };
std::string to_string(Preset preset);
Preset preset_from_string(const std::string& name);

/// Fully resolved experiment description. Presets lock the analytic data;
/// custom problems read f, y_D from nodal dumps and u_D from a control file.
struct RunConfig {
  Preset preset = Preset::Example1;
  int n_y = 32;
  int n_u = 192;            // control cells over (-r, r)
  double r = 3.0;
  double nu1 = 0.0;
  double nu2 = 1e-3;
  OptimSettings optim;      // sigma/q_points per preset, omega = theta = 0.8
  NewtonSettings newton;    // tol 1e-12
  DataQuadrature data_quadrature = DataQuadrature::Consistent;
  double a2_threshold = 0.10;
  std::string out_dir;      // empty: keep results in memory only
  std::string f_file, yd_file, ud_file;  // custom preset inputs

  // sweep axes; see run_sweep
  std::vector<int> ny_list;
  std::vector<int> nu_list;
  std::vector<double> nu1_list;
};

/// Defaults for a preset (grid sizes, Tikhonov weights, optimizer settings).
RunConfig default_config(Preset preset);

/// Parses "a/b" ratios and ordinary decimal literals.
double parse_number(const std::string& text);

/// Flat key-value config file: "key = value" lines, '#' comments, optional
/// [section] headers that only group visually. Returns the raw entries.
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Builds a config from raw key-value entries. The preset (default example1)
/// supplies defaults; explicit keys override. Unknown keys are an error.
RunConfig config_from_entries(const std::map<std::string, std::string>& entries);

struct ProblemSetup {
  std::shared_ptr<const Mesh> mesh;
  ProblemParams params;
};

/// Discretizes the configured problem data onto the configured grids.
ProblemSetup make_problem(const RunConfig& config);

struct SingleRunResult {
  RunReport report;
  double r_p = 0.0;
  A2Report a2;
  bool supnorm_ok = true;
  std::optional<double> linf_error;  // vs the known optimal control, presets only
  double support_measure = 0.0;      // measure of { final u > 0 }
  ObjectiveBreakdown final_breakdown;
  PwcControl final_p2;        // cell averages at the final iterate
  PwcControl final_gradient;
};

/// Runs one experiment from u0 = 0 and, when out_dir is set, writes
/// history.csv, control.txt, state.txt, p2.txt, gradient.txt and summary.txt
/// there.
SingleRunResult run_single(const RunConfig& config);

struct SweepRow {
  std::vector<std::string> values;
};

struct SweepResult {
  std::vector<std::string> header;
  std::vector<SweepRow> rows;
  bool all_cells_ok = true;  // false when a cell failed outright (recorded as inf)
};

/// Sweep driver. Modes, chosen from the populated lists:
///  - nu1_list: one run per nu1 at fixed grid; reports support measure and
///    objective breakdown per run.
///  - ny_list + nu_list: iteration-count grid (inf when the tolerance was
///    not reached).
///  - ny_list only: paired refinement h_u = h_y with per-level F_r, theta,
///    Linf error and successive error ratios.
/// Failed cells are recorded as inf; the sweep continues. Writes table.csv
/// when out_dir is set.
SweepResult run_sweep(const RunConfig& config);

}  // namespace opident

#endif
