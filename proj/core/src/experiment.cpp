#include "opident/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "opident/io.hpp"

namespace opident {

namespace {

constexpr double kPi = std::numbers::pi;

double example1_yd(double x1, double x2) {
  return std::sin(2 * kPi * x1) * std::sin(2 * kPi * x2);
}
double example1_f(double x1, double x2) {
  return (8 * kPi * kPi + 1) * std::sin(2 * kPi * x1) * std::sin(2 * kPi * x2);
}
double example2_yd(double x1, double x2) {
  return -0.125 + 0.275 * std::sin(2 * kPi * x1) * std::sin(2 * kPi * x2);
}
double example2_f(double x1, double x2) {
  return 8 * kPi * kPi * std::sin(2 * kPi * x1) * std::sin(2 * kPi * x2);
}

}  // namespace

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::Example1: return "example1";
    case Preset::Example2: return "example2";
    case Preset::Custom: return "custom";
  }
  return "unknown";
}

Preset preset_from_string(const std::string& name) {
  if (name == "example1") return Preset::Example1;
  if (name == "example2") return Preset::Example2;
  if (name == "custom") return Preset::Custom;
  throw std::invalid_argument("unknown preset: " + name);
}

RunConfig default_config(Preset preset) {
  RunConfig c;
  c.preset = preset;
  c.newton.tol = 1e-12;
  c.optim.omega = 0.8;
  c.optim.theta = 0.8;
  c.optim.eps1 = 1e-16;
  c.optim.eps2 = 1e-8;
  c.optim.tau_floor = 1e-10;
  c.optim.max_outer = 500;
  switch (preset) {
    case Preset::Example1:
      c.r = 3.0;
      c.nu1 = 0.0;
      c.nu2 = 1e-3;
      c.optim.sigma = 512.0;
      c.optim.q_points = 5;
      break;
    case Preset::Example2:
      c.r = 2.0;
      c.nu1 = 1.0 / 1024.0;
      c.nu2 = 1e-4;
      c.optim.sigma = 2048.0;
      c.optim.q_points = 10;
      break;
    case Preset::Custom:
      c.r = 0.0;  // must be supplied
      c.nu1 = 0.0;
      c.nu2 = 0.0;
      c.optim.sigma = 512.0;
      c.optim.q_points = 5;
      break;
  }
  c.n_y = 32;
  c.n_u = c.r > 0 ? static_cast<int>(std::lround(2 * c.r * c.n_y)) : 0;
  return c;
}

double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const double num = std::stod(text.substr(0, slash));
    const double den = std::stod(text.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("division by zero in: " + text);
    return num / den;
  }
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw std::invalid_argument("not a number: " + text);
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(item));
  }
  return out;
}

int parse_int(const std::string& text) {
  const double v = parse_number(text);
  const int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-9) throw std::invalid_argument("expected an integer: " + text);
  return i;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // visual grouping only
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    }
    entries[key] = value;
  }
  return entries;
}

RunConfig config_from_entries(const std::map<std::string, std::string>& entries) {
  Preset preset = Preset::Example1;
  if (auto it = entries.find("preset"); it != entries.end()) {
    preset = preset_from_string(it->second);
  }
  RunConfig c = default_config(preset);
  bool n_u_given = false;

  for (const auto& [key, value] : entries) {
    if (key == "preset") {
      continue;
    } else if (key == "ny") {
      c.n_y = parse_int(value);
    } else if (key == "nu") {
      c.n_u = parse_int(value);
      n_u_given = true;
    } else if (key == "r") {
      c.r = parse_number(value);
    } else if (key == "nu1") {
      c.nu1 = parse_number(value);
    } else if (key == "nu2") {
      c.nu2 = parse_number(value);
    } else if (key == "q") {
      c.optim.q_points = parse_int(value);
    } else if (key == "eps1") {
      c.optim.eps1 = parse_number(value);
    } else if (key == "eps2") {
      c.optim.eps2 = parse_number(value);
    } else if (key == "sigma") {
      c.optim.sigma = parse_number(value);
    } else if (key == "omega") {
      c.optim.omega = parse_number(value);
    } else if (key == "theta") {
      c.optim.theta = parse_number(value);
    } else if (key == "tau_floor") {
      c.optim.tau_floor = parse_number(value);
    } else if (key == "max_outer") {
      c.optim.max_outer = parse_int(value);
    } else if (key == "newton_tol") {
      c.newton.tol = parse_number(value);
    } else if (key == "newton_max_iters") {
      c.newton.max_iters = parse_int(value);
    } else if (key == "linear_tol") {
      c.newton.linear_tol = parse_number(value);
    } else if (key == "a2_threshold") {
      c.a2_threshold = parse_number(value);
    } else if (key == "quadrature") {
      if (value == "consistent") {
        c.data_quadrature = DataQuadrature::Consistent;
      } else if (value == "lumped") {
        c.data_quadrature = DataQuadrature::Lumped;
      } else {
        throw std::invalid_argument("quadrature must be consistent or lumped, got: " + value);
      }
    } else if (key == "out") {
      c.out_dir = value;
    } else if (key == "f_file") {
      c.f_file = value;
    } else if (key == "yd_file") {
      c.yd_file = value;
    } else if (key == "ud_file") {
      c.ud_file = value;
    } else if (key == "ny_list") {
      c.ny_list = parse_list<int>(value, parse_int);
    } else if (key == "nu_list") {
      c.nu_list = parse_list<int>(value, parse_int);
    } else if (key == "nu1_list") {
      c.nu1_list = parse_list<double>(value, parse_number);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  if (!n_u_given && c.r > 0) {
    c.n_u = static_cast<int>(std::lround(2 * c.r * c.n_y));
  }
  return c;
}

ProblemSetup make_problem(const RunConfig& config) {
  if (config.n_y < 1) throw std::invalid_argument("config: ny must be >= 1");
  if (config.n_u < 1) throw std::invalid_argument("config: nu must be >= 1");
  auto mesh = std::make_shared<const Mesh>(build_mesh(config.n_y));

  ProblemSetup setup;
  setup.mesh = mesh;
  ProblemParams& p = setup.params;
  p.r = config.r;
  p.nu1 = config.nu1;
  p.nu2 = config.nu2;
  p.data_quadrature = config.data_quadrature;

  switch (config.preset) {
    case Preset::Example1:
      p.y_desired = sample_nodal(mesh, example1_yd);
      p.rhs = sample_nodal(mesh, example1_f);
      p.u_desired = PwcControl(p.r, config.n_u, 1.0);
      break;
    case Preset::Example2:
      p.y_desired = sample_nodal(mesh, example2_yd);
      p.rhs = sample_nodal(mesh, example2_f);
      p.u_desired = PwcControl(p.r, config.n_u, 0.0);
      break;
    case Preset::Custom: {
      if (config.f_file.empty() || config.yd_file.empty() || config.ud_file.empty()) {
        throw std::invalid_argument("custom preset needs f_file, yd_file and ud_file");
      }
      p.rhs = read_nodal(config.f_file, mesh);
      p.y_desired = read_nodal(config.yd_file, mesh);
      p.u_desired = read_control(config.ud_file);
      if (p.u_desired.cell_count() != config.n_u || p.u_desired.r != p.r) {
        throw std::invalid_argument("ud_file grid does not match r/nu of the config");
      }
      break;
    }
  }
  p.validate();
  return setup;
}

namespace {

std::optional<double> analytic_control(Preset preset) {
  if (preset == Preset::Example1) return 1.0;  // unique global solution of the preset
  return std::nullopt;
}

double support_measure(const PwcControl& u) {
  int positive = 0;
  for (int k = 0; k < u.cell_count(); ++k) {
    if (u.cells[k] > 0.0) ++positive;
  }
  return positive * u.cell_width();
}

void write_run_artifacts(const RunConfig& config, const std::string& dir,
                         const SingleRunResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_history_csv(dir + "/history.csv", result.report);
  write_control(dir + "/control.txt", result.report.final_control);
  write_nodal(dir + "/state.txt", result.report.final_state);
  write_control(dir + "/p2.txt", result.final_p2);
  write_control(dir + "/gradient.txt", result.final_gradient);

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("preset", to_string(config.preset));
  kv.emplace_back("ny", std::to_string(config.n_y));
  kv.emplace_back("nu", std::to_string(config.n_u));
  kv.emplace_back("r", format_double(config.r));
  kv.emplace_back("nu1", format_double(config.nu1));
  kv.emplace_back("nu2", format_double(config.nu2));
  kv.emplace_back("q", std::to_string(config.optim.q_points));
  kv.emplace_back("sigma", format_double(config.optim.sigma));
  kv.emplace_back("omega", format_double(config.optim.omega));
  kv.emplace_back("theta", format_double(config.optim.theta));
  kv.emplace_back("eps1", format_double(config.optim.eps1));
  kv.emplace_back("eps2", format_double(config.optim.eps2));
  kv.emplace_back("tau_floor", format_double(config.optim.tau_floor));
  kv.emplace_back("max_outer", std::to_string(config.optim.max_outer));
  kv.emplace_back("newton_tol", format_double(config.newton.tol));
  kv.emplace_back("quadrature",
                  config.data_quadrature == DataQuadrature::Consistent ? "consistent" : "lumped");
  kv.emplace_back("iterations", std::to_string(result.report.iterations()));
  kv.emplace_back("termination", to_string(result.report.reason));
  kv.emplace_back("final_F_r", format_double(result.report.final_objective));
  kv.emplace_back("final_theta_eps1", format_double(result.report.final_theta));
  kv.emplace_back("stationarity_residual", format_double(result.report.stationarity_residual));
  kv.emplace_back("tracking_term", format_double(result.final_breakdown.tracking));
  kv.emplace_back("l1_term", format_double(result.final_breakdown.l1_term));
  kv.emplace_back("l2_term", format_double(result.final_breakdown.l2_term));
  kv.emplace_back("r_P", format_double(result.r_p));
  kv.emplace_back("support_measure", format_double(result.support_measure));
  kv.emplace_back("supnorm_bound_ok", result.supnorm_ok ? "yes" : "no");
  kv.emplace_back("a2_max_fraction", format_double(result.a2.max_fraction));
  kv.emplace_back("a2_warning", result.a2.passed ? "no" : "yes");
  if (result.linf_error) {
    kv.emplace_back("linf_error", format_double(*result.linf_error));
  }
  write_summary(dir + "/summary.txt", kv);
}

SingleRunResult run_single_impl(const RunConfig& config, const std::string& out_dir) {
  const ProblemSetup setup = make_problem(config);
  DirichletSystem sys(setup.mesh);

  SingleRunResult result;
  result.a2 = check_a2(setup.params.rhs, config.a2_threshold);
  result.r_p = solve_poisson(setup.params, sys, config.newton.linear_tol).r_p;

  const PwcControl u0(config.r, config.n_u, 0.0);
  result.report = gradient_projection(u0, setup.params, sys, config.optim, config.newton);
  result.final_breakdown =
      objective(result.report.final_control, result.report.final_state, setup.params, sys);
  result.supnorm_ok = check_supnorm_bound(result.report.final_state, result.r_p);
  result.support_measure = support_measure(result.report.final_control);

  const NodalField p1 = solve_adjoint_p1(result.report.final_control, result.report.final_state,
                                         setup.params, sys, config.newton.linear_tol);
  const LevelSetIntegral p2(dual_weights(p1, setup.params, sys),
                            result.report.final_state.values);
  result.final_p2 = project_onto_pwc([&p2](double s) { return p2(s); }, setup.params.r,
                                     config.n_u, config.optim.q_points);
  result.final_gradient =
      gradient_from_p2(result.report.final_control, result.final_p2, setup.params);
  if (const auto exact = analytic_control(config.preset)) {
    result.linf_error = (result.report.final_control.cells.array() - *exact).abs().maxCoeff();
  }
  if (!out_dir.empty()) {
    write_run_artifacts(config, out_dir, result);
  }
  return result;
}

}  // namespace

SingleRunResult run_single(const RunConfig& config) {
  return run_single_impl(config, config.out_dir);
}

namespace {

void write_table_csv(const std::string& dir, const SweepResult& table) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream out(dir + "/table.csv");
  if (!out) throw std::runtime_error("cannot write table.csv under " + dir);
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    out << (j ? "," : "") << table.header[j];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.values.size(); ++j) {
      out << (j ? "," : "") << row.values[j];
    }
    out << '\n';
  }
}

std::string cell_dir(const RunConfig& config, const std::string& tag) {
  return config.out_dir + "/" + tag;
}

}  // namespace

SweepResult run_sweep(const RunConfig& config) {
  SweepResult table;

  if (!config.nu1_list.empty()) {
    table.header = {"nu1",     "iterations", "termination", "support_measure", "F_r",
                    "tracking", "l1_term",   "l2_term",     "theta"};
    for (const double nu1 : config.nu1_list) {
      RunConfig cell = config;
      cell.nu1 = nu1;
      cell.nu1_list.clear();
      SweepRow row;
      row.values.push_back(format_double(nu1));
      try {
        const std::string dir =
            config.out_dir.empty() ? "" : cell_dir(config, "nu1_" + format_double(nu1));
        const SingleRunResult res = run_single_impl(cell, dir);
        const bool reached = res.report.reason == StopReason::Converged;
        row.values.push_back(reached ? std::to_string(res.report.iterations()) : "inf");
        row.values.push_back(to_string(res.report.reason));
        row.values.push_back(format_double(res.support_measure));
        row.values.push_back(format_double(res.report.final_objective));
        row.values.push_back(format_double(res.final_breakdown.tracking));
        row.values.push_back(format_double(res.final_breakdown.l1_term));
        row.values.push_back(format_double(res.final_breakdown.l2_term));
        row.values.push_back(format_double(res.report.final_theta));
      } catch (const std::exception&) {
        table.all_cells_ok = false;
        row.values.resize(table.header.size(), "inf");
      }
      table.rows.push_back(std::move(row));
    }
  } else if (!config.ny_list.empty() && !config.nu_list.empty()) {
    table.header.push_back("ny\\nu");
    for (const int nu : config.nu_list) table.header.push_back(std::to_string(nu));
    for (const int ny : config.ny_list) {
      SweepRow row;
      row.values.push_back(std::to_string(ny));
      for (const int nu : config.nu_list) {
        RunConfig cell = config;
        cell.n_y = ny;
        cell.n_u = nu;
        cell.ny_list.clear();
        cell.nu_list.clear();
        cell.out_dir.clear();
        try {
          const SingleRunResult res = run_single(cell);
          row.values.push_back(res.report.reason == StopReason::Converged
                                   ? std::to_string(res.report.iterations())
                                   : "inf");
        } catch (const std::exception&) {
          table.all_cells_ok = false;
          row.values.push_back("inf");
        }
      }
      table.rows.push_back(std::move(row));
    }
  } else if (!config.ny_list.empty()) {
    // paired refinement h_u = h_y
    table.header = {"ny", "nu", "iterations", "termination", "F_r", "theta", "linf_error",
                    "error_ratio"};
    double previous_error = 0.0;
    bool have_previous = false;
    for (const int ny : config.ny_list) {
      RunConfig cell = config;
      cell.n_y = ny;
      cell.n_u = static_cast<int>(std::lround(2 * config.r * ny));
      cell.ny_list.clear();
      SweepRow row;
      row.values.push_back(std::to_string(ny));
      row.values.push_back(std::to_string(cell.n_u));
      try {
        const std::string dir =
            config.out_dir.empty() ? "" : cell_dir(config, "ny_" + std::to_string(ny));
        const SingleRunResult res = run_single_impl(cell, dir);
        row.values.push_back(std::to_string(res.report.iterations()));
        row.values.push_back(to_string(res.report.reason));
        row.values.push_back(format_double(res.report.final_objective));
        row.values.push_back(format_double(res.report.final_theta));
        if (res.linf_error) {
          row.values.push_back(format_double(*res.linf_error));
          if (have_previous && *res.linf_error > 0) {
            row.values.push_back(format_double(previous_error / *res.linf_error));
          } else {
            row.values.push_back("");
          }
          previous_error = *res.linf_error;
          have_previous = true;
        } else {
          row.values.push_back("");
          row.values.push_back("");
        }
      } catch (const std::exception&) {
        table.all_cells_ok = false;
        row.values.resize(table.header.size(), "inf");
      }
      table.rows.push_back(std::move(row));
    }
  }
  // all lists empty: an empty table is a successful no-op

  if (!config.out_dir.empty()) {
    write_table_csv(config.out_dir, table);
  }
  return table;
}

}  // namespace opident
