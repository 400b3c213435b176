#include "opident/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opident {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

}  // namespace

void write_control(const std::string& path, const PwcControl& u) {
  auto out = open_out(path);
  out << format_double(u.r) << ' ' << u.cell_count() << '\n';
  for (int k = 0; k < u.cell_count(); ++k) {
    out << format_double(u.cells[k]) << '\n';
  }
}

PwcControl read_control(const std::string& path) {
  auto in = open_in(path);
  double r = 0.0;
  int n = 0;
  if (!(in >> r >> n) || n < 1 || !(r > 0.0)) {
    throw std::runtime_error("malformed control file: " + path);
  }
  PwcControl u(r, n);
  for (int k = 0; k < n; ++k) {
    if (!(in >> u.cells[k])) {
      throw std::runtime_error("control file ended early: " + path);
    }
  }
  return u;
}

void write_nodal(const std::string& path, const NodalField& field) {
  auto out = open_out(path);
  for (int i = 0; i < field.values.size(); ++i) {
    out << format_double(field.mesh->vertices[i][0]) << ' '
        << format_double(field.mesh->vertices[i][1]) << ' '
        << format_double(field.values[i]) << '\n';
  }
}

NodalField read_nodal(const std::string& path, std::shared_ptr<const Mesh> mesh) {
  auto in = open_in(path);
  NodalField field(mesh);
  double x = 0.0, y = 0.0, v = 0.0;
  const double h = mesh->width();
  for (int i = 0; i < mesh->vertex_count(); ++i) {
    if (!(in >> x >> y >> v)) {
      throw std::runtime_error("nodal file has fewer rows than mesh vertices: " + path);
    }
    if (std::abs(x - mesh->vertices[i][0]) > 1e-9 * (1 + h) ||
        std::abs(y - mesh->vertices[i][1]) > 1e-9 * (1 + h)) {
      throw std::runtime_error("nodal file coordinates do not match the mesh: " + path);
    }
    field.values[i] = v;
  }
  return field;
}

void write_history_csv(const std::string& path, const RunReport& report) {
  auto out = open_out(path);
  out << "i,F_r,theta,tau,ls_trials,newton_iters\n";
  for (const auto& rec : report.history) {
    out << rec.i << ',' << format_double(rec.objective) << ',' << format_double(rec.theta) << ','
        << format_double(rec.tau) << ',' << rec.ls_trials << ',' << rec.newton_iters << '\n';
  }
}

void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = open_out(path);
  for (const auto& [key, value] : entries) {
    out << key << " = " << value << '\n';
  }
}

}  // namespace opident
