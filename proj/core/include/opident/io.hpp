#ifndef OPIDENT_IO_HPP
#define OPIDENT_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "opident/control.hpp"
#include "opident/fem.hpp"
#include "opident/optimizer.hpp"

namespace opident {

/// Control text format: "r n v_1 ... v_n", whitespace separated. The
/// breakpoint grid is implied by r and n.
void write_control(const std::string& path, const PwcControl& u);
PwcControl read_control(const std::string& path);

/// Nodal dump, one line per vertex: "x y value".
void write_nodal(const std::string& path, const NodalField& field);

/// Reads the value column of a nodal dump written for the same mesh; vertex
/// count and coordinates are checked.
NodalField read_nodal(const std::string& path, std::shared_ptr<const Mesh> mesh);

/// Convergence history: one row per outer iteration,
/// i,F_r,theta,tau,ls_trials,newton_iters.
void write_history_csv(const std::string& path, const RunReport& report);

/// Key-value summary block, one "key = value" line per entry, order kept.
void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& entries);

/// Deterministic float formatting used by all writers.
std::string format_double(double v);

}  // namespace opident

#endif
