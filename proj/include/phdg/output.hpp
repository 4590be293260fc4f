#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "phdg/discretization.hpp"
#include "phdg/stepper.hpp"
#include "phdg/verification.hpp"

namespace phdg {

/// Six significant digits; "-" for undefined (NaN) values.
std::string format_number(double v);

/// Columns: h|tau, level, N, then each error followed by its rate.
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

struct DiagnosticsSeries {
  std::string label;  // sweep point, e.g. "h4_N820"
  int mesh_level = 0;
  int time_steps = 0;
  std::vector<StepDiagnostics> steps;
};

/// One row per accepted step of every series, in the given order.
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsSeries>& series,
                           bool energy_columns = true);

/// Legacy ASCII unstructured grid with cellwise P1 point data: every cell is
/// written with its own three vertices so the discontinuous fields survive.
/// Point data: u (vector), p, C11, C12, C22, detC.
void write_vtk(std::ostream& os, const Discretization& disc, const State& state, const std::string& title);

}  // namespace phdg
