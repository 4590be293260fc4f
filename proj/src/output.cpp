#include "phdg/output.hpp"

#include <cmath>
#include <cstdio>

namespace phdg {

std::string format_number(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  static const char* names[5] = {"u_l2", "u_h1", "p_l2", "C_l2", "C_h1_eps"};
  os << (report.sweep == "tau" ? "tau" : "h") << ",level,N";
  for (const char* n : names) os << ',' << n << ',' << n << "_rate";
  os << '\n';
  for (const ConvergenceRow& r : report.rows) {
    os << format_number(r.step) << ',' << r.mesh_level << ',' << r.time_steps;
    const std::array<double, 5> e = as_array(r.errors);
    for (int i = 0; i < 5; ++i) os << ',' << format_number(e[i]) << ',' << format_number(r.rates[i]);
    os << '\n';
  }
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsSeries>& series, bool energy_columns) {
  os << "point,level,N,step,time,divergence,jump,boundary_normal,min_det,min_c11,min_c22,residual,"
        "regularized_facets";
  if (energy_columns) os << ",u_l2_sq,trc_l2_sq,energy_lhs,energy_ratio";
  os << '\n';
  for (const DiagnosticsSeries& s : series) {
    for (const StepDiagnostics& d : s.steps) {
      os << s.label << ',' << s.mesh_level << ',' << s.time_steps << ',' << d.step << ',' << format_number(d.time)
         << ',' << format_number(d.mass.divergence) << ',' << format_number(d.mass.jump) << ','
         << format_number(d.mass.boundary_normal) << ',' << format_number(d.spd.min_det) << ','
         << format_number(d.spd.min_c11) << ',' << format_number(d.spd.min_c22) << ','
         << format_number(d.solver_residual) << ',' << d.regularized_facets;
      if (energy_columns)
        os << ',' << format_number(d.u_l2_sq) << ',' << format_number(d.trc_l2_sq) << ','
           << format_number(d.energy_lhs) << ',' << format_number(d.energy_ratio);
      os << '\n';
    }
  }
}

void write_vtk(std::ostream& os, const Discretization& disc, const State& state, const std::string& title) {
  const Mesh& mesh = disc.mesh();
  const int nc = disc.num_cells();
  const Eigen::VectorXd& x = state.coeffs;

  // Field values at the three vertices of every cell.
  Eigen::MatrixXd vals(3 * nc, 6);  // u0 u1 p C11 C12 C22
  Eigen::MatrixXd pts(3 * nc, 2);
  for (int c = 0; c < nc; ++c) {
    std::vector<Point> corners;
    for (int n = 0; n < 3; ++n) corners.push_back(mesh.vertices()[mesh.cell(c)[n]]);
    const PointTables t = tabulate_at(disc, c, corners);
    const Eigen::VectorXd u0 = t.values * disc.cell_coeffs_u(x, c, 0);
    const Eigen::VectorXd u1 = t.values * disc.cell_coeffs_u(x, c, 1);
    const Eigen::VectorXd p = t.pressure * disc.cell_coeffs_p(x, c);
    for (int n = 0; n < 3; ++n) {
      pts.row(3 * c + n) << corners[n].x(), corners[n].y();
      vals(3 * c + n, 0) = u0(n);
      vals(3 * c + n, 1) = u1(n);
      vals(3 * c + n, 2) = p(n);
    }
    for (int m = 0; m < 3; ++m) vals.col(3 + m).segment(3 * c, 3) = t.values * disc.cell_coeffs_C(x, c, m);
  }

  const std::vector<std::string> scalars{"p", "C11", "C12", "C22"};
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os.precision(12);
  os << "POINTS " << 3 * nc << " double\n";
  for (int i = 0; i < 3 * nc; ++i) os << pts(i, 0) << ' ' << pts(i, 1) << " 0\n";
  os << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (int c = 0; c < nc; ++c) os << "3 " << 3 * c << ' ' << 3 * c + 1 << ' ' << 3 * c + 2 << '\n';
  os << "CELL_TYPES " << nc << '\n';
  for (int c = 0; c < nc; ++c) os << "5\n";  // VTK_TRIANGLE

  os << "POINT_DATA " << 3 * nc << "\nVECTORS u double\n";
  for (int i = 0; i < 3 * nc; ++i) os << vals(i, 0) << ' ' << vals(i, 1) << " 0\n";
  for (std::size_t s = 0; s < scalars.size(); ++s) {
    os << "SCALARS " << scalars[s] << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < 3 * nc; ++i) os << vals(i, 2 + int(s)) << '\n';
  }
  os << "SCALARS detC double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < 3 * nc; ++i) os << vals(i, 3) * vals(i, 5) - vals(i, 4) * vals(i, 4) << '\n';
}

}  // namespace phdg
