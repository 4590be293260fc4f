#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phdg/discretization.hpp"
#include "phdg/forms.hpp"
#include "phdg/spaces.hpp"

namespace phdg {

enum class CaseId { example1, example2 };

/// Manufactured (example1) or benchmark (example2) problem data. example2 has
/// no exact solution; its "exact" fields are the time-independent initial data.
struct MmsCase {
  CaseId id = CaseId::example1;
  double nu = 1.0;
  double epsilon = 1.0;

  bool has_exact_solution() const { return id == CaseId::example1; }
};

MmsCase example1_case(double nu, double epsilon);
MmsCase example2_case();

struct ExactValues {
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  double p = 0.0;
  SymTensor C;
};

/// Space/time derivatives of the exact fields; (grad_u)(a, b) = d_b u_a.
struct ExactJet {
  ExactValues value;
  Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
  Eigen::Vector2d lap_u = Eigen::Vector2d::Zero();
  Eigen::Vector2d u_t = Eigen::Vector2d::Zero();
  Eigen::Vector2d grad_p = Eigen::Vector2d::Zero();
  std::array<Eigen::Vector2d, 3> grad_C{};  // per stored component
  SymTensor lap_C;
  SymTensor C_t;
  /// Second derivatives (xx, xy, yy) of u components and of C components,
  /// kept for the finite-difference oracle.
  std::array<Eigen::Vector3d, 2> hess_u{};
  std::array<Eigen::Vector3d, 3> hess_C{};
};

/// Closed-form values straight from the defining formulas.
ExactValues eval_exact(const MmsCase& mc, const Point& x, double t);
/// Analytic derivatives (example1 only; example2 returns value and grad_u).
ExactJet eval_jet(const MmsCase& mc, const Point& x, double t);

struct ForcingValues {
  Eigen::Vector2d f = Eigen::Vector2d::Zero();
  SymTensor F;
};

ForcingValues eval_forcing(const MmsCase& mc, const Point& x, double t, double nu, double epsilon);
/// Forcing residuals for a given jet (used by the oracle with FD jets).
ForcingValues forcing_from_jet(const ExactJet& j, double nu, double epsilon);

Forcing make_forcing(const MmsCase& mc);
VectorField initial_velocity(const MmsCase& mc);
TensorField initial_conformation(const MmsCase& mc);

/// Derivatives by centred differences: first derivatives of eval_exact,
/// second ones of the analytic first derivatives.
ExactJet finite_difference_jet(const MmsCase& mc, const Point& x, double t, double step = 1e-5);

struct ErrorNorms {
  double u_l2 = 0.0;
  double u_h1 = 0.0;  // broken H1 seminorm
  double p_l2 = 0.0;  // after removing both means
  double c_l2 = 0.0;
  double c_h1_eps = 0.0;  // sqrt(eps) * broken H1 seminorm
};

/// Errors of a state against the exact example1 fields at time t. The default
/// integration rule has exactness 2k + 6.
ErrorNorms error_norms(const Discretization& disc, const State& state, const MmsCase& mc, double t,
                       int quadrature_exactness = -1);

/// Cellwise L2 projection of the exact example1 fields (u, C, and p).
State project_exact(const Discretization& disc, const MmsCase& mc, double t);

inline constexpr double kUndefinedRate = std::numeric_limits<double>::quiet_NaN();

/// rate_i = log(e_{i-1}/e_i) / log(s_{i-1}/s_i); rates[0] is undefined.
/// Non-positive errors give kUndefinedRate.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& steps);

struct ConvergenceRow {
  double step = 0.0;  // h or tau
  int mesh_level = 0;
  int time_steps = 0;
  ErrorNorms errors;
  std::array<double, 5> rates{kUndefinedRate, kUndefinedRate, kUndefinedRate, kUndefinedRate,
                              kUndefinedRate};
};

struct ConvergenceReport {
  std::string sweep;  // "h" or "tau"
  double epsilon = 0.0, nu = 0.0, alpha = 0.0, beta = 0.0;
  int degree = 1;
  std::vector<ConvergenceRow> rows;

  void compute_rates();
};

std::array<double, 5> as_array(const ErrorNorms& e);

// Mesh-dependent norms of a velocity pair (v_h, vhat_h) taken from a state
// vector; the penalty weight alpha / h_K uses the longest cell edge.

/// |||(v, vhat)|||_v^2 = ||grad v||^2 + sum_K alpha/h_K ||v - vhat||^2_{dK}
double triple_norm_v_sq(const Discretization& disc, const Eigen::VectorXd& x, double alpha);
/// |||(v, vhat)|||_{0,v}^2 in its equivalent form ||v||^2 + sum_K h_K ||v - vhat||^2_{dK}
double triple_norm_0v_sq(const Discretization& disc, const Eigen::VectorXd& x);
/// ||v||_1^2 computed from jumps directly (average trace on interior facets,
/// the zero trace on the boundary).
double broken_norm_1_sq(const Discretization& disc, const Eigen::VectorXd& x, double alpha);
/// Replace the velocity traces of x by the facet average of the cell traces
/// (zero on boundary facets).
void set_average_traces(const Discretization& disc, Eigen::VectorXd& x);

}  // namespace phdg
