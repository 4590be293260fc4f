#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "phdg/discretization.hpp"
#include "phdg/forms.hpp"
#include "phdg/spaces.hpp"

namespace phdg {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SolverOptions {
  /// Eliminate cell velocity/conformation unknowns cell by cell and solve the
  /// reduced trace + pressure system.
  bool static_condensation = true;
  double residual_rtol = 1e-10;
  double residual_atol = 1e-12;
  /// Weight theta of the replacement equation theta (Chat - {C}, Dhat)_F = 0 on
  /// facets whose Chat block carries no coupling (eps = 0 only).
  double tikhonov = 1e-12;
  /// Iterative refinement sweeps allowed before the residual check.
  int refinement_sweeps = 3;
};

/// Per-cell data needed to recover eliminated cell unknowns.
struct CellElimination {
  std::vector<Index> cell_global;   // eliminated unknowns
  std::vector<Index> trace_global;  // retained unknowns touched by the cell
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd coupling;  // A_cf
  Eigen::VectorXd rhs;       // b_c
};

struct StepSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  Index multiplier_row = -1;
  /// Facets whose Chat block received the Tikhonov term this step.
  std::vector<int> regularized_facets;

  bool condensed = false;
  /// Full-layout index of each reduced unknown (condensed systems only).
  std::vector<Index> reduced_to_global;
  std::vector<CellElimination> eliminations;
};

/// Building the matrix of one semi-implicit step from the state at t^n.
StepSystem assemble_step(const Discretization& disc, const ModelParams& params, const State& state_n,
                         double t_next, const Forcing& forcing, const SolverOptions& options = {});

struct StepSolution {
  State state;
  double residual = 0.0;  // relative (or absolute when the rhs vanishes)
};

/// Raised when the factorization fails or its residual exceeds the threshold.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Sparse direct solver that reuses the symbolic analysis while the matrix
/// pattern stays unchanged.
class StepSolver {
 public:
  StepSolver();
  ~StepSolver();
  StepSolver(StepSolver&&) noexcept;
  StepSolver& operator=(StepSolver&&) noexcept;

  StepSolution solve(const Discretization& disc, const StepSystem& system, double t_next,
                     const SolverOptions& options = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

StepSolution solve_step(const Discretization& disc, const StepSystem& system, double t_next,
                        const SolverOptions& options = {});

/// Shift p and phat so that the area-weighted pressure mean is zero.
void normalize_pressure(const Discretization& disc, Eigen::VectorXd& x);
double pressure_mean(const Discretization& disc, const Eigen::VectorXd& x);

struct SpdDiagnostics {
  double min_det = 0.0;
  double min_c11 = 0.0;
  double min_c22 = 0.0;
};

/// Minima of det C_h, C11_h, C22_h over cell quadrature points and vertices.
SpdDiagnostics spd_diagnostics(const Discretization& disc, const State& state);

struct MassConservation {
  double divergence = 0.0;      // max_K ||div u_h||_{L2(K)}
  double jump = 0.0;            // max_F interior ||[[u_h]]||_{L2(F)}
  double boundary_normal = 0.0; // max_F boundary ||(u_h - uhat_h).n||_{L2(F)}
};

MassConservation mass_conservation(const Discretization& disc, const State& state);

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  MassConservation mass;
  // Energy monitor quantities for the new level n+1.
  double u_l2_sq = 0.0;
  double trc_l2_sq = 0.0;
  double u_increment_sq = 0.0;
  double trc_increment_sq = 0.0;
  double viscous = 0.0;           // nu ||grad u||^2
  double velocity_penalty = 0.0;  // nu/h ||u - uhat||^2_F
  double trace_penalty = 0.0;     // eps/h ||trC - trChat||^2_F
  double trace_gradient = 0.0;    // eps ||grad trC||^2
  double upwind_velocity = 0.0;   // || sqrt|u^n.n| (u - uhat) ||^2_F
  double upwind_trace = 0.0;      // || sqrt|u^n.n| (trC - trChat) ||^2_F
  double trace_product = 0.0;     // ||trC^{n+1} trC^n||^2
  double forcing_sq = 0.0;        // ||f^{n+1}||^2
  SpdDiagnostics spd;
  double solver_residual = 0.0;
  int regularized_facets = 0;
  /// Accumulated left side of the discrete energy estimate up to this step
  /// and its ratio to ||u^0||^2 + ||trC^0||^2 + ||f||^2_{l2}.
  double energy_lhs = 0.0;
  double energy_ratio = 0.0;
};

StepDiagnostics step_diagnostics(const Discretization& disc, const ModelParams& params,
                                 const State& previous, const State& next, const Forcing& forcing);

struct SimulationSetup {
  const Discretization* disc = nullptr;
  ModelParams params;  // params.tau is overwritten with T / N
  double final_time = 1.0;
  int steps = 1;
  VectorField u0;
  TensorField C0;
  Forcing forcing;
  SolverOptions solver;
  bool spd = true;
  double blowup_bound = 1e6;
  /// Called after every accepted step.
  std::function<void(const StepDiagnostics&, const State&)> observer;
  /// Store the state at these step indices (N is always stored as final).
  std::vector<int> store_steps;
};

class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

struct Trajectory {
  std::vector<StepDiagnostics> steps;
  State initial;
  State final;
  std::vector<State> stored;
  double tau = 0.0;
  int regularization_activations = 0;
  bool failed = false;
  std::string failure;
};

/// Time loop: N monolithic solves. Failures are reported in the trajectory
/// (failed = true) with all accepted steps retained.
Trajectory run(const SimulationSetup& setup);

/// Time step for a final time and step count; throws ArgumentError unless N >= 1.
double time_step(double final_time, int steps);

}  // namespace phdg
