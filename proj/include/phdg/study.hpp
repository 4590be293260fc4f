#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "phdg/config.hpp"
#include "phdg/stepper.hpp"
#include "phdg/verification.hpp"

namespace phdg {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// One (h, N) point of a study.
struct PointResult {
  std::string label;
  int mesh_level = 0;
  int time_steps = 0;
  double h = 0.0;
  double tau = 0.0;
  bool has_errors = false;  // final-time errors (example1 data only)
  ErrorNorms errors;
  std::vector<StepDiagnostics> steps;
  int regularization_activations = 0;
  std::vector<std::string> dumps;  // field files written
  bool failed = false;
  std::string failure;

  // Extremes over all accepted steps.
  double max_divergence = 0.0;
  double max_jump = 0.0;
  double max_residual = 0.0;
  double min_det = 0.0;
  double min_c11 = 0.0;
  double min_c22 = 0.0;
  bool energy_finite = true;
};

/// Run one point. Field dumps go to dump_dir when it is nonempty and the
/// config asks for them.
PointResult run_point(const RunConfig& config, int mesh_level, int steps, const std::string& dump_dir = "");

struct StudyOutcome {
  std::vector<PointResult> points;  // sweep order
  ConvergenceReport report;
  bool failed = false;
};

/// Run every point of the configured study (config.threads points at a time);
/// results come back in sweep order regardless of scheduling.
StudyOutcome execute_study(const RunConfig& config, std::ostream* log = nullptr, const std::string& dump_dir = "");

/// JSON manifest: every config key with its effective value, code version,
/// per-point tau / activations / status, and an overall OK / FAILED status.
std::string make_manifest(const RunConfig& config, const StudyOutcome& outcome);

/// execute_study plus files in config.output_dir: convergence.csv (example1
/// data), diagnostics.csv, manifest.json, optional VTK dumps. Returns an exit code.
int run_study(const RunConfig& config, std::ostream& log);

std::string code_version();

}  // namespace phdg
