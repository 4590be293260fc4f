#include "phdg/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "phdg/output.hpp"

#ifndef PHDG_VERSION
#define PHDG_VERSION "unknown"
#endif

namespace phdg {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string code_version() { return PHDG_VERSION; }

namespace {

struct PointSpec {
  int level = 0;
  int steps = 0;
};

std::vector<PointSpec> study_points(const RunConfig& c) {
  std::vector<PointSpec> pts;
  switch (c.study) {
    case Study::single: pts.push_back({c.mesh_level, c.steps}); break;
    case Study::sweep_h:
      for (int l : c.mesh_levels) pts.push_back({l, c.steps});
      break;
    case Study::sweep_tau:
      for (int n : c.steps_list) pts.push_back({c.mesh_level, n});
      break;
  }
  return pts;
}

std::string point_label(int level, int steps) { return "h" + std::to_string(level) + "_N" + std::to_string(steps); }

MmsCase case_of(const RunConfig& c) {
  MmsCase mc;
  mc.id = c.data;
  mc.nu = c.params.nu;
  mc.epsilon = c.params.epsilon;
  return mc;
}

double nan_if_failed(bool ok, double v) { return ok ? v : std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

PointResult run_point(const RunConfig& config, int mesh_level, int steps, const std::string& dump_dir) {
  PointResult r;
  r.label = point_label(mesh_level, steps);
  r.mesh_level = mesh_level;
  r.time_steps = steps;
  const int n = 1 << mesh_level;
  r.h = 1.0 / n;
  r.tau = time_step(config.final_time, steps);

  const Discretization disc(Mesh(n, n, Rectangle::unit(), config.diagonal), config.degree);
  const MmsCase mc = case_of(config);

  SimulationSetup s;
  s.disc = &disc;
  s.params = config.params;
  s.final_time = config.final_time;
  s.steps = steps;
  s.u0 = initial_velocity(mc);
  s.C0 = initial_conformation(mc);
  s.forcing = make_forcing(mc);
  s.solver.static_condensation = config.static_condensation;
  s.spd = config.spd_diagnostics;
  s.blowup_bound = config.blowup_bound;

  std::vector<int> dump_steps;
  const bool dumping = config.store_fields && !dump_dir.empty();
  if (dumping) {
    if (config.store_times.empty()) dump_steps.push_back(steps);
    for (double t : config.store_times) dump_steps.push_back(int(std::lround(t / r.tau)));
    std::sort(dump_steps.begin(), dump_steps.end());
    dump_steps.erase(std::unique(dump_steps.begin(), dump_steps.end()), dump_steps.end());
  }
  s.store_steps = dump_steps;

  const Trajectory traj = run(s);
  r.steps = traj.steps;
  r.regularization_activations = traj.regularization_activations;
  r.failed = traj.failed;
  r.failure = traj.failure;

  if (!r.steps.empty()) {
    r.min_det = r.min_c11 = r.min_c22 = std::numeric_limits<double>::infinity();
    for (const StepDiagnostics& d : r.steps) {
      r.max_divergence = std::max(r.max_divergence, d.mass.divergence);
      r.max_jump = std::max({r.max_jump, d.mass.jump, d.mass.boundary_normal});
      r.max_residual = std::max(r.max_residual, d.solver_residual);
      r.min_det = std::min(r.min_det, d.spd.min_det);
      r.min_c11 = std::min(r.min_c11, d.spd.min_c11);
      r.min_c22 = std::min(r.min_c22, d.spd.min_c22);
      if (!std::isfinite(d.energy_lhs) || !std::isfinite(d.energy_ratio)) r.energy_finite = false;
    }
  }

  if (mc.has_exact_solution() && !r.failed) {
    r.errors = error_norms(disc, traj.final, mc, config.final_time);
    r.has_errors = true;
  }

  if (dumping) {
    fs::create_directories(dump_dir);
    auto dump = [&](const State& st, int step) {
      const std::string name = "fields_" + r.label + "_step" + std::to_string(step) + ".vtk";
      std::ofstream f(fs::path(dump_dir) / name);
      write_vtk(f, disc, st, r.label + " t=" + format_number(st.time));
      r.dumps.push_back(name);
    };
    if (!dump_steps.empty() && dump_steps.front() == 0) dump(traj.initial, 0);
    for (const State& st : traj.stored) dump(st, int(std::lround(st.time / r.tau)));
    // The final state is listed in store_steps only if the run reached it.
  }
  return r;
}

StudyOutcome execute_study(const RunConfig& config, std::ostream* log, const std::string& dump_dir) {
  config.validate();
  const std::vector<PointSpec> specs = study_points(config);
  StudyOutcome out;
  out.points.resize(specs.size());

  std::mutex log_mutex;
  auto note = [&](const std::string& s) {
    if (!log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    *log << s << std::endl;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      note("running " + point_label(specs[i].level, specs[i].steps));
      out.points[i] = run_point(config, specs[i].level, specs[i].steps, dump_dir);
      const PointResult& p = out.points[i];
      note(p.label + (p.failed ? " FAILED: " + p.failure : " done"));
    }
  };
  const int nthreads = std::max(1, std::min<int>(config.threads, int(specs.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  ConvergenceReport& rep = out.report;
  rep.sweep = config.study == Study::sweep_tau ? "tau" : "h";
  rep.epsilon = config.params.epsilon;
  rep.nu = config.params.nu;
  rep.alpha = config.params.alpha;
  rep.beta = config.params.beta;
  rep.degree = config.degree;
  for (const PointResult& p : out.points) {
    out.failed = out.failed || p.failed;
    ConvergenceRow row;
    row.step = config.study == Study::sweep_tau ? p.tau : p.h;
    row.mesh_level = p.mesh_level;
    row.time_steps = p.time_steps;
    row.errors.u_l2 = nan_if_failed(p.has_errors, p.errors.u_l2);
    row.errors.u_h1 = nan_if_failed(p.has_errors, p.errors.u_h1);
    row.errors.p_l2 = nan_if_failed(p.has_errors, p.errors.p_l2);
    row.errors.c_l2 = nan_if_failed(p.has_errors, p.errors.c_l2);
    row.errors.c_h1_eps = nan_if_failed(p.has_errors, p.errors.c_h1_eps);
    rep.rows.push_back(row);
  }
  rep.compute_rates();
  return out;
}

std::string make_manifest(const RunConfig& c, const StudyOutcome& outcome) {
  auto doubles = [](const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(x);
    return a;
  };
  std::vector<double> tau_list;
  for (int n : c.steps_list) tau_list.push_back(c.final_time / n);

  ordered_json cfg;
  cfg["experiment"] = to_string(c.experiment);
  cfg["data"] = c.data == CaseId::example1 ? "example1" : "example2";
  cfg["study"] = to_string(c.study);
  cfg["epsilon"] = c.params.epsilon;
  cfg["nu"] = c.params.nu;
  cfg["alpha"] = c.params.alpha;
  cfg["beta"] = c.params.beta;
  cfg["degree"] = c.degree;
  cfg["diagonal"] = c.diagonal == Diagonal::falling ? "falling" : "rising";
  cfg["final_time"] = c.final_time;
  cfg["mesh_level"] = c.mesh_level;
  cfg["mesh_levels"] = c.mesh_levels;
  cfg["steps"] = c.steps;
  cfg["tau"] = c.final_time / c.steps;
  cfg["steps_list"] = c.steps_list;
  cfg["tau_list"] = doubles(tau_list);
  cfg["output_dir"] = c.output_dir;
  cfg["store_fields"] = c.store_fields;
  cfg["store_times"] = doubles(c.store_times);
  cfg["spd_diagnostics"] = c.spd_diagnostics;
  cfg["energy_monitor"] = c.energy_monitor;
  cfg["static_condensation"] = c.static_condensation;
  cfg["blowup_bound"] = c.blowup_bound;
  cfg["threads"] = c.threads;
  cfg["seed"] = c.seed;

  ordered_json m;
  m["status"] = outcome.failed ? "FAILED" : "OK";
  m["code_version"] = code_version();
  m["config"] = cfg;
  // Fixed solver settings that are not user keys.
  const SolverOptions so;
  m["solver"] = {{"residual_rtol", so.residual_rtol},
                 {"residual_atol", so.residual_atol},
                 {"tikhonov", so.tikhonov},
                 {"tikhonov_enabled", c.params.epsilon == 0.0}};
  ordered_json pts = ordered_json::array();
  for (const PointResult& p : outcome.points) {
    ordered_json j;
    j["label"] = p.label;
    j["mesh_level"] = p.mesh_level;
    j["h"] = p.h;
    j["steps"] = p.time_steps;
    j["tau"] = p.tau;
    j["accepted_steps"] = p.steps.size();
    j["status"] = p.failed ? "FAILED" : "OK";
    if (p.failed) j["failure"] = p.failure;
    j["regularization_activations"] = p.regularization_activations;
    j["max_residual"] = p.max_residual;
    j["max_divergence"] = p.max_divergence;
    j["max_jump"] = p.max_jump;
    if (c.spd_diagnostics) j["min_det"] = p.min_det;
    if (p.has_errors) {
      j["errors"] = {{"u_l2", p.errors.u_l2},
                     {"u_h1", p.errors.u_h1},
                     {"p_l2", p.errors.p_l2},
                     {"C_l2", p.errors.c_l2},
                     {"C_h1_eps", p.errors.c_h1_eps}};
    }
    if (!p.dumps.empty()) j["dumps"] = p.dumps;
    pts.push_back(j);
  }
  m["points"] = pts;
  return m.dump(2) + "\n";
}

int run_study(const RunConfig& config, std::ostream& log) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  const StudyOutcome out = execute_study(config, &log, dir.string());

  if (config.data == CaseId::example1) {
    std::ofstream f(dir / "convergence.csv");
    write_convergence_csv(f, out.report);
  }
  {
    std::vector<DiagnosticsSeries> series;
    for (const PointResult& p : out.points) series.push_back({p.label, p.mesh_level, p.time_steps, p.steps});
    std::ofstream f(dir / "diagnostics.csv");
    write_diagnostics_csv(f, series, config.energy_monitor);
  }
  {
    std::ofstream f(dir / "manifest.json");
    f << make_manifest(config, out);
  }
  if (config.data == CaseId::example1) write_convergence_csv(log, out.report);
  return out.failed ? kExitNumerical : kExitOk;
}

}  // namespace phdg
