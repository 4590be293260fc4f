#include <cmath>

#include "doctest.h"
#include "phdg/stepper.hpp"
#include "phdg/verification.hpp"

using namespace phdg;

namespace {

SimulationSetup example1_setup(const Discretization& d, double eps, int steps, double T) {
  const MmsCase mc = example1_case(1.0, eps);
  SimulationSetup s;
  s.disc = &d;
  s.params.epsilon = eps;
  s.params.beta = eps > 0.0 && eps < 1.0 ? 300.0 : 10.0;
  s.final_time = T;
  s.steps = steps;
  s.u0 = initial_velocity(mc);
  s.C0 = initial_conformation(mc);
  s.forcing = make_forcing(mc);
  return s;
}

}  // namespace

TEST_CASE("time step") {
  CHECK(time_step(0.2, 820) == doctest::Approx(0.2 / 820));
  CHECK_THROWS_AS(time_step(0.2, 0), ArgumentError);
  CHECK_THROWS_AS(time_step(0.0, 10), ArgumentError);
}

TEST_CASE("monolithic system of one square has 77 unknowns") {
  const Discretization d(Mesh(1, 1), 1);
  const State s0(d.layout(), 0.0);
  SolverOptions mono;
  mono.static_condensation = false;
  ModelParams p;
  p.tau = 0.1;
  const StepSystem sys = assemble_step(d, p, s0, 0.1, Forcing{}, mono);
  CHECK(sys.matrix.rows() == 77);
  CHECK(sys.matrix.cols() == 77);
  CHECK(sys.multiplier_row == 76);
  CHECK_FALSE(sys.condensed);
}

TEST_CASE("zero data is a fixed point") {
  for (double eps : {1.0, 0.0}) {
    const Discretization d(Mesh(4, 4), 1);
    SimulationSetup s;
    s.disc = &d;
    s.params.epsilon = eps;
    s.final_time = 0.05;
    s.steps = 5;
    s.u0 = [](const Point&) { return Eigen::Vector2d::Zero(); };
    s.C0 = [](const Point&) { return SymTensor{}; };
    s.spd = false;
    const Trajectory t = run(s);
    REQUIRE_FALSE(t.failed);
    CHECK(t.steps.size() == 5);
    CHECK(t.final.coeffs.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("stationary identity conformation is reproduced") {
  // u = 0, C = I solves the model with f = 0 and F = 2I.
  const Discretization d(Mesh(3, 3), 1);
  SimulationSetup s;
  s.disc = &d;
  s.final_time = 0.1;
  s.steps = 4;
  s.u0 = [](const Point&) { return Eigen::Vector2d::Zero(); };
  s.C0 = [](const Point&) { return SymTensor::identity(); };
  s.forcing.F = [](const Point&, double) { return SymTensor::identity(2.0); };
  const Trajectory t = run(s);
  REQUIRE_FALSE(t.failed);
  const DofLayout& L = d.layout();
  double err = 0.0;
  for (int c = 0; c < d.num_cells(); ++c)
    for (int i = 0; i < 3; ++i) {
      err = std::max({err, std::abs(t.final.coeffs(L.C(c, 0, i)) - 1.0), std::abs(t.final.coeffs(L.C(c, 1, i))),
                      std::abs(t.final.coeffs(L.C(c, 2, i)) - 1.0), std::abs(t.final.coeffs(L.u(c, 0, i))),
                      std::abs(t.final.coeffs(L.u(c, 1, i)))});
    }
  CHECK(err < 1e-12);
  CHECK(t.steps.back().spd.min_det == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("condensed and monolithic solutions agree") {
  for (double eps : {1.0, 1e-3, 0.0}) {
    const Discretization d(Mesh(2, 2, Rectangle::unit(), Diagonal::falling), 1);
    SimulationSetup s = example1_setup(d, eps, 3, 0.03);
    s.params.tau = 0.01;
    const Trajectory a = run(s);
    s.solver.static_condensation = false;
    const Trajectory b = run(s);
    REQUIRE_FALSE(a.failed);
    REQUIRE_FALSE(b.failed);
    const DofLayout& L = d.layout();
    // Cell unknowns and velocity/pressure traces; Chat only where coupled.
    const Index ncell = L.uhat_offset();
    CHECK((a.final.coeffs.head(ncell) - b.final.coeffs.head(ncell)).cwiseAbs().maxCoeff() <
          1e-10 * (1.0 + b.final.coeffs.head(ncell).cwiseAbs().maxCoeff()));
    const Index nt = L.Chat_offset() - L.uhat_offset();
    CHECK((a.final.coeffs.segment(L.uhat_offset(), nt) - b.final.coeffs.segment(L.uhat_offset(), nt))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK(a.regularization_activations == b.regularization_activations);
    CHECK((eps == 0.0) == (a.regularization_activations > 0));
  }
}

TEST_CASE("velocity is exactly divergence free with continuous normal traces") {
  const Discretization d(Mesh(4, 4), 1);
  SimulationSetup s = example1_setup(d, 1.0, 4, 0.02);
  const Trajectory t = run(s);
  REQUIRE_FALSE(t.failed);
  for (const StepDiagnostics& sd : t.steps) {
    CHECK(sd.mass.divergence < 1e-11);
    CHECK(sd.mass.jump < 1e-11);
    CHECK(sd.mass.boundary_normal < 1e-11);
    CHECK(sd.solver_residual <= 1e-10);
    CHECK(std::isfinite(sd.energy_ratio));
  }
  CHECK(std::abs(pressure_mean(d, t.final.coeffs)) < 1e-13);
  CHECK(t.tau == doctest::Approx(0.005));
}

TEST_CASE("stored states and observer") {
  const Discretization d(Mesh(2, 2), 1);
  SimulationSetup s = example1_setup(d, 1.0, 4, 0.04);
  s.store_steps = {2};
  int calls = 0;
  s.observer = [&](const StepDiagnostics& sd, const State& st) {
    ++calls;
    CHECK(st.time == doctest::Approx(sd.time));
  };
  const Trajectory t = run(s);
  CHECK(calls == 4);
  REQUIRE(t.stored.size() >= 1);
  CHECK(t.stored.front().time == doctest::Approx(0.02));
  CHECK(t.final.time == doctest::Approx(0.04));
  CHECK(t.initial.time == 0.0);
}

TEST_CASE("blow-up is reported as a failure with accepted steps kept") {
  const Discretization d(Mesh(2, 2), 1);
  SimulationSetup s = example1_setup(d, 1.0, 3, 0.03);
  s.blowup_bound = 1e-3;
  const Trajectory t = run(s);
  CHECK(t.failed);
  CHECK_FALSE(t.failure.empty());
  CHECK(t.steps.size() < 3);
}

TEST_CASE("spd diagnostics") {
  const Discretization d(Mesh(2, 2), 1);
  auto state_of = [&](SymTensor C) {
    return project_initial(d, [](const Point&) { return Eigen::Vector2d::Zero(); },
                           [C](const Point&) { return C; });
  };
  SpdDiagnostics sd = spd_diagnostics(d, state_of(SymTensor::identity(0.5)));
  CHECK(sd.min_det == doctest::Approx(0.25));
  CHECK(sd.min_c11 == doctest::Approx(0.5));
  CHECK(sd.min_c22 == doctest::Approx(0.5));
  sd = spd_diagnostics(d, state_of(SymTensor{1.0, 2.0, 1.0}));
  CHECK(sd.min_det == doctest::Approx(-3.0));
  CHECK(sd.min_c11 == doctest::Approx(1.0));
  // A field with negative C22 somewhere.
  const State s = project_initial(d, [](const Point&) { return Eigen::Vector2d::Zero(); },
                                  [](const Point& x) { return SymTensor{1.0, 0.0, x.x() - 0.5}; });
  sd = spd_diagnostics(d, s);
  CHECK(sd.min_c22 == doctest::Approx(-0.5));
}

TEST_CASE("pressure normalization") {
  const Discretization d(Mesh(2, 2), 1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d.layout().total());
  x.segment(d.layout().p_offset(), d.layout().p_size()).setConstant(3.0);
  x.segment(d.layout().phat_offset(), d.layout().phat_size()).setConstant(3.0);
  CHECK(pressure_mean(d, x) == doctest::Approx(3.0));
  normalize_pressure(d, x);
  CHECK(std::abs(pressure_mean(d, x)) < 1e-14);
  CHECK(x.segment(d.layout().phat_offset(), d.layout().phat_size()).cwiseAbs().maxCoeff() < 1e-14);
}
