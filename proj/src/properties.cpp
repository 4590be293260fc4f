#include "phdg/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "phdg/stepper.hpp"

namespace phdg {

namespace {

Eigen::VectorXd random_vector(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

Eigen::VectorXd localize(const std::vector<Index>& dofs, const Eigen::VectorXd& x) {
  Eigen::VectorXd l = Eigen::VectorXd::Zero(Index(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i)
    if (dofs[i] >= 0) l(Index(i)) = x(dofs[i]);
  return l;
}

bool on_boundary(const Mesh& mesh, const Point& p) {
  const Rectangle& r = mesh.bounds();
  const double tol = 1e-12 * std::max(r.x1 - r.x0, r.y1 - r.y0);
  return std::abs(p.x() - r.x0) < tol || std::abs(p.x() - r.x1) < tol || std::abs(p.y() - r.y0) < tol ||
         std::abs(p.y() - r.y1) < tol;
}

}  // namespace

double trace_identity_residual(const Discretization& disc, std::mt19937_64& rng, int trials) {
  const DofLayout& L = disc.layout();
  const LocalLayout ll(L);
  const Eigen::MatrixXd& phi = disc.cell_values();
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::VectorXd xu = random_vector(L.total(), rng);  // supplies u and C
    const Eigen::VectorXd xd = random_vector(L.total(), rng);  // supplies D
    double direct = 0.0, kernel = 0.0, scale = 0.0;
    for (int c = 0; c < disc.num_cells(); ++c) {
      const CellTables& t = disc.cell(c);
      const Eigen::VectorXd trd = phi * (disc.cell_coeffs_C(xd, c, 0) + disc.cell_coeffs_C(xd, c, 2));
      std::array<Eigen::VectorXd, 3> cv;
      for (int m = 0; m < 3; ++m) cv[m] = phi * disc.cell_coeffs_C(xu, c, m);
      const Eigen::VectorXd u0 = disc.cell_coeffs_u(xu, c, 0), u1 = disc.cell_coeffs_u(xu, c, 1);
      const Eigen::VectorXd g00 = t.grad_x * u0, g01 = t.grad_y * u0, g10 = t.grad_x * u1, g11 = t.grad_y * u1;
      for (Index q = 0; q < t.weights.size(); ++q) {
        const double cg = cv[0](q) * g00(q) + cv[1](q) * (g01(q) + g10(q)) + cv[2](q) * g11(q);
        direct += t.weights(q) * trd(q) * cg;
        scale += t.weights(q) * std::abs(trd(q) * cg);
      }
      // -1/2 (trD, tr[G C + C G^T]) through the assembled coupling with D = trD/2 I.
      const ConformationCoupling cc = local_elastic_coupling_conformation(disc, c, tensor_samples(disc, c, xu));
      Eigen::VectorXd test = Eigen::VectorXd::Zero(ll.size()), trial_vec = Eigen::VectorXd::Zero(ll.size());
      for (int i = 0; i < ll.nk; ++i) {
        const double h = 0.5 * (xd(L.C(c, 0, i)) + xd(L.C(c, 2, i)));
        test(ll.C(0, i)) = h;
        test(ll.C(2, i)) = h;
        trial_vec(ll.u(0, i)) = u0(i);
        trial_vec(ll.u(1, i)) = u1(i);
      }
      kernel += cc.velocity_gradient.apply(test, trial_vec);
    }
    worst = std::max(worst, std::abs(direct + kernel) / std::max(scale, 1e-300));
  }
  return worst;
}

Eigen::VectorXd random_solenoidal_velocity(const Discretization& disc, std::mt19937_64& rng) {
  if (disc.degree() != 1) throw ArgumentError("solenoidal test velocity is built for k = 1 only");
  const Mesh& mesh = disc.mesh();
  const DofLayout& L = disc.layout();
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> psi_v(mesh.num_vertices()), psi_f(mesh.num_facets());
  for (std::size_t v = 0; v < psi_v.size(); ++v) psi_v[v] = on_boundary(mesh, mesh.vertices()[v]) ? 0.0 : U(rng);
  for (std::size_t f = 0; f < psi_f.size(); ++f) psi_f[f] = mesh.facet(int(f)).is_boundary() ? 0.0 : U(rng);

  const CellBasis p2(2);
  const Tabulation tab = p2.tabulate(disc.cell_rule().points);
  const Eigen::MatrixXd& phi = disc.cell_values();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(L.total());
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    Eigen::VectorXd nodes(6);
    for (int n = 0; n < 3; ++n) nodes(n) = psi_v[mesh.cell(c)[n]];
    for (int e = 0; e < 3; ++e) nodes(3 + e) = psi_f[mesh.cell_facets(c)[e].facet];
    const Eigen::VectorXd dr = tab.grad_x * nodes, ds = tab.grad_y * nodes;
    const Eigen::Matrix2d& G = t.geometry.inverse_transpose;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(L.cell_dim(), 2);
    for (Index q = 0; q < t.weights.size(); ++q) {
      const Eigen::Vector2d g = G * Eigen::Vector2d(dr(q), ds(q));
      rhs.col(0) += t.weights(q) * (-g.y()) * phi.row(q).transpose();
      rhs.col(1) += t.weights(q) * g.x() * phi.row(q).transpose();
    }
    const Eigen::MatrixXd mass = phi.transpose() * t.weights.asDiagonal() * phi;
    const Eigen::MatrixXd co = mass.ldlt().solve(rhs);
    for (int a = 0; a < 2; ++a) x.segment(L.u(c, a, 0), L.cell_dim()) = co.col(a);
  }
  return x;
}

double upwind_identity_residual(const Discretization& disc, std::mt19937_64& rng, TransportedField field,
                                int trials) {
  const DofLayout& L = disc.layout();
  const Eigen::MatrixXd& psi = disc.facet_values();
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::VectorXd w = random_solenoidal_velocity(disc, rng);
    const Eigen::VectorXd x = random_vector(L.total(), rng);
    double form = 0.0, dissipation = 0.0;
    for (int c = 0; c < disc.num_cells(); ++c) {
      const AdvectionField af = advection_field(disc, c, w);
      const Eigen::VectorXd xl = localize(cell_dofs(disc, c), x);
      form += local_convection(disc, c, af, field).apply(xl, xl);
      const CellTables& t = disc.cell(c);
      for (int e = 0; e < 3; ++e) {
        const EdgeTables& et = t.edges[e];
        const Eigen::VectorXd wn = af.edge[e] * et.normal;
        Eigen::VectorXd jump_sq = Eigen::VectorXd::Zero(et.weights.size());
        if (field == TransportedField::velocity) {
          for (int a = 0; a < 2; ++a)
            jump_sq += (et.values * disc.cell_coeffs_u(x, c, a) - psi * disc.facet_coeffs_uhat(x, et.facet, a))
                           .cwiseAbs2();
        } else {
          for (int m = 0; m < 3; ++m)
            jump_sq += kSymWeight[m] *
                       (et.values * disc.cell_coeffs_C(x, c, m) - psi * disc.facet_coeffs_Chat(x, et.facet, m))
                           .cwiseAbs2();
        }
        dissipation += 0.5 * et.weights.dot(wn.cwiseAbs().cwiseProduct(jump_sq));
      }
    }
    worst = std::max(worst, std::abs(form - dissipation) / std::max(std::abs(dissipation), 1e-300));
  }
  return worst;
}

OracleError forcing_oracle(const MmsCase& mc, std::mt19937_64& rng, int samples, double step) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  OracleError err;
  auto upd = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };
  for (int s = 0; s < samples; ++s) {
    const Point x(U(rng), U(rng));
    const double t = U(rng);
    const ExactJet a = eval_jet(mc, x, t);
    const ExactJet d = finite_difference_jet(mc, x, t, step);
    for (int i = 0; i < 2; ++i) {
      upd(err.derivatives, a.u_t(i) - d.u_t(i));
      upd(err.derivatives, a.grad_p(i) - d.grad_p(i));
      upd(err.derivatives, a.lap_u(i) - d.lap_u(i));
      for (int j = 0; j < 2; ++j) upd(err.derivatives, a.grad_u(i, j) - d.grad_u(i, j));
      for (int j = 0; j < 3; ++j) upd(err.derivatives, a.hess_u[i](j) - d.hess_u[i](j));
    }
    for (int m = 0; m < 3; ++m) {
      upd(err.derivatives, a.C_t[m] - d.C_t[m]);
      upd(err.derivatives, a.lap_C[m] - d.lap_C[m]);
      for (int j = 0; j < 2; ++j) upd(err.derivatives, a.grad_C[m](j) - d.grad_C[m](j));
      for (int j = 0; j < 3; ++j) upd(err.derivatives, a.hess_C[m](j) - d.hess_C[m](j));
    }
    const ForcingValues fa = eval_forcing(mc, x, t, mc.nu, mc.epsilon);
    const ForcingValues fd = forcing_from_jet(d, mc.nu, mc.epsilon);
    for (int i = 0; i < 2; ++i) upd(err.forcing, fa.f(i) - fd.f(i));
    for (int m = 0; m < 3; ++m) upd(err.forcing, fa.F[m] - fd.F[m]);
  }
  return err;
}

NullSpaceCheck null_space_check(const Discretization& disc, const ModelParams& params, const State& state,
                                const Forcing& forcing) {
  const DofLayout& L = disc.layout();
  SolverOptions mono;
  mono.static_condensation = false;  // the kernel statement is about the full matrix
  const StepSystem sys = assemble_step(disc, params, state, state.time + params.tau, forcing, mono);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(L.total());
  v.segment(L.p_offset(), L.p_size()).setOnes();
  v.segment(L.phat_offset(), L.phat_size()).setOnes();
  Eigen::VectorXd r = sys.matrix * v;
  r(sys.multiplier_row) = 0.0;
  NullSpaceCheck out;
  out.kernel_residual = r.cwiseAbs().maxCoeff();
  try {
    solve_step(disc, sys, state.time + params.tau, mono);
    out.factorization_ok = true;
  } catch (const StepFailure&) {
    out.factorization_ok = false;
  }
  return out;
}

namespace {

SuiteCheck check_le(std::string name, double value, double limit, std::string detail = {}) {
  return {std::move(name), value, limit, value <= limit, std::move(detail)};
}

}  // namespace

std::vector<SuiteCheck> run_property_suites(unsigned long long seed) {
  std::vector<SuiteCheck> out;
  std::mt19937_64 rng(seed);

  for (int n : {1, 2, 4}) {
    const Discretization disc(Mesh(n, n), 1);
    out.push_back(check_le("trace identity " + std::to_string(n) + "x" + std::to_string(n),
                           trace_identity_residual(disc, rng, 50), 1e-12));
  }
  {
    const Discretization disc(Mesh(4, 4), 1);
    out.push_back(check_le("upwind identity velocity",
                           upwind_identity_residual(disc, rng, TransportedField::velocity, 50), 1e-12));
    out.push_back(check_le("upwind identity conformation",
                           upwind_identity_residual(disc, rng, TransportedField::conformation, 50), 1e-12));
  }
  for (double eps : {0.0, 1e-3, 1.0}) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%g", eps);
    const OracleError e = forcing_oracle(example1_case(1.0, eps), rng, 200, 1e-5);
    out.push_back(check_le(std::string("forcing oracle eps=") + tag, std::max(e.derivatives, e.forcing), 1e-6));
  }
  for (double eps : {1.0, 0.0}) {
    const Discretization disc(Mesh(4, 4), 1);
    SimulationSetup s;
    s.disc = &disc;
    s.params.epsilon = eps;
    s.final_time = 0.05;
    s.steps = 5;
    double worst = 0.0;
    s.observer = [&](const StepDiagnostics&, const State& st) {
      worst = std::max(worst, st.coeffs.cwiseAbs().maxCoeff());
    };
    const Trajectory tr = run(s);
    char tag[48];
    std::snprintf(tag, sizeof tag, "zero-data fixed point eps=%g", eps);
    SuiteCheck c = check_le(tag, tr.failed ? 1.0 : worst, 0.0);
    if (tr.failed) c.detail = tr.failure;
    out.push_back(c);
  }
  {
    const Discretization disc(Mesh(4, 4), 1);
    const MmsCase mc = example1_case(1.0, 1.0);
    ModelParams params;
    params.tau = 0.2 / 820;
    const State st = project_initial(disc, initial_velocity(mc), initial_conformation(mc));
    const NullSpaceCheck ns = null_space_check(disc, params, st, make_forcing(mc));
    out.push_back(check_le("null space: constant pressure in kernel", ns.kernel_residual, 1e-11));
    out.push_back({"null space: factorization with multiplier", ns.factorization_ok ? 0.0 : 1.0, 0.0,
                   ns.factorization_ok, ""});
  }
  return out;
}

}  // namespace phdg
