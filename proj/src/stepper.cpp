#include "phdg/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#ifdef PHDG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace phdg {

namespace {

using Triplet = Eigen::Triplet<double>;

struct CellBlocks {
  std::vector<LocalBlock> blocks;
  LocalBlock pressure;  // placed as-is and transposed
  Eigen::VectorXd rhs;
};

CellBlocks cell_blocks(const Discretization& disc, int c, const ModelParams& params, const State& state_n,
                       double t_next, const Forcing& forcing) {
  const AdvectionField w = advection_field(disc, c, state_n.coeffs);
  const TensorSamples cn = tensor_samples(disc, c, state_n.coeffs);
  const double inv_tau = 1.0 / params.tau;
  CellBlocks out;
  out.blocks.reserve(9);
  out.blocks.push_back(local_mass(disc, c, inv_tau, TransportedField::velocity));
  out.blocks.push_back(local_viscous(disc, c, params));
  out.blocks.push_back(local_convection(disc, c, w, TransportedField::velocity));
  out.blocks.push_back(local_elastic_coupling_momentum(disc, c, cn));
  out.blocks.push_back(local_mass(disc, c, inv_tau, TransportedField::conformation));
  if (params.epsilon > 0.0) out.blocks.push_back(local_conformation_diffusion(disc, c, params));
  out.blocks.push_back(local_convection(disc, c, w, TransportedField::conformation));
  ConformationCoupling cc = local_elastic_coupling_conformation(disc, c, cn);
  out.blocks.push_back(std::move(cc.velocity_gradient));
  out.blocks.push_back(std::move(cc.trace_squared));
  out.pressure = local_pressure(disc, c);
  out.rhs = local_rhs(disc, c, state_n.coeffs, t_next, params, forcing);
  return out;
}

// Chat-Chat coupling of one facet from the upwind/centered convection terms
// (the only Chat-Chat coupling when eps = 0), for a unit-weight component.
Eigen::MatrixXd facet_upwind_block(const Discretization& disc, const State& state_n, int f) {
  const Facet& facet = disc.mesh().facet(f);
  const int nf = disc.layout().facet_dim();
  const Eigen::MatrixXd& psi = disc.facet_values();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nf, nf);
  for (int o = 0; o < facet.owner_count; ++o) {
    const int c = facet.owners[o].cell;
    const int e = facet.owners[o].local_edge;
    const EdgeTables& et = disc.cell(c).edges[e];
    Eigen::VectorXd wn = Eigen::VectorXd::Zero(et.weights.size());
    for (int comp = 0; comp < 2; ++comp)
      wn += et.normal(comp) * (et.values * disc.cell_coeffs_u(state_n.coeffs, c, comp));
    for (Index q = 0; q < wn.size(); ++q) {
      const double inflow = 0.5 * (std::abs(wn(q)) - wn(q));
      B.noalias() += et.weights(q) * inflow * psi.row(q).transpose() * psi.row(q);
    }
  }
  return B;
}

double max_advection(const Discretization& disc, const State& s) {
  double m = 0.0;
  for (int c = 0; c < disc.num_cells(); ++c)
    for (int comp = 0; comp < 2; ++comp)
      m = std::max(m, disc.cell_coeffs_u(s.coeffs, c, comp).cwiseAbs().maxCoeff());
  return m;
}

// Reduced numbering: p | uhat | phat | Chat | multiplier.
struct ReducedMap {
  Index p_off, p_size, trace_off, reduced_total;

  explicit ReducedMap(const DofLayout& L)
      : p_off(L.p_offset()),
        p_size(L.p_size()),
        trace_off(L.uhat_offset()),
        reduced_total(L.p_size() + (L.total() - L.uhat_offset())) {}

  Index operator()(Index g) const {
    if (g >= p_off && g < p_off + p_size) return g - p_off;
    if (g >= trace_off) return p_size + (g - trace_off);
    return -1;
  }
};

}  // namespace

StepSystem assemble_step(const Discretization& disc, const ModelParams& params, const State& state_n,
                         double t_next, const Forcing& forcing, const SolverOptions& options) {
  params.validate();
  const DofLayout& L = disc.layout();
  const LocalLayout ll(L);
  const Index n = L.total();
  StepSystem sys;
  sys.condensed = options.static_condensation;
  const ReducedMap rmap(L);
  const Index dim = sys.condensed ? rmap.reduced_total : n;
  auto map = [&](Index g) { return sys.condensed ? rmap(g) : g; };

  sys.rhs = Eigen::VectorXd::Zero(dim);
  sys.multiplier_row = map(L.multiplier());
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(disc.num_cells()) * (sys.condensed ? 1800 : 1500));

  // eps = 0: facets whose Chat block has no coupling at all (no inflow from
  // either side). Their Chat test equation would only constrain the outflow
  // flux of C, so it is replaced by theta (Chat - {C}, Dhat)_F = 0.
  std::vector<char> decoupled(disc.mesh().num_facets(), 0);
  if (params.epsilon == 0.0) {
    const double wmax = max_advection(disc, state_n);
    for (int f = 0; f < static_cast<int>(disc.mesh().num_facets()); ++f) {
      const Eigen::MatrixXd B = facet_upwind_block(disc, state_n, f);
      const double len = disc.mesh().facet(f).length;
      const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (B + B.transpose()),
                                                                         Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
      if (lmin > 1e-12 * len * (1.0 + wmax)) continue;
      decoupled[f] = 1;
      sys.regularized_facets.push_back(f);
    }
  }
  const Eigen::MatrixXd& psi = disc.facet_values();

  for (int c = 0; c < disc.num_cells(); ++c) {
    const std::vector<Index> dofs = cell_dofs(disc, c);
    CellBlocks cb = cell_blocks(disc, c, params, state_n, t_next, forcing);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ll.size(), ll.size());
    for (const LocalBlock& b : cb.blocks) b.add_to(A);
    cb.pressure.add_to(A);
    cb.pressure.add_to(A, true);

    for (int e = 0; e < 3; ++e) {
      const EdgeTables& et = disc.cell(c).edges[e];
      if (!decoupled[et.facet]) continue;
      const double share = options.tikhonov / disc.mesh().facet(et.facet).owner_count;
      const Eigen::MatrixXd Mff = psi.transpose() * et.weights.asDiagonal() * psi;
      const Eigen::MatrixXd Mfc = psi.transpose() * et.weights.asDiagonal() * et.values;
      for (int m = 0; m < 3; ++m)
        for (int i = 0; i < ll.nf; ++i) {
          const int row = ll.Chat(e, m, i);
          A.row(row).setZero();
          cb.rhs(row) = 0.0;
          for (int j = 0; j < ll.nf; ++j) A(row, ll.Chat(e, m, j)) = share * kSymWeight[m] * Mff(i, j);
          for (int j = 0; j < ll.nk; ++j) A(row, ll.C(m, j)) = -share * kSymWeight[m] * Mfc(i, j);
        }
    }

    if (!sys.condensed) {
      for (int i = 0; i < ll.size(); ++i) {
        if (dofs[i] < 0) continue;
        sys.rhs(dofs[i]) += cb.rhs(i);
        for (int j = 0; j < ll.size(); ++j)
          if (dofs[j] >= 0 && A(i, j) != 0.0) trip.emplace_back(dofs[i], dofs[j], A(i, j));
      }
      continue;
    }

    std::vector<int> cpos, fpos;
    for (int comp = 0; comp < 2; ++comp)
      for (int i = 0; i < ll.nk; ++i) cpos.push_back(ll.u(comp, i));
    for (int m = 0; m < 3; ++m)
      for (int i = 0; i < ll.nk; ++i) cpos.push_back(ll.C(m, i));
    for (int i = 0; i < ll.np; ++i) fpos.push_back(ll.p(i));
    for (int i = ll.cell_size(); i < ll.size(); ++i)
      if (dofs[i] >= 0) fpos.push_back(i);

    const Index nc = Index(cpos.size()), nfp = Index(fpos.size());
    Eigen::MatrixXd Acc(nc, nc), Acf(nc, nfp), Afc(nfp, nc), Aff(nfp, nfp);
    Eigen::VectorXd bc(nc), bf(nfp);
    for (Index i = 0; i < nc; ++i) {
      bc(i) = cb.rhs(cpos[i]);
      for (Index j = 0; j < nc; ++j) Acc(i, j) = A(cpos[i], cpos[j]);
      for (Index j = 0; j < nfp; ++j) Acf(i, j) = A(cpos[i], fpos[j]);
    }
    for (Index i = 0; i < nfp; ++i) {
      bf(i) = cb.rhs(fpos[i]);
      for (Index j = 0; j < nc; ++j) Afc(i, j) = A(fpos[i], cpos[j]);
      for (Index j = 0; j < nfp; ++j) Aff(i, j) = A(fpos[i], fpos[j]);
    }
    CellElimination el;
    el.lu.compute(Acc);
    const Eigen::MatrixXd S = Aff - Afc * el.lu.solve(Acf);
    const Eigen::VectorXd g = bf - Afc * el.lu.solve(bc);
    for (Index i = 0; i < nc; ++i) el.cell_global.push_back(dofs[cpos[i]]);
    for (Index i = 0; i < nfp; ++i) el.trace_global.push_back(dofs[fpos[i]]);
    for (Index i = 0; i < nfp; ++i) {
      const Index ri = rmap(el.trace_global[i]);
      sys.rhs(ri) += g(i);
      for (Index j = 0; j < nfp; ++j) trip.emplace_back(ri, rmap(el.trace_global[j]), S(i, j));
    }
    el.coupling = std::move(Acf);
    el.rhs = std::move(bc);
    sys.eliminations.push_back(std::move(el));
  }

  // Zero-mean pressure constraint.
  const Index lam = map(L.multiplier());
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    const Eigen::VectorXd moments = disc.pressure_values().transpose() * t.weights;
    for (int i = 0; i < L.pressure_dim(); ++i) {
      const Index gp = map(L.p(c, i));
      trip.emplace_back(gp, lam, moments(i));
      trip.emplace_back(lam, gp, moments(i));
    }
  }

  if (sys.condensed) {
    sys.reduced_to_global.resize(dim);
    for (Index g = L.p_offset(); g < L.p_offset() + L.p_size(); ++g) sys.reduced_to_global[rmap(g)] = g;
    for (Index g = L.uhat_offset(); g < n; ++g) sys.reduced_to_global[rmap(g)] = g;
  }

  sys.matrix.resize(dim, dim);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  return sys;
}

struct StepSolver::Impl {
#ifdef PHDG_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  Index rows = -1;
  Index nnz = -1;
  std::vector<SparseMatrix::StorageIndex> outer, inner;

  bool same_pattern(const SparseMatrix& A) const {
    if (A.rows() != rows || A.nonZeros() != nnz) return false;
    return std::equal(outer.begin(), outer.end(), A.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), A.innerIndexPtr());
  }
  void remember(const SparseMatrix& A) {
    rows = A.rows();
    nnz = A.nonZeros();
    outer.assign(A.outerIndexPtr(), A.outerIndexPtr() + A.outerSize() + 1);
    inner.assign(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros());
  }
};

StepSolver::StepSolver() : impl_(std::make_unique<Impl>()) {}
StepSolver::~StepSolver() = default;
StepSolver::StepSolver(StepSolver&&) noexcept = default;
StepSolver& StepSolver::operator=(StepSolver&&) noexcept = default;

StepSolution StepSolver::solve(const Discretization& disc, const StepSystem& system, double t_next,
                               const SolverOptions& options) {
  const SparseMatrix& A = system.matrix;
  if (!impl_->same_pattern(A)) {
    impl_->lu.analyzePattern(A);
    impl_->remember(A);
  }
  impl_->lu.factorize(A);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->rows = -1;
    throw StepFailure("sparse factorization failed (singular step matrix?)",
                      std::numeric_limits<double>::infinity());
  }
  Eigen::VectorXd y = impl_->lu.solve(system.rhs);
  const double bnorm = system.rhs.norm();
  const double limit = bnorm > 0.0 ? options.residual_rtol : options.residual_atol;
  Eigen::VectorXd r = system.rhs - A * y;
  double residual = bnorm > 0.0 ? r.norm() / bnorm : r.norm();
  // A few sweeps of iterative refinement with the same factors; pays off when
  // the eps = 0 Tikhonov blocks make pivoting less accurate.
  for (int sweep = 0; sweep < options.refinement_sweeps && residual > 1e-3 * limit; ++sweep) {
    const Eigen::VectorXd y1 = y + impl_->lu.solve(r);
    const Eigen::VectorXd r1 = system.rhs - A * y1;
    const double res1 = bnorm > 0.0 ? r1.norm() / bnorm : r1.norm();
    if (!(res1 < residual)) break;
    y = y1;
    r = r1;
    residual = res1;
  }
  if (!(residual <= limit)) {
    std::ostringstream os;
    os << "step residual " << residual << " exceeds " << limit;
    throw StepFailure(os.str(), residual);
  }

  const DofLayout& L = disc.layout();
  StepSolution out{State(L, t_next), residual};
  Eigen::VectorXd& x = out.state.coeffs;
  if (!system.condensed) {
    x = y;
  } else {
    for (std::size_t r = 0; r < system.reduced_to_global.size(); ++r)
      x(system.reduced_to_global[r]) = y(Index(r));
    for (const CellElimination& el : system.eliminations) {
      Eigen::VectorXd xf(el.trace_global.size());
      for (std::size_t i = 0; i < el.trace_global.size(); ++i) xf(Index(i)) = x(el.trace_global[i]);
      const Eigen::VectorXd xc = el.lu.solve(el.rhs - el.coupling * xf);
      for (std::size_t i = 0; i < el.cell_global.size(); ++i) x(el.cell_global[i]) = xc(Index(i));
    }
  }
  normalize_pressure(disc, x);
  return out;
}

StepSolution solve_step(const Discretization& disc, const StepSystem& system, double t_next,
                        const SolverOptions& options) {
  StepSolver solver;
  return solver.solve(disc, system, t_next, options);
}

double pressure_mean(const Discretization& disc, const Eigen::VectorXd& x) {
  double integral = 0.0, area = 0.0;
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    integral += t.weights.dot(disc.pressure_values() * disc.cell_coeffs_p(x, c));
    area += t.geometry.area;
  }
  return integral / area;
}

void normalize_pressure(const Discretization& disc, Eigen::VectorXd& x) {
  const DofLayout& L = disc.layout();
  const double mean = pressure_mean(disc, x);
  x.segment(L.p_offset(), L.p_size()).array() -= mean;
  x.segment(L.phat_offset(), L.phat_size()).array() -= mean;
}

SpdDiagnostics spd_diagnostics(const Discretization& disc, const State& state) {
  SpdDiagnostics d{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
  const CellBasis& basis = disc.cell_basis();
  Eigen::MatrixXd vertex_values(3, basis.dim());
  {
    const std::vector<Point> ref = {Point(0, 0), Point(1, 0), Point(0, 1)};
    vertex_values = basis.tabulate(ref).values;
  }
  for (int c = 0; c < disc.num_cells(); ++c) {
    std::array<Eigen::VectorXd, 3> cq, cv;
    for (int m = 0; m < 3; ++m) {
      const Eigen::VectorXd coef = disc.cell_coeffs_C(state.coeffs, c, m);
      cq[m] = disc.cell_values() * coef;
      cv[m] = vertex_values * coef;
    }
    auto visit = [&](const std::array<Eigen::VectorXd, 3>& v) {
      for (Index q = 0; q < v[0].size(); ++q) {
        const SymTensor t{v[0](q), v[1](q), v[2](q)};
        d.min_det = std::min(d.min_det, t.det());
        d.min_c11 = std::min(d.min_c11, t.xx);
        d.min_c22 = std::min(d.min_c22, t.yy);
      }
    };
    visit(cq);
    visit(cv);
  }
  return d;
}

MassConservation mass_conservation(const Discretization& disc, const State& state) {
  MassConservation mc;
  const Eigen::VectorXd& x = state.coeffs;
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    const Eigen::VectorXd div = t.grad_x * disc.cell_coeffs_u(x, c, 0) + t.grad_y * disc.cell_coeffs_u(x, c, 1);
    mc.divergence = std::max(mc.divergence, std::sqrt(t.weights.dot(div.cwiseAbs2())));
  }
  const Eigen::MatrixXd& psi = disc.facet_values();
  for (int f = 0; f < static_cast<int>(disc.mesh().num_facets()); ++f) {
    const Facet& facet = disc.mesh().facet(f);
    Eigen::VectorXd jump;
    Eigen::VectorXd weights;
    for (int o = 0; o < facet.owner_count; ++o) {
      const EdgeTables& et = disc.cell(facet.owners[o].cell).edges[facet.owners[o].local_edge];
      Eigen::VectorXd un = et.normal.x() * (et.values * disc.cell_coeffs_u(x, facet.owners[o].cell, 0)) +
                           et.normal.y() * (et.values * disc.cell_coeffs_u(x, facet.owners[o].cell, 1));
      if (o == 0) {
        jump = un;
        weights = et.weights;
      } else {
        jump += un;
      }
    }
    if (facet.is_boundary()) {
      const int c = facet.owners[0].cell;
      const Point n = disc.cell(c).edges[facet.owners[0].local_edge].normal;
      const Eigen::VectorXd uhn = psi * (n.x() * disc.facet_coeffs_uhat(x, f, 0) + n.y() * disc.facet_coeffs_uhat(x, f, 1));
      mc.boundary_normal = std::max(mc.boundary_normal, std::sqrt(weights.dot((jump - uhn).cwiseAbs2())));
    } else {
      mc.jump = std::max(mc.jump, std::sqrt(weights.dot(jump.cwiseAbs2())));
    }
  }
  return mc;
}

StepDiagnostics step_diagnostics(const Discretization& disc, const ModelParams& params,
                                 const State& previous, const State& next, const Forcing& forcing) {
  StepDiagnostics d;
  d.time = next.time;
  d.mass = mass_conservation(disc, next);
  const Eigen::VectorXd& x = next.coeffs;
  const Eigen::VectorXd& xp = previous.coeffs;
  const Eigen::MatrixXd& phi = disc.cell_values();
  const Eigen::MatrixXd& psi = disc.facet_values();
  const double h = disc.mesh().mesh_size();
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    const Eigen::VectorXd trc = disc.cell_coeffs_C(x, c, 0) + disc.cell_coeffs_C(x, c, 2);
    const Eigen::VectorXd trc_prev = disc.cell_coeffs_C(xp, c, 0) + disc.cell_coeffs_C(xp, c, 2);
    const Eigen::VectorXd trq = phi * trc, trq_prev = phi * trc_prev;
    d.trc_l2_sq += t.weights.dot(trq.cwiseAbs2());
    d.trc_increment_sq += t.weights.dot((trq - trq_prev).cwiseAbs2());
    d.trace_product += t.weights.dot((trq.cwiseProduct(trq_prev)).cwiseAbs2());
    const Eigen::VectorXd gtx = t.grad_x * trc, gty = t.grad_y * trc;
    d.trace_gradient += params.epsilon * t.weights.dot(gtx.cwiseAbs2() + gty.cwiseAbs2());
    for (int comp = 0; comp < 2; ++comp) {
      const Eigen::VectorXd uc = disc.cell_coeffs_u(x, c, comp);
      const Eigen::VectorXd uq = phi * uc, uq_prev = phi * disc.cell_coeffs_u(xp, c, comp);
      d.u_l2_sq += t.weights.dot(uq.cwiseAbs2());
      d.u_increment_sq += t.weights.dot((uq - uq_prev).cwiseAbs2());
      const Eigen::VectorXd gx = t.grad_x * uc, gy = t.grad_y * uc;
      d.viscous += params.nu * t.weights.dot(gx.cwiseAbs2() + gy.cwiseAbs2());
    }
    if (forcing.f) {
      for (Index q = 0; q < t.weights.size(); ++q)
        d.forcing_sq += t.weights(q) * forcing.f(t.points[q], next.time).squaredNorm();
    }
    for (int e = 0; e < 3; ++e) {
      const EdgeTables& et = t.edges[e];
      const int f = et.facet;
      Eigen::VectorXd wn = Eigen::VectorXd::Zero(et.weights.size());
      for (int comp = 0; comp < 2; ++comp)
        wn += et.normal(comp) * (et.values * disc.cell_coeffs_u(xp, c, comp));
      for (int comp = 0; comp < 2; ++comp) {
        const Eigen::VectorXd diff = et.values * disc.cell_coeffs_u(x, c, comp) - psi * disc.facet_coeffs_uhat(x, f, comp);
        d.velocity_penalty += params.nu / h * et.weights.dot(diff.cwiseAbs2());
        d.upwind_velocity += et.weights.dot(wn.cwiseAbs().cwiseProduct(diff.cwiseAbs2()));
      }
      const Eigen::VectorXd trhat = psi * (disc.facet_coeffs_Chat(x, f, 0) + disc.facet_coeffs_Chat(x, f, 2));
      const Eigen::VectorXd tdiff = et.values * trc - trhat;
      d.trace_penalty += params.epsilon / h * et.weights.dot(tdiff.cwiseAbs2());
      d.upwind_trace += et.weights.dot(wn.cwiseAbs().cwiseProduct(tdiff.cwiseAbs2()));
    }
  }
  d.spd = spd_diagnostics(disc, next);
  return d;
}

double time_step(double final_time, int steps) {
  if (steps < 1) throw ArgumentError("number of time steps must be >= 1");
  if (!(final_time > 0.0)) throw ArgumentError("final time must be > 0");
  return final_time / steps;
}

Trajectory run(const SimulationSetup& setup) {
  if (setup.disc == nullptr) throw ArgumentError("simulation setup has no discretization");
  const Discretization& disc = *setup.disc;
  ModelParams params = setup.params;
  params.tau = time_step(setup.final_time, setup.steps);
  params.validate();

  Trajectory traj;
  traj.tau = params.tau;
  const VectorField zero_u = [](const Point&) { return Eigen::Vector2d::Zero(); };
  const TensorField zero_c = [](const Point&) { return SymTensor{}; };
  State state = project_initial(disc, setup.u0 ? setup.u0 : zero_u, setup.C0 ? setup.C0 : zero_c, 0.0);
  traj.initial = state;

  // Reference for the energy ratio: ||u^0||^2 + ||trC^0||^2 (+ tau sum ||f||^2 below).
  StepDiagnostics d0 = step_diagnostics(disc, params, state, state, Forcing{});
  double reference = d0.u_l2_sq + d0.trc_l2_sq;
  double max_u = d0.u_l2_sq, max_trc = d0.trc_l2_sq;
  double sums = 0.0;

  StepSolver solver;
  for (int n = 0; n < setup.steps; ++n) {
    const double t_next = (n + 1) * params.tau;
    StepDiagnostics d;
    State next;
    try {
      const StepSystem sys = assemble_step(disc, params, state, t_next, setup.forcing, setup.solver);
      StepSolution sol = solver.solve(disc, sys, t_next, setup.solver);
      next = std::move(sol.state);
      d = step_diagnostics(disc, params, state, next, setup.forcing);
      d.solver_residual = sol.residual;
      d.regularized_facets = static_cast<int>(sys.regularized_facets.size());
    } catch (const StepFailure& e) {
      traj.failed = true;
      traj.failure = "step " + std::to_string(n + 1) + ": " + e.what();
      break;
    }
    d.step = n + 1;
    if (d.regularized_facets > 0) ++traj.regularization_activations;
    max_u = std::max(max_u, d.u_l2_sq);
    max_trc = std::max(max_trc, d.trc_l2_sq);
    sums += d.u_increment_sq + d.trc_increment_sq +
            params.tau * (d.viscous + d.velocity_penalty + d.trace_penalty + d.trace_gradient +
                          d.upwind_velocity + d.upwind_trace + d.trace_product);
    reference += params.tau * d.forcing_sq;
    d.energy_lhs = max_u + max_trc + sums;
    d.energy_ratio = reference > 0.0 ? d.energy_lhs / reference : 0.0;

    traj.steps.push_back(d);
    if (setup.observer) setup.observer(d, next);
    state = std::move(next);
    if (std::find(setup.store_steps.begin(), setup.store_steps.end(), n + 1) != setup.store_steps.end())
      traj.stored.push_back(state);

    const double unorm = std::sqrt(d.u_l2_sq), tnorm = std::sqrt(d.trc_l2_sq);
    if (!std::isfinite(d.energy_lhs) || !(unorm <= setup.blowup_bound) || !(tnorm <= setup.blowup_bound)) {
      traj.failed = true;
      std::ostringstream os;
      os << "step " << n + 1 << ": blow-up detected (||u_h|| = " << unorm << ", ||trC_h|| = " << tnorm
         << ", bound " << setup.blowup_bound << ")";
      traj.failure = os.str();
      break;
    }
  }
  traj.final = state;
  return traj;
}

}  // namespace phdg
