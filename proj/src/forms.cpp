#include "phdg/forms.hpp"

#include <cmath>
#include <string>

namespace phdg {

void ModelParams::validate() const {
  auto fail = [](const std::string& name, double v, const char* rule) {
    throw ArgumentError("parameter " + name + " = " + std::to_string(v) + " must be " + rule);
  };
  if (!(nu > 0.0)) fail("nu", nu, "> 0");
  if (!(epsilon >= 0.0)) fail("epsilon", epsilon, ">= 0");
  if (!(alpha > 0.0)) fail("alpha", alpha, "> 0");
  if (!(beta > 0.0)) fail("beta", beta, "> 0");
  if (!(tau > 0.0)) fail("tau", tau, "> 0");
}

std::vector<Index> cell_dofs(const Discretization& disc, int c) {
  const DofLayout& L = disc.layout();
  const LocalLayout ll(L);
  std::vector<Index> g(ll.size(), -1);
  for (int comp = 0; comp < 2; ++comp)
    for (int i = 0; i < ll.nk; ++i) g[ll.u(comp, i)] = L.u(c, comp, i);
  for (int i = 0; i < ll.np; ++i) g[ll.p(i)] = L.p(c, i);
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < ll.nk; ++i) g[ll.C(m, i)] = L.C(c, m, i);
  for (int e = 0; e < 3; ++e) {
    const int f = disc.cell(c).edges[e].facet;
    for (int i = 0; i < ll.nf; ++i) {
      for (int comp = 0; comp < 2; ++comp) g[ll.uhat(e, comp, i)] = L.uhat(f, comp, i);
      g[ll.phat(e, i)] = L.phat(f, i);
      for (int m = 0; m < 3; ++m) g[ll.Chat(e, m, i)] = L.Chat(f, m, i);
    }
  }
  return g;
}

double LocalBlock::apply(const Eigen::VectorXd& test, const Eigen::VectorXd& trial) const {
  double s = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double row = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) row += mat(Index(r), Index(k)) * trial(cols[k]);
    s += test(rows[r]) * row;
  }
  return s;
}

void LocalBlock::add_to(Eigen::MatrixXd& local, bool transposed) const {
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (transposed)
        local(cols[k], rows[r]) += mat(Index(r), Index(k));
      else
        local(rows[r], cols[k]) += mat(Index(r), Index(k));
    }
}

namespace {

// Map scalar numbering [cell | e0 | e1 | e2] to the cell-local index of
// component `comp` of the velocity or conformation pair.
int scalar_to_local(const LocalLayout& ll, TransportedField field, int comp, int s) {
  if (s < ll.nk) return field == TransportedField::velocity ? ll.u(comp, s) : ll.C(comp, s);
  const int e = (s - ll.nk) / ll.nf;
  const int j = (s - ll.nk) % ll.nf;
  return field == TransportedField::velocity ? ll.uhat(e, comp, j) : ll.Chat(e, comp, j);
}

LocalBlock componentwise(const LocalLayout& ll, const Eigen::MatrixXd& scalar, TransportedField field,
                         bool cell_only = false) {
  const int ncomp = field == TransportedField::velocity ? 2 : 3;
  const int ns = cell_only ? ll.nk : static_cast<int>(scalar.rows());
  LocalBlock b;
  b.mat = Eigen::MatrixXd::Zero(ncomp * ns, ncomp * ns);
  for (int comp = 0; comp < ncomp; ++comp) {
    const double w = field == TransportedField::velocity ? 1.0 : kSymWeight[comp];
    b.mat.block(comp * ns, comp * ns, ns, ns) = w * scalar.topLeftCorner(ns, ns);
    for (int s = 0; s < ns; ++s) b.rows.push_back(scalar_to_local(ll, field, comp, s));
  }
  b.cols = b.rows;
  return b;
}

Eigen::Vector2d cell_gradient(const Eigen::MatrixXd& gx, const Eigen::MatrixXd& gy, Index q, Index i) {
  return {gx(q, i), gy(q, i)};
}

}  // namespace

Eigen::MatrixXd scalar_interior_penalty(const Discretization& disc, int c, double coeff,
                                        double penalty) {
  const LocalLayout ll(disc.layout());
  const int ns = ll.nk + 3 * ll.nf;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns, ns);
  if (coeff == 0.0) return A;
  const CellTables& t = disc.cell(c);
  const Eigen::MatrixXd& gx = t.grad_x;
  const Eigen::MatrixXd& gy = t.grad_y;
  A.topLeftCorner(ll.nk, ll.nk) =
      coeff * (gx.transpose() * t.weights.asDiagonal() * gx + gy.transpose() * t.weights.asDiagonal() * gy);

  const double sigma = coeff * penalty / t.geometry.diameter;
  const Eigen::MatrixXd& psi = disc.facet_values();
  Eigen::VectorXd jump(ns), dn(ns);
  for (int e = 0; e < 3; ++e) {
    const EdgeTables& et = t.edges[e];
    for (Index q = 0; q < et.weights.size(); ++q) {
      jump.setZero();
      dn.setZero();
      for (int i = 0; i < ll.nk; ++i) {
        jump(i) = et.values(q, i);
        dn(i) = et.grad_x(q, i) * et.normal.x() + et.grad_y(q, i) * et.normal.y();
      }
      for (int j = 0; j < ll.nf; ++j) jump(ll.nk + e * ll.nf + j) = -psi(q, j);
      const double w = et.weights(q);
      // -coeff (grad u . n)(v - vhat) - coeff (u - uhat)(grad v . n) + sigma (u - uhat)(v - vhat)
      A.noalias() -= coeff * w * (jump * dn.transpose() + dn * jump.transpose());
      A.noalias() += sigma * w * jump * jump.transpose();
    }
  }
  return A;
}

Eigen::MatrixXd scalar_convection(const Discretization& disc, int c, const AdvectionField& w) {
  const LocalLayout ll(disc.layout());
  const int ns = ll.nk + 3 * ll.nf;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns, ns);
  const CellTables& t = disc.cell(c);
  const Eigen::MatrixXd& phi = disc.cell_values();
  // -int u (w . grad v)
  for (Index q = 0; q < t.weights.size(); ++q) {
    const double wq = t.weights(q);
    for (int i = 0; i < ll.nk; ++i) {
      const double wgrad = w.cell(q, 0) * t.grad_x(q, i) + w.cell(q, 1) * t.grad_y(q, i);
      for (int j = 0; j < ll.nk; ++j) A(i, j) -= wq * phi(q, j) * wgrad;
    }
  }
  const Eigen::MatrixXd& psi = disc.facet_values();
  Eigen::VectorXd jump(ns), plus(ns);
  for (int e = 0; e < 3; ++e) {
    const EdgeTables& et = t.edges[e];
    for (Index q = 0; q < et.weights.size(); ++q) {
      jump.setZero();
      plus.setZero();
      for (int i = 0; i < ll.nk; ++i) {
        jump(i) = et.values(q, i);
        plus(i) = et.values(q, i);
      }
      for (int j = 0; j < ll.nf; ++j) {
        jump(ll.nk + e * ll.nf + j) = -psi(q, j);
        plus(ll.nk + e * ll.nf + j) = psi(q, j);
      }
      const double wn = w.edge[e](q, 0) * et.normal.x() + w.edge[e](q, 1) * et.normal.y();
      const double wq = et.weights(q);
      // (w.n)/2 (u + uhat)(v - vhat) + |w.n|/2 (u - uhat)(v - vhat)
      A.noalias() += 0.5 * wq * wn * jump * plus.transpose();
      A.noalias() += 0.5 * wq * std::abs(wn) * jump * jump.transpose();
    }
  }
  return A;
}

AdvectionField advection_field(const Discretization& disc, int c, const Eigen::VectorXd& state) {
  const CellTables& t = disc.cell(c);
  AdvectionField w;
  w.cell.resize(t.weights.size(), 2);
  for (int comp = 0; comp < 2; ++comp) {
    const Eigen::VectorXd uc = disc.cell_coeffs_u(state, c, comp);
    w.cell.col(comp) = disc.cell_values() * uc;
    for (int e = 0; e < 3; ++e) {
      if (comp == 0) w.edge[e].resize(t.edges[e].weights.size(), 2);
      w.edge[e].col(comp) = t.edges[e].values * uc;
    }
  }
  return w;
}

TensorSamples tensor_samples(const Discretization& disc, int c, const Eigen::VectorXd& state) {
  const CellTables& t = disc.cell(c);
  TensorSamples s;
  std::array<Eigen::VectorXd, 3> comps;
  for (int m = 0; m < 3; ++m) comps[m] = disc.cell_coeffs_C(state, c, m);
  auto sample = [&](const Eigen::MatrixXd& values) {
    std::vector<SymTensor> out(values.rows());
    for (int m = 0; m < 3; ++m) {
      const Eigen::VectorXd v = values * comps[m];
      for (Index q = 0; q < v.size(); ++q) out[q][m] = v(q);
    }
    return out;
  };
  s.cell = sample(disc.cell_values());
  for (int e = 0; e < 3; ++e) s.edge[e] = sample(t.edges[e].values);
  return s;
}

LocalBlock local_mass(const Discretization& disc, int c, double scale, TransportedField field) {
  const LocalLayout ll(disc.layout());
  const CellTables& t = disc.cell(c);
  const Eigen::MatrixXd& phi = disc.cell_values();
  const Eigen::MatrixXd m = scale * (phi.transpose() * t.weights.asDiagonal() * phi);
  return componentwise(ll, m, field, /*cell_only=*/true);
}

LocalBlock local_viscous(const Discretization& disc, int c, const ModelParams& params) {
  const LocalLayout ll(disc.layout());
  return componentwise(ll, scalar_interior_penalty(disc, c, params.nu, params.alpha),
                       TransportedField::velocity);
}

LocalBlock local_conformation_diffusion(const Discretization& disc, int c, const ModelParams& params) {
  const LocalLayout ll(disc.layout());
  return componentwise(ll, scalar_interior_penalty(disc, c, params.epsilon, params.beta),
                       TransportedField::conformation);
}

LocalBlock local_convection(const Discretization& disc, int c, const AdvectionField& w,
                            TransportedField field) {
  const LocalLayout ll(disc.layout());
  return componentwise(ll, scalar_convection(disc, c, w), field);
}

LocalBlock local_pressure(const Discretization& disc, int c) {
  const LocalLayout ll(disc.layout());
  const CellTables& t = disc.cell(c);
  const Eigen::MatrixXd& phi = disc.cell_values();
  const Eigen::MatrixXd& pb = disc.pressure_values();
  const Eigen::MatrixXd& psi = disc.facet_values();

  LocalBlock b;
  for (int i = 0; i < ll.np; ++i) b.rows.push_back(ll.p(i));
  for (int e = 0; e < 3; ++e)
    for (int i = 0; i < ll.nf; ++i) b.rows.push_back(ll.phat(e, i));
  for (int comp = 0; comp < 2; ++comp)
    for (int j = 0; j < ll.nk; ++j) b.cols.push_back(ll.u(comp, j));
  for (int e = 0; e < 3; ++e)
    for (int comp = 0; comp < 2; ++comp)
      for (int j = 0; j < ll.nf; ++j) b.cols.push_back(ll.uhat(e, comp, j));
  b.mat = Eigen::MatrixXd::Zero(b.rows.size(), b.cols.size());

  auto col_u = [&](int comp, int j) { return comp * ll.nk + j; };
  auto col_uhat = [&](int e, int comp, int j) { return 2 * ll.nk + (e * 2 + comp) * ll.nf + j; };
  auto row_phat = [&](int e, int i) { return ll.np + e * ll.nf + i; };

  // -int_K q div v
  for (Index q = 0; q < t.weights.size(); ++q) {
    for (int i = 0; i < ll.np; ++i)
      for (int j = 0; j < ll.nk; ++j) {
        b.mat(i, col_u(0, j)) -= t.weights(q) * pb(q, i) * t.grad_x(q, j);
        b.mat(i, col_u(1, j)) -= t.weights(q) * pb(q, i) * t.grad_y(q, j);
      }
  }
  // + int_dK (v - vhat) . n qhat
  for (int e = 0; e < 3; ++e) {
    const EdgeTables& et = t.edges[e];
    for (Index q = 0; q < et.weights.size(); ++q) {
      const double w = et.weights(q);
      for (int i = 0; i < ll.nf; ++i) {
        for (int comp = 0; comp < 2; ++comp) {
          const double wn = w * psi(q, i) * et.normal(comp);
          for (int j = 0; j < ll.nk; ++j) b.mat(row_phat(e, i), col_u(comp, j)) += wn * et.values(q, j);
          for (int j = 0; j < ll.nf; ++j) b.mat(row_phat(e, i), col_uhat(e, comp, j)) -= wn * psi(q, j);
        }
      }
    }
  }
  (void)phi;
  return b;
}

LocalBlock local_elastic_coupling_momentum(const Discretization& disc, int c,
                                           const TensorSamples& c_prev) {
  const LocalLayout ll(disc.layout());
  const CellTables& t = disc.cell(c);
  const Eigen::MatrixXd& phi = disc.cell_values();
  const Eigen::MatrixXd& psi = disc.facet_values();

  LocalBlock b;
  for (int comp = 0; comp < 2; ++comp)
    for (int i = 0; i < ll.nk; ++i) b.rows.push_back(ll.u(comp, i));
  for (int e = 0; e < 3; ++e)
    for (int comp = 0; comp < 2; ++comp)
      for (int i = 0; i < ll.nf; ++i) b.rows.push_back(ll.uhat(e, comp, i));
  // trC^{n+1} = C11 + C22: both column groups receive identical entries.
  for (int m : {0, 2})
    for (int j = 0; j < ll.nk; ++j) b.cols.push_back(ll.C(m, j));
  Eigen::MatrixXd half = Eigen::MatrixXd::Zero(b.rows.size(), ll.nk);

  auto row_u = [&](int comp, int i) { return comp * ll.nk + i; };
  auto row_uhat = [&](int e, int comp, int i) { return 2 * ll.nk + (e * 2 + comp) * ll.nf + i; };

  // + int_K trC^{n+1} C^n : grad v
  for (Index q = 0; q < t.weights.size(); ++q) {
    const Eigen::Matrix2d Cn = c_prev.cell[q].matrix();
    for (int i = 0; i < ll.nk; ++i) {
      const Eigen::Vector2d cg = Cn * cell_gradient(t.grad_x, t.grad_y, q, i);
      for (int comp = 0; comp < 2; ++comp)
        for (int j = 0; j < ll.nk; ++j) half(row_u(comp, i), j) += t.weights(q) * cg(comp) * phi(q, j);
    }
  }
  // - int_dK trC^{n+1} C^n : (v - vhat) (x) n
  for (int e = 0; e < 3; ++e) {
    const EdgeTables& et = t.edges[e];
    for (Index q = 0; q < et.weights.size(); ++q) {
      const Eigen::Vector2d cnn = c_prev.edge[e][q].matrix() * et.normal;
      const double w = et.weights(q);
      for (int comp = 0; comp < 2; ++comp)
        for (int j = 0; j < ll.nk; ++j) {
          const double a = w * cnn(comp) * et.values(q, j);
          for (int i = 0; i < ll.nk; ++i) half(row_u(comp, i), j) -= a * et.values(q, i);
          for (int i = 0; i < ll.nf; ++i) half(row_uhat(e, comp, i), j) += a * psi(q, i);
        }
    }
  }
  b.mat.resize(half.rows(), 2 * ll.nk);
  b.mat << half, half;
  return b;
}

ConformationCoupling local_elastic_coupling_conformation(const Discretization& disc, int c,
                                                         const TensorSamples& c_prev) {
  const LocalLayout ll(disc.layout());
  const CellTables& t = disc.cell(c);
  const Eigen::MatrixXd& phi = disc.cell_values();

  ConformationCoupling out;
  LocalBlock& a = out.velocity_gradient;
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < ll.nk; ++i) a.rows.push_back(ll.C(m, i));
  for (int comp = 0; comp < 2; ++comp)
    for (int j = 0; j < ll.nk; ++j) a.cols.push_back(ll.u(comp, j));
  a.mat = Eigen::MatrixXd::Zero(a.rows.size(), a.cols.size());

  Eigen::VectorXd weight2(t.weights.size());
  for (Index q = 0; q < t.weights.size(); ++q) {
    const Eigen::Matrix2d Cn = c_prev.cell[q].matrix();
    const double tr = c_prev.cell[q].trace();
    weight2(q) = t.weights(q) * tr * tr;
    for (int comp = 0; comp < 2; ++comp)
      for (int j = 0; j < ll.nk; ++j) {
        Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
        G.row(comp) = cell_gradient(t.grad_x, t.grad_y, q, j).transpose();
        const Eigen::Matrix2d M = G * Cn + Cn * G.transpose();
        const double contr[3] = {M(0, 0), M(0, 1) + M(1, 0), M(1, 1)};
        for (int m = 0; m < 3; ++m)
          for (int i = 0; i < ll.nk; ++i)
            a.mat(m * ll.nk + i, comp * ll.nk + j) -= t.weights(q) * contr[m] * phi(q, i);
      }
  }

  const Eigen::MatrixXd mass2 = phi.transpose() * weight2.asDiagonal() * phi;
  out.trace_squared = componentwise(ll, mass2, TransportedField::conformation, /*cell_only=*/true);
  return out;
}

Eigen::VectorXd local_rhs(const Discretization& disc, int c, const Eigen::VectorXd& state_n,
                          double t_next, const ModelParams& params, const Forcing& forcing) {
  const LocalLayout ll(disc.layout());
  const CellTables& t = disc.cell(c);
  const Eigen::MatrixXd& phi = disc.cell_values();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ll.size());
  const double inv_tau = 1.0 / params.tau;

  std::array<Eigen::VectorXd, 2> un;
  for (int comp = 0; comp < 2; ++comp) un[comp] = phi * disc.cell_coeffs_u(state_n, c, comp);
  std::array<Eigen::VectorXd, 3> cn;
  for (int m = 0; m < 3; ++m) cn[m] = phi * disc.cell_coeffs_C(state_n, c, m);

  for (Index q = 0; q < t.weights.size(); ++q) {
    const double w = t.weights(q);
    Eigen::Vector2d rhs_u(inv_tau * un[0](q), inv_tau * un[1](q));
    std::optional<SymTensor> F;
    if (forcing.joint) {
      const auto [fq, Fq] = forcing.joint(t.points[q], t_next);
      rhs_u += fq;
      F = Fq;
    } else {
      if (forcing.f) rhs_u += forcing.f(t.points[q], t_next);
      if (forcing.F) F = forcing.F(t.points[q], t_next);
    }
    const double tr = cn[0](q) + cn[2](q);
    double rhs_c[3];
    for (int m = 0; m < 3; ++m) rhs_c[m] = inv_tau * cn[m](q);
    rhs_c[0] += tr;
    rhs_c[2] += tr;
    if (F)
      for (int m = 0; m < 3; ++m) rhs_c[m] += (*F)[m];
    for (int i = 0; i < ll.nk; ++i) {
      const double wphi = w * phi(q, i);
      for (int comp = 0; comp < 2; ++comp) b(ll.u(comp, i)) += wphi * rhs_u(comp);
      for (int m = 0; m < 3; ++m) b(ll.C(m, i)) += kSymWeight[m] * wphi * rhs_c[m];
    }
  }
  return b;
}

}  // namespace phdg
