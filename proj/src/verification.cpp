#include "phdg/verification.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "phdg/quadrature.hpp"

namespace phdg {

namespace {

constexpr double kPi = std::numbers::pi;

// coef * S(x)^sx * S(y)^sy * sin(pi (a x + b y + t)), S(s) = sin^2(pi s).
struct Wave {
  double coef;
  bool sx, sy;
  double a, b;
};

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// sin(theta + n pi/2) from sin(theta), cos(theta).
double shifted_sin(double s, double c, int n) {
  switch (n & 3) {
    case 0: return s;
    case 1: return c;
    case 2: return -s;
    default: return -c;
  }
}

constexpr int kMaxOrder = 4;

// n-th derivatives of sin^2(pi s) = 1/2 - cos(2 pi s)/2, n = 0..kMaxOrder-1.
std::array<double, kMaxOrder> sin2_derivatives(bool present, double s) {
  std::array<double, kMaxOrder> d{};
  if (!present) {
    d[0] = 1.0;
    return d;
  }
  const double sn = std::sin(kPi * s);
  d[0] = sn * sn;
  const double s2 = std::sin(2.0 * kPi * s), c2 = std::cos(2.0 * kPi * s);
  // d^n(-cos(2 pi s)/2) = -(2 pi)^n / 2 cos(2 pi s + n pi/2), cos(a + n pi/2) = sin(a + (n+1) pi/2)
  for (int n = 1; n < kMaxOrder; ++n) d[n] = -0.5 * ipow(2.0 * kPi, n) * shifted_sin(s2, c2, n + 1);
  return d;
}

constexpr double kBinom[kMaxOrder][kMaxOrder] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};

// Trigonometric factors of one wave at one (x, t), shared by all derivatives.
struct WaveAt {
  std::array<double, kMaxOrder> A, B;
  double s, c;
};

WaveAt wave_at(const Wave& w, const Point& x, double t) {
  const double theta = kPi * (w.a * x.x() + w.b * x.y() + t);
  return {sin2_derivatives(w.sx, x.x()), sin2_derivatives(w.sy, x.y()), std::sin(theta), std::cos(theta)};
}

// d^i/dx^i d^j/dy^j d^l/dt^l of a wave, by the product rule (i, j < kMaxOrder).
double D(const Wave& w, const WaveAt& v, int i, int j, int l = 0) {
  double sum = 0.0;
  for (int i1 = 0; i1 <= i; ++i1) {
    if (v.A[i1] == 0.0) continue;
    for (int j1 = 0; j1 <= j; ++j1) {
      if (v.B[j1] == 0.0) continue;
      const int mx = i - i1, my = j - j1;
      const double G = ipow(kPi * w.a, mx) * ipow(kPi * w.b, my) * ipow(kPi, l) *
                       shifted_sin(v.s, v.c, mx + my + l);
      sum += kBinom[i][i1] * kBinom[j][j1] * v.A[i1] * v.B[j1] * G;
    }
  }
  return w.coef * sum;
}

const Wave kPhi{std::sqrt(3.0) / (2.0 * kPi), true, true, 1.0, 1.0};
const Wave kP{1.0, false, false, 1.0, 2.0};
// C12 = (pi/sqrt3) phi has coefficient 1/2.
const std::array<Wave, 3> kC{Wave{0.5, true, true, 1.0, 0.0}, Wave{0.5, true, true, 1.0, 1.0},
                             Wave{0.5, true, true, 0.0, 1.0}};
const std::array<double, 3> kCShift{1.0, 0.0, 1.0};

// Example 2: psi = -200 (g(x) g(y))^2, g(s) = s(1 - s).
Eigen::Vector2d example2_velocity(const Point& x, Eigen::Matrix2d* grad) {
  auto g = [](double s) { return s * (1.0 - s); };
  auto dg = [](double s) { return 1.0 - 2.0 * s; };
  const double gx = g(x.x()), gy = g(x.y()), dgx = dg(x.x()), dgy = dg(x.y());
  // psi_x = -400 g gx' gy^2, psi_y = -400 gx^2 gy gy'
  const double psi_x = -400.0 * gx * dgx * gy * gy;
  const double psi_y = -400.0 * gx * gx * gy * dgy;
  if (grad) {
    const double psi_xx = -400.0 * (dgx * dgx - 2.0 * gx) * gy * gy;
    const double psi_yy = -400.0 * gx * gx * (dgy * dgy - 2.0 * gy);
    const double psi_xy = -800.0 * gx * dgx * gy * dgy;
    (*grad) << -psi_xy, -psi_yy, psi_xx, psi_xy;
  }
  return {-psi_y, psi_x};
}

Eigen::Vector2d example2_force(const Point& x) { return {-70.0 * (x.y() - 0.5), 70.0 * (x.x() - 0.5)}; }

}  // namespace

MmsCase example1_case(double nu, double epsilon) { return {CaseId::example1, nu, epsilon}; }
MmsCase example2_case() { return {CaseId::example2, 1e-2, 1e-4}; }

ExactValues eval_exact(const MmsCase& mc, const Point& x, double t) {
  ExactValues v;
  if (mc.id == CaseId::example2) {
    v.u = example2_velocity(x, nullptr);
    v.C = SymTensor::identity(std::sqrt(2.0) / 2.0);
    return v;
  }
  const double s1 = std::sin(kPi * x.x()), s2 = std::sin(kPi * x.y());
  const double c1 = std::cos(kPi * x.x()), c2 = std::cos(kPi * x.y());
  const double th = kPi * (x.x() + x.y() + t);
  const double k = std::sqrt(3.0) / (2.0 * kPi);
  // phi = k s1^2 s2^2 sin(th)
  const double phi_x = k * s2 * s2 * (2.0 * kPi * s1 * c1 * std::sin(th) + kPi * s1 * s1 * std::cos(th));
  const double phi_y = k * s1 * s1 * (2.0 * kPi * s2 * c2 * std::sin(th) + kPi * s2 * s2 * std::cos(th));
  v.u = {-phi_y, phi_x};
  v.p = std::sin(kPi * (x.x() + 2.0 * x.y() + t));
  const double bump = s1 * s1 * s2 * s2;
  v.C.xx = 0.5 * bump * std::sin(kPi * (x.x() + t)) + 1.0;
  v.C.yy = 0.5 * bump * std::sin(kPi * (x.y() + t)) + 1.0;
  v.C.xy = (kPi / std::sqrt(3.0)) * k * bump * std::sin(th);
  return v;
}

ExactJet eval_jet(const MmsCase& mc, const Point& x, double t) {
  ExactJet j;
  if (mc.id == CaseId::example2) {
    j.value = eval_exact(mc, x, t);
    example2_velocity(x, &j.grad_u);
    return j;
  }
  const Wave& F = kPhi;
  const WaveAt f = wave_at(F, x, t);
  auto Dphi = [&](int i, int k, int l = 0) { return D(F, f, i, k, l); };
  const WaveAt pw = wave_at(kP, x, t);
  j.value.u = {-Dphi(0, 1), Dphi(1, 0)};
  j.value.p = D(kP, pw, 0, 0);
  j.grad_u << -Dphi(1, 1), -Dphi(0, 2), Dphi(2, 0), Dphi(1, 1);
  j.hess_u[0] = {-Dphi(2, 1), -Dphi(1, 2), -Dphi(0, 3)};
  j.hess_u[1] = {Dphi(3, 0), Dphi(2, 1), Dphi(1, 2)};
  j.lap_u = {j.hess_u[0](0) + j.hess_u[0](2), j.hess_u[1](0) + j.hess_u[1](2)};
  j.u_t = {-Dphi(0, 1, 1), Dphi(1, 0, 1)};
  j.grad_p = {D(kP, pw, 1, 0), D(kP, pw, 0, 1)};
  for (int m = 0; m < 3; ++m) {
    const WaveAt cw = wave_at(kC[m], x, t);
    j.value.C[m] = D(kC[m], cw, 0, 0) + kCShift[m];
    j.grad_C[m] = {D(kC[m], cw, 1, 0), D(kC[m], cw, 0, 1)};
    j.hess_C[m] = {D(kC[m], cw, 2, 0), D(kC[m], cw, 1, 1), D(kC[m], cw, 0, 2)};
    j.lap_C[m] = j.hess_C[m](0) + j.hess_C[m](2);
    j.C_t[m] = D(kC[m], cw, 0, 0, 1);
  }
  return j;
}

ForcingValues forcing_from_jet(const ExactJet& j, double nu, double epsilon) {
  const Eigen::Vector2d& u = j.value.u;
  const SymTensor& C = j.value.C;
  const double trc = C.trace();
  const Eigen::Vector2d grad_tr = j.grad_C[0] + j.grad_C[2];
  // div((trC) C)_a = sum_b d_b(trC) C_ab + trC d_b C_ab
  const Eigen::Matrix2d Cm = C.matrix();
  Eigen::Vector2d div_stress = Cm * grad_tr;
  div_stress.x() += trc * (j.grad_C[0].x() + j.grad_C[1].y());
  div_stress.y() += trc * (j.grad_C[1].x() + j.grad_C[2].y());

  ForcingValues out;
  out.f = j.u_t + j.grad_u * u - nu * j.lap_u + j.grad_p - div_stress;
  const Eigen::Matrix2d stretch = j.grad_u * Cm + Cm * j.grad_u.transpose();
  for (int m = 0; m < 3; ++m) {
    const int a = m == 2 ? 1 : 0, b = m == 0 ? 0 : 1;
    const double id = (a == b) ? 1.0 : 0.0;
    out.F[m] = j.C_t[m] + u.dot(j.grad_C[m]) - epsilon * j.lap_C[m] - stretch(a, b) - trc * id +
               trc * trc * C[m];
  }
  return out;
}

ForcingValues eval_forcing(const MmsCase& mc, const Point& x, double t, double nu, double epsilon) {
  if (mc.id == CaseId::example2) return {example2_force(x), SymTensor{}};
  return forcing_from_jet(eval_jet(mc, x, t), nu, epsilon);
}

Forcing make_forcing(const MmsCase& mc) {
  Forcing f;
  if (mc.id == CaseId::example2) {
    f.f = [](const Point& x, double) { return example2_force(x); };
    return f;
  }
  f.f = [mc](const Point& x, double t) { return eval_forcing(mc, x, t, mc.nu, mc.epsilon).f; };
  f.F = [mc](const Point& x, double t) { return eval_forcing(mc, x, t, mc.nu, mc.epsilon).F; };
  f.joint = [mc](const Point& x, double t) {
    const ForcingValues v = eval_forcing(mc, x, t, mc.nu, mc.epsilon);
    return std::make_pair(v.f, v.F);
  };
  return f;
}

VectorField initial_velocity(const MmsCase& mc) {
  return [mc](const Point& x) { return eval_exact(mc, x, 0.0).u; };
}

TensorField initial_conformation(const MmsCase& mc) {
  return [mc](const Point& x) { return eval_exact(mc, x, 0.0).C; };
}

ExactJet finite_difference_jet(const MmsCase& mc, const Point& x, double t, double step) {
  const double h = step;
  const Point ex(h, 0.0), ey(0.0, h);
  const double inv = 1.0 / (2.0 * h);
  ExactJet j;
  j.value = eval_exact(mc, x, t);
  const ExactValues xp = eval_exact(mc, x + ex, t), xm = eval_exact(mc, x - ex, t);
  const ExactValues yp = eval_exact(mc, x + ey, t), ym = eval_exact(mc, x - ey, t);
  const ExactValues tp = eval_exact(mc, x, t + h), tm = eval_exact(mc, x, t - h);
  j.grad_u.col(0) = (xp.u - xm.u) * inv;
  j.grad_u.col(1) = (yp.u - ym.u) * inv;
  j.u_t = (tp.u - tm.u) * inv;
  j.grad_p = {(xp.p - xm.p) * inv, (yp.p - ym.p) * inv};
  for (int m = 0; m < 3; ++m) {
    j.grad_C[m] = {(xp.C[m] - xm.C[m]) * inv, (yp.C[m] - ym.C[m]) * inv};
    j.C_t[m] = (tp.C[m] - tm.C[m]) * inv;
  }
  const ExactJet jxp = eval_jet(mc, x + ex, t), jxm = eval_jet(mc, x - ex, t);
  const ExactJet jyp = eval_jet(mc, x + ey, t), jym = eval_jet(mc, x - ey, t);
  for (int a = 0; a < 2; ++a) {
    j.hess_u[a] = {(jxp.grad_u(a, 0) - jxm.grad_u(a, 0)) * inv,
                   0.5 * ((jxp.grad_u(a, 1) - jxm.grad_u(a, 1)) + (jyp.grad_u(a, 0) - jym.grad_u(a, 0))) * inv,
                   (jyp.grad_u(a, 1) - jym.grad_u(a, 1)) * inv};
    j.lap_u(a) = j.hess_u[a](0) + j.hess_u[a](2);
  }
  for (int m = 0; m < 3; ++m) {
    j.hess_C[m] = {(jxp.grad_C[m].x() - jxm.grad_C[m].x()) * inv,
                   0.5 * ((jxp.grad_C[m].y() - jxm.grad_C[m].y()) + (jyp.grad_C[m].x() - jym.grad_C[m].x())) * inv,
                   (jyp.grad_C[m].y() - jym.grad_C[m].y()) * inv};
    j.lap_C[m] = j.hess_C[m](0) + j.hess_C[m](2);
  }
  return j;
}

ErrorNorms error_norms(const Discretization& disc, const State& state, const MmsCase& mc, double t,
                       int quadrature_exactness) {
  if (!mc.has_exact_solution()) throw ArgumentError("error norms need a case with an exact solution");
  const int q = quadrature_exactness > 0 ? quadrature_exactness : 2 * disc.degree() + 6;
  const QuadratureRule rule = triangle_rule(q);
  const Eigen::VectorXd& x = state.coeffs;

  struct CellSample {
    std::vector<Point> pts;
    Eigen::VectorXd w;
    PointTables tab;
    std::vector<ExactJet> jet;
  };
  auto sample = [&](int c) {
    CellSample s;
    const CellGeometry& g = disc.cell(c).geometry;
    s.w.resize(Index(rule.points.size()));
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      s.pts.push_back(g.map(rule.points[i]));
      s.w(Index(i)) = rule.weights[i] * 2.0 * g.area;
    }
    s.tab = tabulate_at(disc, c, s.pts);
    for (const Point& p : s.pts) s.jet.push_back(eval_jet(mc, p, t));
    return s;
  };

  // Pressure means first.
  double area = 0.0, p_int = 0.0, ph_int = 0.0;
  std::vector<CellSample> samples;
  samples.reserve(disc.num_cells());
  for (int c = 0; c < disc.num_cells(); ++c) {
    samples.push_back(sample(c));
    const CellSample& s = samples.back();
    const Eigen::VectorXd ph = s.tab.pressure * disc.cell_coeffs_p(x, c);
    for (Index i = 0; i < s.w.size(); ++i) {
      p_int += s.w(i) * s.jet[i].value.p;
      ph_int += s.w(i) * ph(i);
    }
    area += disc.cell(c).geometry.area;
  }
  const double p_mean = p_int / area, ph_mean = ph_int / area;

  ErrorNorms e;
  double c_h1 = 0.0;
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellSample& s = samples[c];
    std::array<Eigen::VectorXd, 2> uv, ugx, ugy;
    std::array<Eigen::VectorXd, 3> cv, cgx, cgy;
    for (int a = 0; a < 2; ++a) {
      const Eigen::VectorXd co = disc.cell_coeffs_u(x, c, a);
      uv[a] = s.tab.values * co;
      ugx[a] = s.tab.grad_x * co;
      ugy[a] = s.tab.grad_y * co;
    }
    for (int m = 0; m < 3; ++m) {
      const Eigen::VectorXd co = disc.cell_coeffs_C(x, c, m);
      cv[m] = s.tab.values * co;
      cgx[m] = s.tab.grad_x * co;
      cgy[m] = s.tab.grad_y * co;
    }
    const Eigen::VectorXd ph = s.tab.pressure * disc.cell_coeffs_p(x, c);
    for (Index i = 0; i < s.w.size(); ++i) {
      const ExactJet& j = s.jet[i];
      const double w = s.w(i);
      for (int a = 0; a < 2; ++a) {
        e.u_l2 += w * std::pow(j.value.u(a) - uv[a](i), 2);
        e.u_h1 += w * (std::pow(j.grad_u(a, 0) - ugx[a](i), 2) + std::pow(j.grad_u(a, 1) - ugy[a](i), 2));
      }
      e.p_l2 += w * std::pow((j.value.p - p_mean) - (ph(i) - ph_mean), 2);
      for (int m = 0; m < 3; ++m) {
        e.c_l2 += w * kSymWeight[m] * std::pow(j.value.C[m] - cv[m](i), 2);
        c_h1 += w * kSymWeight[m] *
                (std::pow(j.grad_C[m].x() - cgx[m](i), 2) + std::pow(j.grad_C[m].y() - cgy[m](i), 2));
      }
    }
  }
  e.u_l2 = std::sqrt(e.u_l2);
  e.u_h1 = std::sqrt(e.u_h1);
  e.p_l2 = std::sqrt(e.p_l2);
  e.c_l2 = std::sqrt(e.c_l2);
  e.c_h1_eps = std::sqrt(mc.epsilon * c_h1);
  return e;
}

State project_exact(const Discretization& disc, const MmsCase& mc, double t) {
  State s = project_initial(
      disc, [&](const Point& x) { return eval_exact(mc, x, t).u; },
      [&](const Point& x) { return eval_exact(mc, x, t).C; }, t);
  const DofLayout& L = disc.layout();
  const Eigen::MatrixXd& pb = disc.pressure_values();
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& ct = disc.cell(c);
    const Eigen::MatrixXd mass = pb.transpose() * ct.weights.asDiagonal() * pb;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L.pressure_dim());
    for (std::size_t q = 0; q < ct.points.size(); ++q)
      rhs += ct.weights(Index(q)) * eval_exact(mc, ct.points[q], t).p * pb.row(Index(q)).transpose();
    s.coeffs.segment(L.p(c, 0), L.pressure_dim()) = mass.ldlt().solve(rhs);
  }
  return s;
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& steps) {
  if (errors.size() != steps.size()) throw ArgumentError("eoc: errors and steps differ in length");
  std::vector<double> rates(errors.size(), kUndefinedRate);
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i - 1] > 0.0) || !(errors[i] > 0.0) || !(steps[i - 1] > 0.0) || !(steps[i] > 0.0) ||
        steps[i - 1] == steps[i])
      continue;
    rates[i] = std::log(errors[i - 1] / errors[i]) / std::log(steps[i - 1] / steps[i]);
  }
  return rates;
}

std::array<double, 5> as_array(const ErrorNorms& e) { return {e.u_l2, e.u_h1, e.p_l2, e.c_l2, e.c_h1_eps}; }

void ConvergenceReport::compute_rates() {
  std::vector<double> s;
  for (const ConvergenceRow& r : rows) s.push_back(r.step);
  for (int col = 0; col < 5; ++col) {
    std::vector<double> errs;
    for (const ConvergenceRow& r : rows) errs.push_back(as_array(r.errors)[col]);
    const std::vector<double> rt = eoc(errs, s);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rates[col] = rt[i];
  }
}

namespace {

// Velocity traces seen by cell c on local edge e at the facet quadrature points.
Eigen::VectorXd trace_difference_sq(const Discretization& disc, const Eigen::VectorXd& x, int c, int e) {
  const EdgeTables& et = disc.cell(c).edges[e];
  Eigen::VectorXd d = Eigen::VectorXd::Zero(et.weights.size());
  for (int a = 0; a < 2; ++a) {
    const Eigen::VectorXd diff =
        et.values * disc.cell_coeffs_u(x, c, a) - disc.facet_values() * disc.facet_coeffs_uhat(x, et.facet, a);
    d += diff.cwiseAbs2();
  }
  return d;
}

double gradient_sq(const Discretization& disc, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    for (int a = 0; a < 2; ++a) {
      const Eigen::VectorXd co = disc.cell_coeffs_u(x, c, a);
      s += t.weights.dot((t.grad_x * co).cwiseAbs2() + (t.grad_y * co).cwiseAbs2());
    }
  }
  return s;
}

}  // namespace

double triple_norm_v_sq(const Discretization& disc, const Eigen::VectorXd& x, double alpha) {
  double s = gradient_sq(disc, x);
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    for (int e = 0; e < 3; ++e)
      s += alpha / t.geometry.diameter * t.edges[e].weights.dot(trace_difference_sq(disc, x, c, e));
  }
  return s;
}

double triple_norm_0v_sq(const Discretization& disc, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    for (int a = 0; a < 2; ++a) s += t.weights.dot((disc.cell_values() * disc.cell_coeffs_u(x, c, a)).cwiseAbs2());
    for (int e = 0; e < 3; ++e)
      s += t.geometry.diameter * t.edges[e].weights.dot(trace_difference_sq(disc, x, c, e));
  }
  return s;
}

double broken_norm_1_sq(const Discretization& disc, const Eigen::VectorXd& x, double alpha) {
  double s = gradient_sq(disc, x);
  for (int f = 0; f < static_cast<int>(disc.mesh().num_facets()); ++f) {
    const Facet& facet = disc.mesh().facet(f);
    if (facet.is_boundary()) {
      const int c = facet.owners[0].cell;
      const EdgeTables& et = disc.cell(c).edges[facet.owners[0].local_edge];
      double v = 0.0;
      for (int a = 0; a < 2; ++a)
        v += et.weights.dot((et.values * disc.cell_coeffs_u(x, c, a)).cwiseAbs2());
      s += alpha / disc.cell(c).geometry.diameter * v;
      continue;
    }
    const int cp = facet.owners[0].cell, cm = facet.owners[1].cell;
    const EdgeTables& ep = disc.cell(cp).edges[facet.owners[0].local_edge];
    const EdgeTables& em = disc.cell(cm).edges[facet.owners[1].local_edge];
    double jump = 0.0;
    for (int a = 0; a < 2; ++a) {
      const Eigen::VectorXd d = ep.values * disc.cell_coeffs_u(x, cp, a) - em.values * disc.cell_coeffs_u(x, cm, a);
      jump += ep.weights.dot(d.cwiseAbs2());
    }
    // each side sees |v± - {v}| = |jump| / 2
    s += 0.25 * jump * (alpha / disc.cell(cp).geometry.diameter + alpha / disc.cell(cm).geometry.diameter);
  }
  return s;
}

void set_average_traces(const Discretization& disc, Eigen::VectorXd& x) {
  const DofLayout& L = disc.layout();
  const Eigen::MatrixXd& psi = disc.facet_values();
  const Eigen::VectorXd& fw = Eigen::Map<const Eigen::VectorXd>(disc.facet_rule().weights.data(),
                                                               Index(disc.facet_rule().weights.size()));
  const Eigen::MatrixXd mass = psi.transpose() * fw.asDiagonal() * psi;
  const Eigen::LDLT<Eigen::MatrixXd> mass_inv(mass);
  for (int f = 0; f < static_cast<int>(disc.mesh().num_facets()); ++f) {
    const Facet& facet = disc.mesh().facet(f);
    if (facet.is_boundary()) continue;  // constrained to zero
    for (int a = 0; a < 2; ++a) {
      Eigen::VectorXd avg = Eigen::VectorXd::Zero(psi.rows());
      for (int o = 0; o < 2; ++o) {
        const EdgeTables& et = disc.cell(facet.owners[o].cell).edges[facet.owners[o].local_edge];
        avg += 0.5 * (et.values * disc.cell_coeffs_u(x, facet.owners[o].cell, a));
      }
      const Eigen::VectorXd co = mass_inv.solve(psi.transpose() * fw.asDiagonal() * avg);
      for (int i = 0; i < L.facet_dim(); ++i) x(L.uhat(f, a, i)) = co(i);
    }
  }
}

}  // namespace phdg
