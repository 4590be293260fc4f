#include "phdg/discretization.hpp"

namespace phdg {

namespace {

void physical_gradients(const Tabulation& ref, const Eigen::Matrix2d& inv_t, Eigen::MatrixXd& gx,
                        Eigen::MatrixXd& gy) {
  // grad_phys = J^{-T} grad_ref
  gx = inv_t(0, 0) * ref.grad_x + inv_t(0, 1) * ref.grad_y;
  gy = inv_t(1, 0) * ref.grad_x + inv_t(1, 1) * ref.grad_y;
}

}  // namespace

Discretization::Discretization(Mesh mesh, int k, QuadratureDegrees degrees)
    : mesh_(std::move(mesh)),
      k_(k),
      layout_(mesh_, k),
      cell_basis_(k),
      pressure_basis_(k - 1),
      facet_basis_(k),
      cell_rule_(triangle_rule(degrees.cell >= 0 ? degrees.cell : 4 * k)),
      facet_rule_(segment_rule(degrees.facet >= 0 ? degrees.facet : 3 * k + 1)) {
  if (k < 1 || k > 2) {
    throw UnsupportedDegree("polynomial degree k must be 1 or 2");
  }
  cell_tab_ = cell_basis_.tabulate(cell_rule_.points);
  pressure_tab_ = pressure_basis_.tabulate(cell_rule_.points);
  std::vector<double> s(facet_rule_.size());
  for (std::size_t q = 0; q < s.size(); ++q) s[q] = facet_rule_.points[q].x();
  facet_tab_ = facet_basis_.tabulate(s);

  const int nq = static_cast<int>(cell_rule_.size());
  const int nqf = static_cast<int>(facet_rule_.size());
  cells_.resize(mesh_.num_cells());
  for (int c = 0; c < num_cells(); ++c) {
    CellTables& t = cells_[c];
    t.geometry = mesh_.geometry(c);
    const double det = 2.0 * t.geometry.area;
    t.weights.resize(nq);
    for (int q = 0; q < nq; ++q) {
      t.points.push_back(t.geometry.map(cell_rule_.points[q]));
      t.weights(q) = cell_rule_.weights[q] * det;
    }
    physical_gradients(cell_tab_, t.geometry.inverse_transpose, t.grad_x, t.grad_y);

    for (int e = 0; e < 3; ++e) {
      const CellFacet& cf = mesh_.cell_facets(c)[e];
      const Facet& f = mesh_.facet(cf.facet);
      EdgeTables& et = t.edges[e];
      et.facet = cf.facet;
      et.sign = cf.sign;
      et.normal = mesh_.outward_normal(c, e);
      const Point a = mesh_.vertices()[f.vertices[0]];
      const Point b = mesh_.vertices()[f.vertices[1]];
      et.weights.resize(nqf);
      std::vector<Point> ref(nqf);
      for (int q = 0; q < nqf; ++q) {
        const Point x = a + s[q] * (b - a);
        et.points.push_back(x);
        et.weights(q) = facet_rule_.weights[q] * f.length;
        ref[q] = t.geometry.pull_back(x);
      }
      const Tabulation tab = cell_basis_.tabulate(ref);
      et.values = tab.values;
      physical_gradients(tab, t.geometry.inverse_transpose, et.grad_x, et.grad_y);
      et.pressure = pressure_basis_.tabulate(ref).values;
    }
  }
}

Eigen::VectorXd Discretization::cell_coeffs_u(const Eigen::VectorXd& x, int c, int comp) const {
  return x.segment(layout_.u(c, comp, 0), layout_.cell_dim());
}

Eigen::VectorXd Discretization::cell_coeffs_C(const Eigen::VectorXd& x, int c, int m) const {
  return x.segment(layout_.C(c, m, 0), layout_.cell_dim());
}

Eigen::VectorXd Discretization::cell_coeffs_p(const Eigen::VectorXd& x, int c) const {
  return x.segment(layout_.p(c, 0), layout_.pressure_dim());
}

Eigen::VectorXd Discretization::facet_coeffs_uhat(const Eigen::VectorXd& x, int f, int comp) const {
  const Index i0 = layout_.uhat(f, comp, 0);
  if (i0 < 0) return Eigen::VectorXd::Zero(layout_.facet_dim());
  return x.segment(i0, layout_.facet_dim());
}

Eigen::VectorXd Discretization::facet_coeffs_Chat(const Eigen::VectorXd& x, int f, int m) const {
  return x.segment(layout_.Chat(f, m, 0), layout_.facet_dim());
}

Eigen::VectorXd Discretization::facet_coeffs_phat(const Eigen::VectorXd& x, int f) const {
  return x.segment(layout_.phat(f, 0), layout_.facet_dim());
}

PointTables tabulate_at(const Discretization& disc, int c, const std::vector<Point>& physical) {
  const CellGeometry& g = disc.cell(c).geometry;
  std::vector<Point> ref;
  ref.reserve(physical.size());
  for (const Point& x : physical) ref.push_back(g.pull_back(x));
  const Tabulation tab = disc.cell_basis().tabulate(ref);
  PointTables out;
  out.values = tab.values;
  physical_gradients(tab, g.inverse_transpose, out.grad_x, out.grad_y);
  out.pressure = disc.pressure_basis().tabulate(ref).values;
  return out;
}

}  // namespace phdg
