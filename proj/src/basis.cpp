#include "phdg/basis.hpp"

#include <string>

namespace phdg {

CellBasis::CellBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > 2) {
    throw UnsupportedDegree("cell basis degree " + std::to_string(degree) + " not in {0,1,2}");
  }
  switch (degree) {
    case 0:
      nodes_ = {Point(1.0 / 3.0, 1.0 / 3.0)};
      break;
    case 1:
      nodes_ = {Point(0, 0), Point(1, 0), Point(0, 1)};
      break;
    default:
      nodes_ = {Point(0, 0),   Point(1, 0),     Point(0, 1),
                Point(0.5, 0.5), Point(0, 0.5), Point(0.5, 0)};
      break;
  }
}

void CellBasis::eval(const Point& xi, Eigen::Ref<Eigen::VectorXd> v, Eigen::Ref<Eigen::VectorXd> dx,
                     Eigen::Ref<Eigen::VectorXd> dy) const {
  const double x = xi.x(), y = xi.y();
  const double l0 = 1.0 - x - y, l1 = x, l2 = y;
  switch (degree_) {
    case 0:
      v(0) = 1.0;
      dx(0) = 0.0;
      dy(0) = 0.0;
      return;
    case 1:
      v << l0, l1, l2;
      dx << -1.0, 1.0, 0.0;
      dy << -1.0, 0.0, 1.0;
      return;
    default:
      // Barycentric gradients: l0 = (-1,-1), l1 = (1,0), l2 = (0,1).
      v << l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l1 * l2, 4 * l2 * l0,
          4 * l0 * l1;
      dx << -(4 * l0 - 1), 4 * l1 - 1, 0.0, 4 * l2, -4 * l2, 4 * (l0 - l1);
      dy << -(4 * l0 - 1), 0.0, 4 * l2 - 1, 4 * l1, 4 * (l0 - l2), -4 * l1;
      return;
  }
}

Tabulation CellBasis::tabulate(std::span<const Point> points) const {
  const int n = static_cast<int>(points.size());
  Tabulation t{Eigen::MatrixXd(n, dim()), Eigen::MatrixXd(n, dim()), Eigen::MatrixXd(n, dim())};
  Eigen::VectorXd v(dim()), gx(dim()), gy(dim());
  for (int q = 0; q < n; ++q) {
    eval(points[q], v, gx, gy);
    t.values.row(q) = v.transpose();
    t.grad_x.row(q) = gx.transpose();
    t.grad_y.row(q) = gy.transpose();
  }
  return t;
}

FacetBasis::FacetBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > 2) {
    throw UnsupportedDegree("facet basis degree " + std::to_string(degree) + " not in {0,1,2}");
  }
}

void FacetBasis::eval(double s, Eigen::Ref<Eigen::VectorXd> v) const {
  switch (degree_) {
    case 0:
      v(0) = 1.0;
      return;
    case 1:
      v << 1.0 - s, s;
      return;
    default:
      v << 2.0 * (s - 0.5) * (s - 1.0), -4.0 * s * (s - 1.0), 2.0 * s * (s - 0.5);
      return;
  }
}

Eigen::MatrixXd FacetBasis::tabulate(std::span<const double> points) const {
  Eigen::MatrixXd t(points.size(), dim());
  Eigen::VectorXd v(dim());
  for (std::size_t q = 0; q < points.size(); ++q) {
    eval(points[q], v);
    t.row(static_cast<Eigen::Index>(q)) = v.transpose();
  }
  return t;
}

Tabulation eval_cell_basis(int k, std::span<const Point> points) {
  if (k < 1 || k > 2) {
    throw UnsupportedDegree("cell basis degree " + std::to_string(k) + " not in {1,2}");
  }
  return CellBasis(k).tabulate(points);
}

}  // namespace phdg
