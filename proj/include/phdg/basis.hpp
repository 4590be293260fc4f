#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phdg/mesh.hpp"
#include "phdg/quadrature.hpp"

namespace phdg {

/// Values and reference gradients of every basis function at a set of points.
/// values(q, i); grad_x(q, i) and grad_y(q, i) are the two reference
/// derivative components.
struct Tabulation {
  Eigen::MatrixXd values;
  Eigen::MatrixXd grad_x;
  Eigen::MatrixXd grad_y;
};

/// Nodal Lagrange basis of P_k on the reference triangle, k in {0, 1, 2}.
/// k = 0 is the constant function (pressure for k = 1 velocity). Nodes are
/// the vertices followed, for k = 2, by the midpoints of edges 0, 1, 2
/// (edge e opposite vertex e).
class CellBasis {
 public:
  explicit CellBasis(int degree);

  int degree() const { return degree_; }
  int dim() const { return (degree_ + 1) * (degree_ + 2) / 2; }
  const std::vector<Point>& nodes() const { return nodes_; }

  void eval(const Point& xi, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> dx,
            Eigen::Ref<Eigen::VectorXd> dy) const;
  Tabulation tabulate(std::span<const Point> points) const;

 private:
  int degree_;
  std::vector<Point> nodes_;
};

/// Nodal Lagrange basis of P_k on the reference segment [0,1] with
/// equispaced nodes, k in {0, 1, 2}.
class FacetBasis {
 public:
  explicit FacetBasis(int degree);

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }

  void eval(double s, Eigen::Ref<Eigen::VectorXd> values) const;
  Eigen::MatrixXd tabulate(std::span<const double> points) const;

 private:
  int degree_;
};

/// Tabulate the degree-k cell basis at reference points; k in {1, 2}.
Tabulation eval_cell_basis(int k, std::span<const Point> points);

}  // namespace phdg
