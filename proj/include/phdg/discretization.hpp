#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "phdg/basis.hpp"
#include "phdg/mesh.hpp"
#include "phdg/quadrature.hpp"
#include "phdg/spaces.hpp"

namespace phdg {

/// Quadrature and basis data of one local edge of a cell, at the facet's own
/// quadrature points (ordered along the facet's stored vertex order, so both
/// owners see the same points).
struct EdgeTables {
  int facet = -1;
  int sign = 0;
  Point normal = Point::Zero();  // outward for this cell
  std::vector<Point> points;
  Eigen::VectorXd weights;  // include the facet length
  Eigen::MatrixXd values;   // cell basis, (nq x nk)
  Eigen::MatrixXd grad_x;   // physical gradients
  Eigen::MatrixXd grad_y;
  Eigen::MatrixXd pressure;  // pressure basis values (nq x np)
};

struct CellTables {
  CellGeometry geometry;
  std::vector<Point> points;
  Eigen::VectorXd weights;  // include |det J|
  Eigen::MatrixXd grad_x;   // physical gradients (nq x nk)
  Eigen::MatrixXd grad_y;
  std::array<EdgeTables, 3> edges;
};

struct QuadratureDegrees {
  int cell = -1;   // default 4k (the (trC)^2 C : D integrand)
  int facet = -1;  // default 3k+1
};

/// Mesh, DOF layout, bases and precomputed quadrature tables shared by every
/// time step. Immutable after construction.
class Discretization {
 public:
  Discretization(Mesh mesh, int k, QuadratureDegrees degrees = {});

  const Mesh& mesh() const { return mesh_; }
  const DofLayout& layout() const { return layout_; }
  int degree() const { return k_; }
  int num_cells() const { return static_cast<int>(mesh_.num_cells()); }

  const CellBasis& cell_basis() const { return cell_basis_; }
  const CellBasis& pressure_basis() const { return pressure_basis_; }
  const FacetBasis& facet_basis() const { return facet_basis_; }
  const QuadratureRule& cell_rule() const { return cell_rule_; }
  const QuadratureRule& facet_rule() const { return facet_rule_; }

  /// Cell basis values at the cell quadrature points (same on every cell).
  const Eigen::MatrixXd& cell_values() const { return cell_tab_.values; }
  const Eigen::MatrixXd& pressure_values() const { return pressure_tab_.values; }
  /// Facet basis values at facet quadrature points (nq x nf).
  const Eigen::MatrixXd& facet_values() const { return facet_tab_; }

  const CellTables& cell(int c) const { return cells_[c]; }

  /// Coefficient slices of one cell.
  Eigen::VectorXd cell_coeffs_u(const Eigen::VectorXd& x, int c, int comp) const;
  Eigen::VectorXd cell_coeffs_C(const Eigen::VectorXd& x, int c, int m) const;
  Eigen::VectorXd cell_coeffs_p(const Eigen::VectorXd& x, int c) const;
  /// Zero for constrained (boundary) velocity traces.
  Eigen::VectorXd facet_coeffs_uhat(const Eigen::VectorXd& x, int f, int comp) const;
  Eigen::VectorXd facet_coeffs_Chat(const Eigen::VectorXd& x, int f, int m) const;
  Eigen::VectorXd facet_coeffs_phat(const Eigen::VectorXd& x, int f) const;

 private:
  Mesh mesh_;
  int k_;
  DofLayout layout_;
  CellBasis cell_basis_, pressure_basis_;
  FacetBasis facet_basis_;
  QuadratureRule cell_rule_, facet_rule_;
  Tabulation cell_tab_, pressure_tab_;
  Eigen::MatrixXd facet_tab_;
  std::vector<CellTables> cells_;
};

/// Tabulate cell basis, physical gradients and pressure basis of cell c at
/// arbitrary physical points inside (or on the boundary of) the cell.
struct PointTables {
  Eigen::MatrixXd values, grad_x, grad_y, pressure;
};
PointTables tabulate_at(const Discretization& disc, int c, const std::vector<Point>& physical);

}  // namespace phdg
