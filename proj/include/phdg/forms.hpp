#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phdg/discretization.hpp"
#include "phdg/spaces.hpp"

namespace phdg {

struct ModelParams {
  double nu = 1.0;       // kinematic viscosity
  double epsilon = 1.0;  // conformation diffusion, may be exactly 0
  double alpha = 8.0;    // velocity penalty
  double beta = 10.0;    // conformation penalty
  double tau = 1.0;      // time step

  /// Throws ArgumentError naming the offending field.
  void validate() const;
};

/// Numbering of the unknowns touched by one cell: the cell fields followed by
/// the trace fields of its three local edges.
///   cell:  u(comp, i) | p(i) | C(m, i)
///   edge e: uhat(comp, i) | phat(i) | Chat(m, i)
struct LocalLayout {
  int nk = 0, np = 0, nf = 0;

  explicit LocalLayout(const DofLayout& L) : nk(L.cell_dim()), np(L.pressure_dim()), nf(L.facet_dim()) {}

  int u(int comp, int i) const { return comp * nk + i; }
  int p(int i) const { return 2 * nk + i; }
  int C(int m, int i) const { return 2 * nk + np + m * nk + i; }
  int cell_size() const { return 5 * nk + np; }
  int edge_size() const { return 6 * nf; }
  int uhat(int e, int comp, int i) const { return cell_size() + e * edge_size() + comp * nf + i; }
  int phat(int e, int i) const { return cell_size() + e * edge_size() + 2 * nf + i; }
  int Chat(int e, int m, int i) const { return cell_size() + e * edge_size() + 3 * nf + m * nf + i; }
  int size() const { return cell_size() + 3 * edge_size(); }
};

/// Global index of every local unknown of cell c (-1 for constrained traces).
std::vector<Index> cell_dofs(const Discretization& disc, int c);

/// Dense contribution with row/column maps into the cell-local numbering.
/// Contributions are additive.
struct LocalBlock {
  Eigen::MatrixXd mat;
  std::vector<int> rows;
  std::vector<int> cols;

  /// Bilinear form value y^T mat x for full cell-local vectors.
  double apply(const Eigen::VectorXd& test, const Eigen::VectorXd& trial) const;
  /// Accumulate into a dense cell-local matrix.
  void add_to(Eigen::MatrixXd& local, bool transposed = false) const;
};

/// Advecting velocity evaluated at the quadrature points of one cell and of
/// its three edges, from the cell's own coefficients.
struct AdvectionField {
  Eigen::MatrixXd cell;                 // (nq x 2)
  std::array<Eigen::MatrixXd, 3> edge;  // (nqf x 2)
};

AdvectionField advection_field(const Discretization& disc, int c, const Eigen::VectorXd& state);

/// Conformation tensor at quadrature points of one cell and its edges.
struct TensorSamples {
  std::vector<SymTensor> cell;
  std::array<std::vector<SymTensor>, 3> edge;
};

TensorSamples tensor_samples(const Discretization& disc, int c, const Eigen::VectorXd& state);

enum class TransportedField { velocity, conformation };

// Kernels. All return blocks in cell-local numbering (see LocalLayout).

LocalBlock local_mass(const Discretization& disc, int c, double scale, TransportedField field);
LocalBlock local_viscous(const Discretization& disc, int c, const ModelParams& params);
/// b_h with rows (p, phat) and columns (u, uhat); the momentum equation uses
/// its transpose.
LocalBlock local_pressure(const Discretization& disc, int c);
LocalBlock local_conformation_diffusion(const Discretization& disc, int c, const ModelParams& params);
LocalBlock local_convection(const Discretization& disc, int c, const AdvectionField& w,
                            TransportedField field);
/// Rows (u, uhat), columns (C11, C22) of the unknown trace trC^{n+1}.
LocalBlock local_elastic_coupling_momentum(const Discretization& disc, int c,
                                           const TensorSamples& c_prev);

struct ConformationCoupling {
  LocalBlock velocity_gradient;  // rows C, cols u: -((grad u) C + C (grad u)^T) : D
  LocalBlock trace_squared;      // rows C, cols C: (trC^n)^2 C : D
};
ConformationCoupling local_elastic_coupling_conformation(const Discretization& disc, int c,
                                                         const TensorSamples& c_prev);

struct Forcing {
  std::function<Eigen::Vector2d(const Point&, double)> f;
  /// Extra body force of the conformation equation; absent means zero.
  std::function<SymTensor(const Point&, double)> F;
  /// Optional joint evaluation of (f, F); when set it replaces f and F.
  std::function<std::pair<Eigen::Vector2d, SymTensor>(const Point&, double)> joint;
};

/// Right-hand side in cell-local numbering: tau^{-1} M u^n + f^{n+1},
/// tau^{-1} M C^n + trC^n I + F^{n+1}.
Eigen::VectorXd local_rhs(const Discretization& disc, int c, const Eigen::VectorXd& state_n,
                          double t_next, const ModelParams& params, const Forcing& forcing);

/// Scalar HDG building blocks over [cell basis | edge0 | edge1 | edge2]
/// scalar numbering; exposed for tests.
Eigen::MatrixXd scalar_interior_penalty(const Discretization& disc, int c, double coeff, double penalty);
Eigen::MatrixXd scalar_convection(const Discretization& disc, int c, const AdvectionField& w);

}  // namespace phdg
