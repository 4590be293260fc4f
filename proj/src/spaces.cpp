#include "phdg/spaces.hpp"

#include <stdexcept>

#include "phdg/discretization.hpp"

namespace phdg {

DofLayout::DofLayout(const Mesh& mesh, int k) : k_(k) {
  if (k < 1) throw ArgumentError("polynomial degree k must be >= 1");
  nk_ = (k + 1) * (k + 2) / 2;
  np_ = k * (k + 1) / 2;
  nf_ = k + 1;
  const Index T = static_cast<Index>(mesh.num_cells());
  const Index F = static_cast<Index>(mesh.num_facets());
  const Index FI = static_cast<Index>(mesh.num_interior_facets());
  interior_.resize(mesh.num_facets());
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) interior_[f] = mesh.interior_index(int(f));

  u_off_ = 0;
  p_off_ = u_off_ + 2 * T * nk_;
  c_off_ = p_off_ + T * np_;
  uhat_off_ = c_off_ + 3 * T * nk_;
  phat_off_ = uhat_off_ + 2 * FI * nf_;
  chat_off_ = phat_off_ + F * nf_;
  total_ = chat_off_ + 3 * F * nf_ + 1;
}

DofLayout build_layout(const Mesh& mesh, int k) { return DofLayout(mesh, k); }

State project_initial(const Discretization& disc, const VectorField& u0, const TensorField& C0,
                      double t0) {
  const DofLayout& L = disc.layout();
  State s(L, t0);
  const Eigen::MatrixXd& phi = disc.cell_values();
  const int nk = L.cell_dim();
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellTables& t = disc.cell(c);
    const Eigen::MatrixXd mass = phi.transpose() * t.weights.asDiagonal() * phi;
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    if (llt.info() != Eigen::Success) {
      throw std::logic_error("singular local mass matrix in projection");
    }
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nk, 5);
    for (std::size_t q = 0; q < t.points.size(); ++q) {
      const Eigen::Vector2d u = u0(t.points[q]);
      const SymTensor cq = C0(t.points[q]);
      const double wq = t.weights(Index(q));
      const Eigen::VectorXd wphi = wq * phi.row(Index(q)).transpose();
      rhs.col(0) += u.x() * wphi;
      rhs.col(1) += u.y() * wphi;
      rhs.col(2) += cq.xx * wphi;
      rhs.col(3) += cq.xy * wphi;
      rhs.col(4) += cq.yy * wphi;
    }
    const Eigen::MatrixXd sol = llt.solve(rhs);
    for (int comp = 0; comp < 2; ++comp) s.coeffs.segment(L.u(c, comp, 0), nk) = sol.col(comp);
    for (int m = 0; m < 3; ++m) s.coeffs.segment(L.C(c, m, 0), nk) = sol.col(2 + m);
  }
  return s;
}

}  // namespace phdg
