#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "phdg/mesh.hpp"

namespace phdg {

using Index = Eigen::Index;

/// Symmetric 2x2 tensor stored as its upper triangle.
struct SymTensor {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  static SymTensor from_matrix(const Eigen::Matrix2d& m) { return {m(0, 0), m(0, 1), m(1, 1)}; }
  static SymTensor identity(double s = 1.0) { return {s, 0.0, s}; }
  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << xx, xy, xy, yy;
    return m;
  }
  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * xy; }
  double operator[](int m) const { return m == 0 ? xx : (m == 1 ? xy : yy); }
  double& operator[](int m) { return m == 0 ? xx : (m == 1 ? xy : yy); }
};

/// Frobenius weight of stored component m in A:B (the off-diagonal counts twice).
inline constexpr double kSymWeight[3] = {1.0, 2.0, 1.0};

using VectorField = std::function<Eigen::Vector2d(const Point&)>;
using TensorField = std::function<SymTensor(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

/// Global numbering of the unknowns of one time step:
///   [u | p | C | uhat (interior facets) | phat | Chat | pressure-mean multiplier]
/// Boundary velocity traces are fixed to zero and carry no index (-1).
class DofLayout {
 public:
  DofLayout() = default;
  DofLayout(const Mesh& mesh, int k);

  int degree() const { return k_; }
  int cell_dim() const { return nk_; }
  int pressure_dim() const { return np_; }
  int facet_dim() const { return nf_; }

  Index u(int cell, int comp, int i) const { return u_off_ + (Index(cell) * 2 + comp) * nk_ + i; }
  Index p(int cell, int i) const { return p_off_ + Index(cell) * np_ + i; }
  Index C(int cell, int m, int i) const { return c_off_ + (Index(cell) * 3 + m) * nk_ + i; }
  /// -1 on boundary facets.
  Index uhat(int facet, int comp, int i) const {
    const int fi = interior_[facet];
    return fi < 0 ? -1 : uhat_off_ + (Index(fi) * 2 + comp) * nf_ + i;
  }
  Index phat(int facet, int i) const { return phat_off_ + Index(facet) * nf_ + i; }
  Index Chat(int facet, int m, int i) const { return chat_off_ + (Index(facet) * 3 + m) * nf_ + i; }
  Index multiplier() const { return total_ - 1; }

  Index u_offset() const { return u_off_; }
  Index p_offset() const { return p_off_; }
  Index C_offset() const { return c_off_; }
  Index uhat_offset() const { return uhat_off_; }
  Index phat_offset() const { return phat_off_; }
  Index Chat_offset() const { return chat_off_; }

  Index u_size() const { return p_off_ - u_off_; }
  Index p_size() const { return c_off_ - p_off_; }
  Index C_size() const { return uhat_off_ - c_off_; }
  Index uhat_size() const { return phat_off_ - uhat_off_; }
  Index phat_size() const { return chat_off_ - phat_off_; }
  Index Chat_size() const { return total_ - 1 - chat_off_; }
  Index total() const { return total_; }

  bool is_constrained_uhat(int facet) const { return interior_[facet] < 0; }

 private:
  int k_ = 0, nk_ = 0, np_ = 0, nf_ = 0;
  Index u_off_ = 0, p_off_ = 0, c_off_ = 0, uhat_off_ = 0, phat_off_ = 0, chat_off_ = 0, total_ = 0;
  std::vector<int> interior_;
};

DofLayout build_layout(const Mesh& mesh, int k);

/// All unknowns at one time level.
struct State {
  double time = 0.0;
  Eigen::VectorXd coeffs;

  State() = default;
  State(const DofLayout& layout, double t) : time(t), coeffs(Eigen::VectorXd::Zero(layout.total())) {}
};

class Discretization;

/// Cellwise L2 projection of u0 and C0; all other blocks are zero.
State project_initial(const Discretization& disc, const VectorField& u0, const TensorField& C0,
                      double t0 = 0.0);

}  // namespace phdg
