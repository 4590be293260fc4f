#pragma once

#include <stdexcept>
#include <vector>

#include "phdg/mesh.hpp"

namespace phdg {

class UnsupportedDegree : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Points and weights on a reference element. For triangles the reference
/// cell is (0,0),(1,0),(0,1) and weights sum to 1/2; for segments the points
/// live in [0,1] (stored in x) and weights sum to 1.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exactness = 0;

  std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxQuadratureExactness = 41;

/// Gauss-Legendre rule on [0,1] exact for polynomials of degree `exactness`.
QuadratureRule segment_rule(int exactness);

/// Collapsed (Duffy) Gauss rule on the reference triangle exact for all
/// bivariate polynomials of total degree `exactness`.
QuadratureRule triangle_rule(int exactness);

}  // namespace phdg
