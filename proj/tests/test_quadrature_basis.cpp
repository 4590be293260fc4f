#include <cmath>
#include <vector>

#include "doctest.h"
#include "phdg/basis.hpp"
#include "phdg/quadrature.hpp"

using namespace phdg;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double integrate(const QuadratureRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q].x(), a) * std::pow(r.points[q].y(), b);
  return s;
}

}  // namespace

TEST_CASE("triangle rules integrate monomials exactly") {
  for (int n : {0, 1, 2, 4, 5, 8, 12}) {
    const QuadratureRule r = triangle_rule(n);
    CHECK(r.exactness >= n);
    double wsum = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
    for (const Point& p : r.points) {
      CHECK(p.x() >= 0.0);
      CHECK(p.y() >= 0.0);
      CHECK(p.x() + p.y() <= 1.0 + 1e-15);
    }
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) {
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        CHECK(integrate(r, a, b) == doctest::Approx(exact).epsilon(1e-13));
      }
  }
}

TEST_CASE("segment rules integrate monomials exactly") {
  for (int n : {0, 1, 3, 4, 7}) {
    const QuadratureRule r = segment_rule(n);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= n; ++a) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q].x(), a);
      CHECK(s == doctest::Approx(1.0 / (a + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("unsupported quadrature degrees are rejected") {
  CHECK_THROWS_AS(triangle_rule(-1), UnsupportedDegree);
  CHECK_THROWS_AS(triangle_rule(kMaxQuadratureExactness + 1), UnsupportedDegree);
  CHECK_THROWS_AS(segment_rule(-1), UnsupportedDegree);
  CHECK_THROWS_AS(CellBasis(3), UnsupportedDegree);
  CHECK_THROWS_AS(FacetBasis(-1), UnsupportedDegree);
}

TEST_CASE("cell basis is nodal and a partition of unity") {
  for (int k : {0, 1, 2}) {
    const CellBasis b(k);
    CHECK(b.dim() == (k + 1) * (k + 2) / 2);
    const Tabulation t = b.tabulate(b.nodes());
    CHECK((t.values - Eigen::MatrixXd::Identity(b.dim(), b.dim())).norm() < 1e-14);
    const QuadratureRule r = triangle_rule(4);
    const Tabulation s = b.tabulate(r.points);
    for (Eigen::Index q = 0; q < s.values.rows(); ++q) {
      CHECK(s.values.row(q).sum() == doctest::Approx(1.0));
      CHECK(std::abs(s.grad_x.row(q).sum()) < 1e-13);
      CHECK(std::abs(s.grad_y.row(q).sum()) < 1e-13);
    }
  }
}

TEST_CASE("cell basis gradients match finite differences") {
  const CellBasis b(2);
  const Point x(0.21, 0.33);
  const double d = 1e-6;
  std::vector<Point> pts{x, x + Point(d, 0), x - Point(d, 0), x + Point(0, d), x - Point(0, d)};
  const Tabulation t = b.tabulate(pts);
  for (int i = 0; i < b.dim(); ++i) {
    CHECK(t.grad_x(0, i) == doctest::Approx((t.values(1, i) - t.values(2, i)) / (2 * d)).epsilon(1e-7));
    CHECK(t.grad_y(0, i) == doctest::Approx((t.values(3, i) - t.values(4, i)) / (2 * d)).epsilon(1e-7));
  }
  const Tabulation e = eval_cell_basis(2, pts);
  CHECK((e.values - t.values).norm() == 0.0);
}

TEST_CASE("facet basis is nodal") {
  for (int k : {0, 1, 2}) {
    const FacetBasis b(k);
    std::vector<double> nodes;
    for (int i = 0; i <= k; ++i) nodes.push_back(k == 0 ? 0.5 : double(i) / k);
    const Eigen::MatrixXd v = b.tabulate(nodes);
    CHECK((v - Eigen::MatrixXd::Identity(k + 1, k + 1)).norm() < 1e-14);
    const std::vector<double> any{0.1, 0.77};
    const Eigen::MatrixXd w = b.tabulate(any);
    for (Eigen::Index q = 0; q < w.rows(); ++q) CHECK(w.row(q).sum() == doctest::Approx(1.0));
  }
}
