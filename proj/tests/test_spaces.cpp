#include <cmath>
#include <set>

#include "doctest.h"
#include "phdg/discretization.hpp"
#include "phdg/spaces.hpp"

using namespace phdg;

TEST_CASE("layout sizes on one square") {
  const Mesh m(1, 1);
  const DofLayout L = build_layout(m, 1);
  CHECK(L.u_size() == 12);
  CHECK(L.p_size() == 2);
  CHECK(L.C_size() == 18);
  CHECK(L.uhat_size() == 4);
  CHECK(L.phat_size() == 10);
  CHECK(L.Chat_size() == 30);
  CHECK(L.total() == 77);
  CHECK(L.multiplier() == 76);
}

TEST_CASE("layout is a bijection onto the unknowns") {
  for (int k : {1, 2}) {
    const Mesh m(3, 2);
    const DofLayout L(m, k);
    std::set<Index> seen;
    auto add = [&](Index i) {
      CHECK(i >= 0);
      CHECK(i < L.total());
      CHECK(seen.insert(i).second);
    };
    for (int c = 0; c < int(m.num_cells()); ++c) {
      for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i < L.cell_dim(); ++i) add(L.u(c, comp, i));
      for (int i = 0; i < L.pressure_dim(); ++i) add(L.p(c, i));
      for (int s = 0; s < 3; ++s)
        for (int i = 0; i < L.cell_dim(); ++i) add(L.C(c, s, i));
    }
    for (int f = 0; f < int(m.num_facets()); ++f) {
      for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i < L.facet_dim(); ++i) {
          if (m.facet(f).is_boundary()) {
            CHECK(L.uhat(f, comp, i) == -1);
            CHECK(L.is_constrained_uhat(f));
          } else {
            add(L.uhat(f, comp, i));
          }
        }
      for (int i = 0; i < L.facet_dim(); ++i) add(L.phat(f, i));
      for (int s = 0; s < 3; ++s)
        for (int i = 0; i < L.facet_dim(); ++i) add(L.Chat(f, s, i));
    }
    add(L.multiplier());
    CHECK(Index(seen.size()) == L.total());
  }
}

TEST_CASE("velocity block on a 32x32 mesh") {
  const DofLayout L(Mesh(32, 32), 1);
  CHECK(L.u_size() == 12288);
  CHECK(L.C_size() == 18432);
  CHECK(L.p_size() == 2048);
}

TEST_CASE("projection reproduces constants and affine fields") {
  const Discretization disc(Mesh(4, 4), 1);
  const DofLayout& L = disc.layout();
  const double s = std::sqrt(2.0) / 2.0;
  const VectorField u0 = [](const Point& x) { return Eigen::Vector2d(1.0 + 2.0 * x.x() - x.y(), 3.0 * x.x() + x.y()); };
  const TensorField C0 = [s](const Point&) { return SymTensor::identity(s); };
  const State st = project_initial(disc, u0, C0, 0.25);
  CHECK(st.time == 0.25);
  double err_u = 0.0, err_c = 0.0;
  for (int c = 0; c < disc.num_cells(); ++c)
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d v = u0(disc.mesh().vertex(c, i));
      err_u = std::max({err_u, std::abs(st.coeffs(L.u(c, 0, i)) - v.x()), std::abs(st.coeffs(L.u(c, 1, i)) - v.y())});
      err_c = std::max({err_c, std::abs(st.coeffs(L.C(c, 0, i)) - s), std::abs(st.coeffs(L.C(c, 1, i))),
                        std::abs(st.coeffs(L.C(c, 2, i)) - s)});
    }
  CHECK(err_u < 1e-13);
  CHECK(err_c < 1e-14);
  CHECK(st.coeffs.segment(L.uhat_offset(), L.total() - L.uhat_offset()).norm() == 0.0);
  CHECK(st.coeffs.segment(L.p_offset(), L.p_size()).norm() == 0.0);
}

TEST_CASE("symmetric storage round trip") {
  Eigen::Matrix2d a;
  a << 1.5, -0.25, -0.25, 3.0;
  const SymTensor t = SymTensor::from_matrix(a);
  CHECK(t.matrix() == a);
  CHECK(t[0] == 1.5);
  CHECK(t[1] == -0.25);
  CHECK(t[2] == 3.0);
  CHECK(t.trace() == doctest::Approx(4.5));
  CHECK(t.det() == doctest::Approx(a.determinant()));
  // Frobenius product in stored components.
  const SymTensor b{0.5, 2.0, -1.0};
  double frob = 0.0;
  for (int m = 0; m < 3; ++m) frob += kSymWeight[m] * t[m] * b[m];
  CHECK(frob == doctest::Approx((a.array() * b.matrix().array()).sum()));
}
