#include <algorithm>
#include <cmath>
#include <tuple>

#include "doctest.h"
#include "phdg/mesh.hpp"

using namespace phdg;

TEST_CASE("structured mesh counts") {
  const Mesh m1(1, 1);
  CHECK(m1.num_cells() == 2);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_facets() == 5);
  CHECK(m1.num_interior_facets() == 1);

  const Mesh m2(2, 2);
  CHECK(m2.num_cells() == 8);
  CHECK(m2.num_vertices() == 9);
  CHECK(m2.num_facets() == 16);
  CHECK(m2.num_interior_facets() == 8);

  const Mesh m32(32, 32);
  CHECK(m32.num_cells() == 2048);
  CHECK(m32.mesh_size() == doctest::Approx(std::sqrt(2.0) / 32).epsilon(1e-14));
}

TEST_CASE("bad subdivision counts are rejected") {
  CHECK_THROWS_AS(Mesh(0, 1), ArgumentError);
  CHECK_THROWS_AS(Mesh(2, -1), ArgumentError);
  CHECK_THROWS_AS(build_structured_mesh(1, 1, Rectangle{0, 0, 0, 1}), ArgumentError);
}

TEST_CASE("default diagonal runs lower-left to upper-right") {
  const Mesh m(1, 1);
  CHECK(m.diagonal() == Diagonal::rising);
  int found = 0;
  for (const Facet& f : m.facets()) {
    if (f.is_boundary()) continue;
    const Point a = m.vertices()[f.vertices[0]], b = m.vertices()[f.vertices[1]];
    found += std::abs((a - b).x() - (a - b).y()) < 1e-14 ? 1 : 0;  // slope +1
  }
  CHECK(found == 1);
  const Mesh f(1, 1, Rectangle::unit(), Diagonal::falling);
  for (const Facet& fa : f.facets())
    if (!fa.is_boundary()) {
      const Point d = f.vertices()[fa.vertices[0]] - f.vertices()[fa.vertices[1]];
      CHECK(d.x() == doctest::Approx(-d.y()));
    }
}

TEST_CASE("mesh invariants") {
  for (Diagonal dg : {Diagonal::rising, Diagonal::falling}) {
    for (auto [nx, ny, r] : {std::tuple{1, 1, Rectangle::unit()}, std::tuple{3, 2, Rectangle{-1, 0.5, 2, 1.5}},
                             std::tuple{8, 8, Rectangle::unit()}}) {
      const Mesh m(nx, ny, r, dg);
      const double area = r.width() * r.height();
      const long V = long(m.num_vertices()), F = long(m.num_facets()), T = long(m.num_cells());
      CHECK(V - F + T == 1);

      double area_sum = 0.0, hmin = 1e300, hmax = 0.0;
      for (int c = 0; c < int(T); ++c) {
        const CellGeometry g = m.geometry(c);
        CHECK(g.area > 0.0);
        CHECK(g.jacobian.determinant() > 0.0);  // counter-clockwise
        area_sum += g.area;
        hmin = std::min(hmin, g.diameter);
        hmax = std::max(hmax, g.diameter);
        Point closed = Point::Zero();
        for (int e = 0; e < 3; ++e) {
          const Facet& f = m.facet(m.cell_facets(c)[e].facet);
          closed += f.length * m.outward_normal(c, e);
        }
        CHECK(closed.norm() < 1e-13);
        for (int v = 0; v < 3; ++v) {
          const Point ref = v == 0 ? Point(0, 0) : v == 1 ? Point(1, 0) : Point(0, 1);
          CHECK((g.map(ref) - m.vertex(c, v)).norm() < 1e-14);
        }
      }
      CHECK(area_sum == doctest::Approx(area).epsilon(1e-12));
      CHECK(hmax / hmin == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(m.mesh_size() == doctest::Approx(hmax));

      double boundary = 0.0;
      for (int fi = 0; fi < int(F); ++fi) {
        const Facet& f = m.facet(fi);
        CHECK(std::abs(f.normal.norm() - 1.0) < 1e-14);
        CHECK(f.owner_count == (f.is_boundary() ? 1 : 2));
        const FacetOwner& plus = f.owners[0];
        CHECK((m.outward_normal(plus.cell, plus.local_edge) - f.normal).norm() < 1e-14);
        if (f.is_boundary()) {
          boundary += f.length;
          CHECK(m.interior_index(fi) == -1);
        } else {
          const FacetOwner& minus = f.owners[1];
          CHECK((m.outward_normal(minus.cell, minus.local_edge) + f.normal).norm() < 1e-14);
          CHECK(m.cell_facets(plus.cell)[plus.local_edge].sign == 1);
          CHECK(m.cell_facets(minus.cell)[minus.local_edge].sign == -1);
        }
      }
      CHECK(boundary == doctest::Approx(2 * (r.width() + r.height())).epsilon(1e-12));
    }
  }
}

TEST_CASE("cell geometry examples") {
  const Mesh m1(1, 1);
  const CellGeometry g = cell_geometry(m1, 0);
  CHECK(g.area == doctest::Approx(0.5));
  CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)));
  const Mesh m2(2, 2);
  for (int c = 0; c < 8; ++c) CHECK(m2.geometry(c).area == doctest::Approx(0.125));
  const CellGeometry g2 = m2.geometry(3);
  const Point x(0.3, 0.2);
  CHECK((g2.pull_back(g2.map(x)) - x).norm() < 1e-14);
}
