#include "phdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace phdg {

namespace {

// Local edge e joins local vertices (e+1)%3 and (e+2)%3; traversed in that
// order it follows the counter-clockwise orientation of the cell.
std::pair<int, int> edge_vertices(const std::array<int, 3>& cell, int e) {
  return {cell[(e + 1) % 3], cell[(e + 2) % 3]};
}

}  // namespace

Mesh::Mesh(int nx, int ny, Rectangle bounds, Diagonal diagonal)
    : nx_(nx), ny_(ny), bounds_(bounds), diagonal_(diagonal) {
  if (nx < 1 || ny < 1) {
    throw ArgumentError("structured mesh needs nx, ny >= 1");
  }
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw ArgumentError("structured mesh needs a nondegenerate rectangle");
  }

  const double dx = bounds.width() / nx;
  const double dy = bounds.height() / ny;
  vertices_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Snap the last row/column to the exact bounds.
      const double x = (i == nx) ? bounds.x1 : bounds.x0 + i * dx;
      const double y = (j == ny) ? bounds.y1 : bounds.y0 + j * dy;
      vertices_.emplace_back(x, y);
    }
  }

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  cells_.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (diagonal == Diagonal::rising) {
        cells_.push_back({a, b, c});
        cells_.push_back({a, c, d});
      } else {
        cells_.push_back({a, b, d});
        cells_.push_back({b, c, d});
      }
    }
  }

  std::map<std::pair<int, int>, int> facet_of_edge;
  cell_to_facets_.resize(cells_.size());
  for (int c = 0; c < static_cast<int>(cells_.size()); ++c) {
    for (int e = 0; e < 3; ++e) {
      auto [p, q] = edge_vertices(cells_[c], e);
      const auto key = std::minmax(p, q);
      auto it = facet_of_edge.find(key);
      if (it == facet_of_edge.end()) {
        Facet f;
        f.vertices = {p, q};
        const Point pa = vertices_[p], pb = vertices_[q];
        f.midpoint = 0.5 * (pa + pb);
        const Point d = pb - pa;
        f.length = d.norm();
        f.normal = Point(d.y(), -d.x()) / f.length;
        f.owners[0] = {c, e};
        f.owner_count = 1;
        const int id = static_cast<int>(facets_.size());
        facets_.push_back(f);
        facet_of_edge.emplace(key, id);
        cell_to_facets_[c][e] = {id, e, +1};
      } else {
        Facet& f = facets_[it->second];
        f.owners[1] = {c, e};
        f.owner_count = 2;
        f.kind = FacetKind::interior;
        cell_to_facets_[c][e] = {it->second, e, -1};
      }
    }
  }

  interior_index_.assign(facets_.size(), -1);
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    if (facets_[f].kind == FacetKind::interior) {
      interior_index_[f] = static_cast<int>(num_interior_++);
    }
  }

  for (int c = 0; c < static_cast<int>(cells_.size()); ++c) {
    h_ = std::max(h_, geometry(c).diameter);
  }
}

CellGeometry Mesh::geometry(int c) const {
  const Point p0 = vertex(c, 0), p1 = vertex(c, 1), p2 = vertex(c, 2);
  CellGeometry g;
  g.origin = p0;
  g.jacobian.col(0) = p1 - p0;
  g.jacobian.col(1) = p2 - p0;
  const double det = g.jacobian.determinant();
  g.area = 0.5 * std::abs(det);
  g.inverse_transpose = g.jacobian.inverse().transpose();
  g.diameter = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
  return g;
}

Point Mesh::outward_normal(int c, int e) const {
  const CellFacet& cf = cell_to_facets_[c][e];
  return static_cast<double>(cf.sign) * facets_[cf.facet].normal;
}

Mesh build_structured_mesh(int nx, int ny, Rectangle bounds, Diagonal diagonal) {
  return Mesh(nx, ny, bounds, diagonal);
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) { return mesh.geometry(cell); }

}  // namespace phdg
