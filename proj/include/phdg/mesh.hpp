#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace phdg {

using Point = Eigen::Vector2d;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Rectangle {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  static Rectangle unit() { return {}; }
};

enum class FacetKind { interior, boundary };

/// Which diagonal splits each square of a structured mesh.
enum class Diagonal { rising, falling };  // (x0,y0)-(x1,y1) or (x1,y0)-(x0,y1)

struct FacetOwner {
  int cell = -1;
  int local_edge = -1;
};

struct Facet {
  std::array<int, 2> vertices{};
  Point midpoint = Point::Zero();
  // Outward normal of owners[0] (the plus owner).
  Point normal = Point::Zero();
  double length = 0.0;
  FacetKind kind = FacetKind::boundary;
  std::array<FacetOwner, 2> owners{};
  int owner_count = 0;

  bool is_boundary() const { return kind == FacetKind::boundary; }
};

struct CellFacet {
  int facet = -1;
  int local_edge = -1;
  // +1 if the cell is the plus owner of the facet, -1 otherwise.
  int sign = 0;
};

struct CellGeometry {
  double area = 0.0;
  double diameter = 0.0;  // h_K, longest edge
  Point origin = Point::Zero();
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d inverse_transpose = Eigen::Matrix2d::Zero();

  Point map(const Point& reference) const { return origin + jacobian * reference; }
  Point pull_back(const Point& physical) const {
    return inverse_transpose.transpose() * (physical - origin);
  }
};

/// Structured triangulation of an axis-aligned rectangle. Each of the nx*ny
/// squares is split along one diagonal (rising by default). Cells are
/// stored counter-clockwise; local edge e is the edge opposite local vertex e.
class Mesh {
 public:
  Mesh(int nx, int ny, Rectangle bounds = Rectangle::unit(), Diagonal diagonal = Diagonal::rising);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Rectangle& bounds() const { return bounds_; }
  Diagonal diagonal() const { return diagonal_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_facets() const { return facets_.size(); }
  std::size_t num_interior_facets() const { return num_interior_; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  const Facet& facet(int f) const { return facets_[f]; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::array<CellFacet, 3>& cell_facets(int c) const { return cell_to_facets_[c]; }

  /// Index among interior facets, or -1 for a boundary facet.
  int interior_index(int f) const { return interior_index_[f]; }

  Point vertex(int c, int local) const { return vertices_[cells_[c][local]]; }
  CellGeometry geometry(int c) const;
  /// Outward unit normal of cell c on its local edge e.
  Point outward_normal(int c, int e) const;

  double mesh_size() const { return h_; }

 private:
  int nx_, ny_;
  Rectangle bounds_;
  Diagonal diagonal_;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<Facet> facets_;
  std::vector<std::array<CellFacet, 3>> cell_to_facets_;
  std::vector<int> interior_index_;
  std::size_t num_interior_ = 0;
  double h_ = 0.0;
};

Mesh build_structured_mesh(int nx, int ny, Rectangle bounds = Rectangle::unit(),
                           Diagonal diagonal = Diagonal::rising);

CellGeometry cell_geometry(const Mesh& mesh, int cell);

}  // namespace phdg
