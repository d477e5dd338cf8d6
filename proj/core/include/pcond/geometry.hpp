#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "pcond/vec2.hpp"

namespace pcond {

/// Planar domain: unit square, disk, or a strictly convex CCW polygon.
struct DomainSpec {
  enum class Kind { unit_square, disk, polygon };

  Kind kind = Kind::unit_square;
  Vec2 center{0.0, 0.0};   // disk only
  double radius = 1.0;     // disk only
  std::vector<Vec2> vertices;  // polygon only, CCW, strictly convex

  static DomainSpec unit_square();
  static DomainSpec disk(Vec2 center, double radius);
  /// Throws a geometry error unless the vertices form a strictly convex CCW polygon.
  static DomainSpec convex_polygon(std::vector<Vec2> vertices);

  double diameter() const;
  double area() const;
};

/// Conforming triangulation with positive (CCW) cells and an oriented boundary loop.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<double> cell_area;
  std::vector<Vec2> cell_centroid;
  /// Boundary vertex indices in CCW order; the polyline closes implicitly.
  std::vector<int> boundary_loop;
  std::vector<char> vertex_on_boundary;
  double h_max = 0.0;        // max cell diameter
  double polygon_area = 0.0; // shoelace area of the boundary loop
  std::uint64_t id = 0;      // unique identity, used to validate traces against meshes

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int cell_count() const { return static_cast<int>(cells.size()); }
  int boundary_count() const { return static_cast<int>(boundary_loop.size()); }

  /// Support interval [min, max] of the mesh along a unit direction.
  std::pair<double, double> extent(const Vec2& rho) const;
};

/// Structured mesh of the domain. `resolution` counts cells per side (square),
/// cells across the diameter (disk), or subdivisions per polygon edge times two.
TriMesh build_mesh(const DomainSpec& domain, int resolution);

struct DiskShape { Vec2 center; double radius; };
struct RectShape { Vec2 lo; Vec2 hi; };
struct PolygonShape { std::vector<Vec2> vertices; };
using InclusionShape = std::variant<DiskShape, RectShape, PolygonShape>;

bool shape_contains(const InclusionShape& shape, const Vec2& point);

struct Inclusion {
  InclusionShape shape;
  double sigma = 1.0;
};

enum class SignClass { geq1, leq1, homogeneous };

const char* to_string(SignClass s);

/// Piecewise-constant conductivity on a mesh, restricted to one side of 1.
struct ConductivityScene {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<double> sigma;  // per cell, > 0
  double p = 2.0;
  SignClass sign_class = SignClass::homogeneous;
};

/// Validates sigma > 0, p in (1, inf), and a single sign class (all >= 1 or all <= 1).
ConductivityScene make_scene(std::shared_ptr<const TriMesh> mesh, std::vector<double> sigma, double p);

/// Cell-centroid painting of inclusion values over a background of 1.
/// Later inclusions win on overlap. Mixed sign classes are rejected.
ConductivityScene paint_scene(std::shared_ptr<const TriMesh> mesh, const std::vector<Inclusion>& inclusions,
                              double p);

/// Cells where |sigma - 1| exceeds the threshold.
std::vector<int> discrete_support_set(const ConductivityScene& scene, double threshold = 1e-9);

/// Closed half-space { x : x . rho <= t } with |rho| = 1.
struct HalfSpace {
  Vec2 rho;
  double t = 0.0;
};

/// Convex polygon with an optional per-direction support table.
struct HullPolygon {
  std::vector<Vec2> vertices;  // CCW
  std::vector<std::pair<Vec2, double>> support;  // (direction, h) rows for reporting

  bool empty() const { return vertices.empty(); }
};

std::vector<Vec2> default_directions(int count = 32);

/// Convex hull of a point set (geometry error when empty). The support table
/// is filled for `directions`. Degenerate sets come back as their one or two
/// distinct points.
HullPolygon convex_hull_of_points(std::vector<Vec2> points,
                                  const std::vector<Vec2>& directions = default_directions());

/// Convex hull of all vertices of the listed cells. Errors with "no inclusion"
/// if the cell set is empty. The support table is filled for `directions`.
HullPolygon convex_hull_of_cells(const TriMesh& mesh, const std::vector<int>& cells,
                                 const std::vector<Vec2>& directions = default_directions());

/// Max of v . rho over hull vertices.
double support_value(const HullPolygon& hull, const Vec2& rho);

/// Intersection of closed half-spaces. Requires directions that positively span
/// the plane (otherwise the set is unbounded -> geometry error). An empty
/// intersection comes back as an empty polygon, not an error.
HullPolygon halfspace_intersection(const std::vector<HalfSpace>& halfspaces);

double polygon_area(const std::vector<Vec2>& polygon);

/// Distance from a point to a convex polygon (0 inside).
double distance_to_hull(const Vec2& point, const HullPolygon& hull);

/// Hausdorff distance between two nonempty convex polygons.
double hausdorff_distance(const HullPolygon& a, const HullPolygon& b);

}  // namespace pcond
