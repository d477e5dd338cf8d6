#include "pcond/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "pcond/errors.hpp"

namespace pcond {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

double tri_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

double tri_diameter(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::max({dist(a, b), dist(b, c), dist(c, a)});
}

void finalize_mesh(TriMesh& mesh) {
  mesh.cell_area.resize(mesh.cells.size());
  mesh.cell_centroid.resize(mesh.cells.size());
  mesh.h_max = 0.0;
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    const auto& c = mesh.cells[t];
    const Vec2& a = mesh.vertices[c[0]];
    const Vec2& b = mesh.vertices[c[1]];
    const Vec2& d = mesh.vertices[c[2]];
    double area = tri_signed_area(a, b, d);
    if (!(area > 0.0)) fail_geometry("mesh cell with non-positive area");
    mesh.cell_area[t] = area;
    mesh.cell_centroid[t] = (a + b + d) / 3.0;
    mesh.h_max = std::max(mesh.h_max, tri_diameter(a, b, d));
  }
  mesh.vertex_on_boundary.assign(mesh.vertices.size(), 0);
  for (int v : mesh.boundary_loop) mesh.vertex_on_boundary[v] = 1;

  std::vector<Vec2> loop;
  loop.reserve(mesh.boundary_loop.size());
  for (int v : mesh.boundary_loop) loop.push_back(mesh.vertices[v]);
  mesh.polygon_area = polygon_area(loop);
  mesh.id = next_mesh_id.fetch_add(1);
}

TriMesh build_square_mesh(int n) {
  TriMesh mesh;
  double h = 1.0 / n;
  mesh.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back({i * h, j * h});
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.cells.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  for (int i = 0; i < n; ++i) mesh.boundary_loop.push_back(vid(i, 0));
  for (int j = 0; j < n; ++j) mesh.boundary_loop.push_back(vid(n, j));
  for (int i = n; i > 0; --i) mesh.boundary_loop.push_back(vid(i, n));
  for (int j = n; j > 0; --j) mesh.boundary_loop.push_back(vid(0, j));
  return mesh;
}

// Spiderweb disk mesh: ring j of m carries 6j vertices, giving near-uniform
// cells with constant azimuthal spacing pi*R/(3m) across rings.
TriMesh build_disk_mesh(const Vec2& center, double radius, int resolution) {
  int m = (resolution + 1) / 2;
  TriMesh mesh;
  mesh.vertices.push_back(center);
  std::vector<int> ring_start(m + 1, 0);  // index of first vertex of ring j
  for (int j = 1; j <= m; ++j) {
    ring_start[j] = static_cast<int>(mesh.vertices.size());
    int count = 6 * j;
    double r = radius * j / m;
    for (int i = 0; i < count; ++i) {
      double th = 2.0 * M_PI * i / count;
      mesh.vertices.push_back(center + r * unit_vector(th));
    }
  }
  auto ring_vertex = [&](int j, int i) {
    if (j == 0) return 0;
    int count = 6 * j;
    return ring_start[j] + ((i % count) + count) % count;
  };
  for (int j = 1; j <= m; ++j) {
    for (int s = 0; s < 6; ++s) {
      for (int k = 0; k < j; ++k) {
        int o0 = ring_vertex(j, s * j + k);
        int o1 = ring_vertex(j, s * j + k + 1);
        int i0 = ring_vertex(j - 1, s * (j - 1) + k);
        mesh.cells.push_back({o0, o1, i0});
        if (k + 1 < j) {
          int i1 = ring_vertex(j - 1, s * (j - 1) + k + 1);
          mesh.cells.push_back({o1, i1, i0});
        }
      }
    }
  }
  for (int i = 0; i < 6 * m; ++i) mesh.boundary_loop.push_back(ring_vertex(m, i));
  return mesh;
}

TriMesh build_polygon_mesh(const std::vector<Vec2>& poly, int resolution) {
  int k = (resolution + 1) / 2;  // subdivisions per fan triangle edge
  int ne = static_cast<int>(poly.size());
  Vec2 c{0.0, 0.0};
  for (const auto& v : poly) c += v;
  c = c / ne;

  TriMesh mesh;
  mesh.vertices.push_back(c);
  // ray nodes: (edge e, step a=1..k) from centroid toward poly[e]
  std::vector<std::vector<int>> ray(ne, std::vector<int>(k + 1, 0));
  for (int e = 0; e < ne; ++e) {
    for (int a = 1; a <= k; ++a) {
      ray[e][a] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(c + (static_cast<double>(a) / k) * (poly[e] - c));
    }
  }
  for (int e = 0; e < ne; ++e) {
    int e1 = (e + 1) % ne;
    // local node table for fan (c, poly[e], poly[e1]) in barycentric steps (a, b)
    std::vector<std::vector<int>> node(k + 1, std::vector<int>(k + 1, -1));
    for (int a = 0; a <= k; ++a) {
      for (int b = 0; a + b <= k; ++b) {
        if (a == 0 && b == 0) { node[a][b] = 0; continue; }
        if (b == 0) { node[a][b] = ray[e][a]; continue; }
        if (a == 0) { node[a][b] = ray[e1][b]; continue; }
        node[a][b] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(c + (static_cast<double>(a) / k) * (poly[e] - c) +
                                (static_cast<double>(b) / k) * (poly[e1] - c));
      }
    }
    for (int a = 0; a < k; ++a) {
      for (int b = 0; a + b < k; ++b) {
        mesh.cells.push_back({node[a][b], node[a + 1][b], node[a][b + 1]});
        if (a + b < k - 1)
          mesh.cells.push_back({node[a + 1][b], node[a + 1][b + 1], node[a][b + 1]});
      }
    }
    // outer row runs from poly[e] = node[k][0] toward poly[e1] = node[0][k];
    // the endpoint belongs to the next fan's row
    for (int b = 0; b < k; ++b) mesh.boundary_loop.push_back(node[k - b][b]);
  }
  return mesh;
}

int orientation_strictly_convex_ccw(const std::vector<Vec2>& poly) {
  int n = static_cast<int>(poly.size());
  if (n < 3) return -1;
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, norm(poly[i]));
  double tol = 1e-12 * std::max(1.0, scale * scale);
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2& c = poly[(i + 2) % n];
    if (cross(b - a, c - b) <= tol) return -1;
  }
  return 0;
}

}  // namespace

DomainSpec DomainSpec::unit_square() {
  DomainSpec d;
  d.kind = Kind::unit_square;
  d.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return d;
}

DomainSpec DomainSpec::disk(Vec2 center, double radius) {
  if (!(radius > 0.0)) fail_geometry("disk radius must be positive");
  DomainSpec d;
  d.kind = Kind::disk;
  d.center = center;
  d.radius = radius;
  return d;
}

DomainSpec DomainSpec::convex_polygon(std::vector<Vec2> vertices) {
  if (orientation_strictly_convex_ccw(vertices) != 0)
    fail_geometry("polygon must be strictly convex with CCW vertices");
  DomainSpec d;
  d.kind = Kind::polygon;
  d.vertices = std::move(vertices);
  return d;
}

double DomainSpec::diameter() const {
  switch (kind) {
    case Kind::unit_square: return std::sqrt(2.0);
    case Kind::disk: return 2.0 * radius;
    case Kind::polygon: {
      double d = 0.0;
      for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
          d = std::max(d, dist(vertices[i], vertices[j]));
      return d;
    }
  }
  return 0.0;
}

double DomainSpec::area() const {
  switch (kind) {
    case Kind::unit_square: return 1.0;
    case Kind::disk: return M_PI * radius * radius;
    case Kind::polygon: return polygon_area(vertices);
  }
  return 0.0;
}

std::pair<double, double> TriMesh::extent(const Vec2& rho) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& v : vertices) {
    double s = dot(v, rho);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

TriMesh build_mesh(const DomainSpec& domain, int resolution) {
  if (resolution < 2) fail_geometry("mesh resolution must be at least 2");
  TriMesh mesh;
  switch (domain.kind) {
    case DomainSpec::Kind::unit_square: mesh = build_square_mesh(resolution); break;
    case DomainSpec::Kind::disk: mesh = build_disk_mesh(domain.center, domain.radius, resolution); break;
    case DomainSpec::Kind::polygon: mesh = build_polygon_mesh(domain.vertices, resolution); break;
  }
  finalize_mesh(mesh);
  return mesh;
}

bool shape_contains(const InclusionShape& shape, const Vec2& point) {
  if (const auto* d = std::get_if<DiskShape>(&shape))
    return norm2(point - d->center) < d->radius * d->radius;
  if (const auto* r = std::get_if<RectShape>(&shape))
    return point.x >= r->lo.x && point.x <= r->hi.x && point.y >= r->lo.y && point.y <= r->hi.y;
  const auto& poly = std::get<PolygonShape>(shape).vertices;
  // crossing-number test
  bool inside = false;
  int n = static_cast<int>(poly.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    if ((poly[i].y > point.y) != (poly[j].y > point.y)) {
      double xc = poly[j].x + (poly[i].x - poly[j].x) * (point.y - poly[j].y) / (poly[i].y - poly[j].y);
      if (point.x < xc) inside = !inside;
    }
  }
  return inside;
}

const char* to_string(SignClass s) {
  switch (s) {
    case SignClass::geq1: return "geq1";
    case SignClass::leq1: return "leq1";
    case SignClass::homogeneous: return "homogeneous";
  }
  return "?";
}

ConductivityScene make_scene(std::shared_ptr<const TriMesh> mesh, std::vector<double> sigma, double p) {
  if (!mesh) fail_config("scene requires a mesh");
  if (static_cast<int>(sigma.size()) != mesh->cell_count())
    fail_config("sigma vector length must match the cell count");
  if (!(p > 1.0) || !std::isfinite(p)) fail_config("p must lie in (1, inf)");
  bool above = false, below = false;
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) fail_config("sigma values must be positive and finite");
    if (s > 1.0) above = true;
    if (s < 1.0) below = true;
  }
  if (above && below)
    fail_config("sigma must stay on one side of 1 (mixed contrast is not supported)");
  ConductivityScene scene;
  scene.mesh = std::move(mesh);
  scene.sigma = std::move(sigma);
  scene.p = p;
  scene.sign_class = above ? SignClass::geq1 : (below ? SignClass::leq1 : SignClass::homogeneous);
  return scene;
}

ConductivityScene paint_scene(std::shared_ptr<const TriMesh> mesh, const std::vector<Inclusion>& inclusions,
                              double p) {
  if (!mesh) fail_config("paint_scene requires a mesh");
  bool above = false, below = false;
  for (const auto& inc : inclusions) {
    if (!(inc.sigma > 0.0)) fail_config("inclusion sigma must be positive");
    if (inc.sigma > 1.0) above = true;
    if (inc.sigma < 1.0) below = true;
  }
  if (above && below)
    fail_config("inclusion sigmas must stay on one side of 1 (mixed contrast is not supported)");
  std::vector<double> sigma(mesh->cell_count(), 1.0);
  for (int t = 0; t < mesh->cell_count(); ++t) {
    const Vec2& g = mesh->cell_centroid[t];
    for (const auto& inc : inclusions)
      if (shape_contains(inc.shape, g)) sigma[t] = inc.sigma;
  }
  return make_scene(std::move(mesh), std::move(sigma), p);
}

std::vector<int> discrete_support_set(const ConductivityScene& scene, double threshold) {
  if (threshold < 0.0) fail_config("support threshold must be nonnegative");
  std::vector<int> cells;
  for (int t = 0; t < scene.mesh->cell_count(); ++t)
    if (std::abs(scene.sigma[t] - 1.0) > threshold) cells.push_back(t);
  return cells;
}

std::vector<Vec2> default_directions(int count) {
  if (count < 1) fail_config("direction count must be positive");
  std::vector<Vec2> dirs;
  dirs.reserve(count);
  for (int i = 0; i < count; ++i) dirs.push_back(unit_vector(2.0 * M_PI * i / count));
  return dirs;
}

namespace {

std::vector<Vec2> convex_hull_points(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  int n = static_cast<int>(pts.size());
  if (n <= 2) return pts;
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {  // upper chain
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

HullPolygon convex_hull_of_points(std::vector<Vec2> points, const std::vector<Vec2>& directions) {
  if (points.empty()) fail_geometry("no inclusion: empty point set has no hull");
  HullPolygon hull;
  hull.vertices = convex_hull_points(std::move(points));
  hull.support.reserve(directions.size());
  for (const auto& rho : directions) hull.support.emplace_back(rho, support_value(hull, rho));
  return hull;
}

HullPolygon convex_hull_of_cells(const TriMesh& mesh, const std::vector<int>& cells,
                                 const std::vector<Vec2>& directions) {
  if (cells.empty()) fail_geometry("no inclusion: empty cell set has no hull");
  std::vector<Vec2> pts;
  pts.reserve(cells.size() * 3);
  for (int t : cells) {
    if (t < 0 || t >= mesh.cell_count()) fail_geometry("cell index out of range");
    for (int v : mesh.cells[t]) pts.push_back(mesh.vertices[v]);
  }
  return convex_hull_of_points(std::move(pts), directions);
}

double support_value(const HullPolygon& hull, const Vec2& rho) {
  if (hull.empty()) fail_geometry("support of an empty hull is undefined");
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : hull.vertices) h = std::max(h, dot(v, rho));
  return h;
}

HullPolygon halfspace_intersection(const std::vector<HalfSpace>& halfspaces) {
  if (halfspaces.size() < 3) fail_geometry("half-space intersection needs at least 3 half-spaces");
  double max_t = 1.0;
  std::vector<double> angles;
  angles.reserve(halfspaces.size());
  for (const auto& hs : halfspaces) {
    if (std::abs(norm(hs.rho) - 1.0) > 1e-12) fail_geometry("half-space direction must be unit length");
    angles.push_back(std::atan2(hs.rho.y, hs.rho.x));
    max_t = std::max(max_t, std::abs(hs.t));
  }
  std::sort(angles.begin(), angles.end());
  double gap = 2.0 * M_PI - (angles.back() - angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  if (gap >= M_PI - 1e-12)
    fail_geometry("half-space intersection is unbounded (directions do not span the plane)");

  double box = 4.0 * max_t / std::cos(gap / 2.0) + 1.0;
  std::vector<Vec2> poly = {{-box, -box}, {box, -box}, {box, box}, {-box, box}};
  for (const auto& hs : halfspaces) {
    std::vector<Vec2> clipped;
    int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % n];
      double da = dot(a, hs.rho) - hs.t;
      double db = dot(b, hs.rho) - hs.t;
      if (da <= 0.0) clipped.push_back(a);
      if ((da < 0.0 && db > 0.0) || (da > 0.0 && db <= 0.0)) {
        double s = da / (da - db);
        clipped.push_back(a + s * (b - a));
      }
    }
    poly = std::move(clipped);
    if (poly.empty()) break;
  }
  HullPolygon hull;
  if (!poly.empty() && std::abs(polygon_area(poly)) > 0.0) hull.vertices = convex_hull_points(poly);
  hull.support.reserve(halfspaces.size());
  for (const auto& hs : halfspaces) hull.support.emplace_back(hs.rho, hs.t);
  return hull;
}

double polygon_area(const std::vector<Vec2>& polygon) {
  double a = 0.0;
  int n = static_cast<int>(polygon.size());
  for (int i = 0; i < n; ++i) a += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * a;
}

double distance_to_hull(const Vec2& point, const HullPolygon& hull) {
  if (hull.empty()) fail_geometry("distance to an empty hull is undefined");
  const auto& v = hull.vertices;
  int n = static_cast<int>(v.size());
  if (n == 1) return dist(point, v[0]);
  bool inside = n >= 3;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    Vec2 e = b - a;
    if (n >= 3 && cross(e, point - a) < 0.0) inside = false;
    double len2 = norm2(e);
    double s = len2 > 0.0 ? std::clamp(dot(point - a, e) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, dist(point, a + s * e));
  }
  return inside ? 0.0 : best;
}

double hausdorff_distance(const HullPolygon& a, const HullPolygon& b) {
  if (a.empty() || b.empty()) fail_geometry("Hausdorff distance needs nonempty hulls");
  double d = 0.0;
  for (const auto& v : a.vertices) d = std::max(d, distance_to_hull(v, b));
  for (const auto& v : b.vertices) d = std::max(d, distance_to_hull(v, a));
  return d;
}

}  // namespace pcond
