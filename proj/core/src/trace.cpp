#include "pcond/trace.hpp"

#include <cmath>
#include <cstddef>

#include "pcond/errors.hpp"

namespace pcond {

BoundaryTrace make_trace(const TriMesh& mesh, std::vector<double> values) {
  if (mesh.boundary_loop.empty()) fail_geometry("mesh has no boundary loop");
  if (values.size() != mesh.boundary_loop.size())
    fail_config("trace sample count does not match the boundary loop");
  double m = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) fail_config("boundary profile produced a non-finite value");
    m = std::max(m, std::abs(v));
  }
  BoundaryTrace trace;
  trace.mesh_id = mesh.id;
  trace.values = std::move(values);
  if (m > 0.0) {
    for (double& v : trace.values) v /= m;
    trace.log_scale = std::log(m);
  }
  return trace;
}

BoundaryTrace trace_from_function(const TriMesh& mesh, const std::function<double(const Vec2&)>& f) {
  if (mesh.boundary_loop.empty()) fail_geometry("mesh has no boundary loop");
  std::vector<double> values;
  values.reserve(mesh.boundary_loop.size());
  for (int v : mesh.boundary_loop) values.push_back(f(mesh.vertices[v]));
  return make_trace(mesh, std::move(values));
}

}  // namespace pcond
