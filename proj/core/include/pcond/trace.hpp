#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pcond/geometry.hpp"

namespace pcond {

/// Dirichlet data sampled at the boundary-loop vertices of one mesh,
/// sup-normalized so that max |values| = 1. The true amplitude is
/// exp(log_scale); downstream pairings restore it through p-homogeneity,
/// which keeps tau sweeps far away from floating-point overflow.
struct BoundaryTrace {
  std::uint64_t mesh_id = 0;
  std::vector<double> values;  // one per boundary_loop vertex, in loop order
  double log_scale = 0.0;

  int size() const { return static_cast<int>(values.size()); }
};

/// Wrap raw per-loop-vertex samples into a sup-normalized trace.
/// An identically zero profile stays all-zero with log_scale = 0.
BoundaryTrace make_trace(const TriMesh& mesh, std::vector<double> values);

/// Sample an arbitrary boundary profile at the loop vertices and sup-normalize.
BoundaryTrace trace_from_function(const TriMesh& mesh, const std::function<double(const Vec2&)>& f);

}  // namespace pcond
