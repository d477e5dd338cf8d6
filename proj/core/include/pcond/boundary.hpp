#pragma once

#include <memory>
#include <vector>

#include "pcond/dnmap.hpp"
#include "pcond/enclosure.hpp"
#include "pcond/geometry.hpp"
#include "pcond/wolff.hpp"

namespace pcond {

/// Outward direction whose half-space {x . rho <= rho . x0} touches the
/// domain exactly at x0. Defined for points of a disk boundary and for the
/// corners of a convex polygon (the bisector of the adjacent edge normals);
/// edge-interior and off-boundary points have no single supporting point and
/// are rejected.
Vec2 supporting_direction(const DomainSpec& domain, const Vec2& x0);

/// A boundary probe anchored at x0: oscillatory fields attached to the
/// half-space offset t, slightly inset from the supporting offset t0 so the
/// probe mass concentrates at x0.
struct BoundaryQuery {
  Vec2 x0{0.0, 0.0};
  Vec2 rho{1.0, 0.0};  // supporting direction at x0
  double t0 = 0.0;     // rho . x0 == mesh extent along rho
  double t = 0.0;      // probe offset, t0 - inset_fraction * extent width
};

/// Builds the probe for x0, checking that the mesh really attains its
/// extreme point along the supporting direction at x0 (i.e. the mesh
/// resolves x0 as the touching point).
BoundaryQuery make_boundary_query(const TriMesh& mesh, const DomainSpec& domain, const Vec2& x0,
                                  double inset_fraction = 0.05);

struct BoundaryOptions {
  double gamma_low = 0.25;  // initial comparison bracket
  double gamma_high = 4.0;
  double tolerance = 0.01;  // stop when the bracket is this narrow
  int max_widen = 10;       // bracket doublings before giving up
  std::vector<double> tau_override;  // nonempty: use exactly these frequencies
  double slope_threshold = 0.035;
  double compensation = 1.5;
  double noise_floor = 1e-10;
};

/// One classified comparison against the constant-gamma reference.
struct GammaProbe {
  double gamma = 0.0;
  CurveClass verdict = CurveClass::undecided;
  double slope = 0.0;
};

struct BoundaryRecovery {
  Vec2 x0{0.0, 0.0};
  double value = 0.0;        // recovered sigma(x0)
  int iterations = 0;        // classified probes, endpoint checks included
  double bracket_low = 0.0;  // final comparison bracket
  double bracket_high = 0.0;
  bool early_exact = false;  // a probe stopped growing: sigma(x0) == value
  std::vector<GammaProbe> trace;  // every probe in evaluation order
};

/// Recovers sigma at the query point by bisecting on the constant comparison
/// gamma: the indicator against the gamma-reference blows up positively while
/// gamma < sigma(x0) and negatively once gamma > sigma(x0). Endpoints that
/// start on the wrong side are pushed outward (doubling/halving) up to
/// max_widen times; a value outside the widened range is reported as
/// inconclusive. A mid-bracket probe that stops growing ends the search
/// early: the comparison and the boundary value are indistinguishable.
BoundaryRecovery recover_boundary_value(const DnOracle& oracle_sigma,
                                        const std::shared_ptr<const WolffSolution>& wolff,
                                        const BoundaryQuery& query,
                                        const BoundaryOptions& options = {});

}  // namespace pcond
