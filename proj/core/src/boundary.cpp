#include "pcond/boundary.hpp"

#include <cmath>
#include <cstdio>

#include "pcond/errors.hpp"

namespace pcond {

namespace {

std::vector<Vec2> domain_polygon(const DomainSpec& domain) {
  if (domain.kind == DomainSpec::Kind::unit_square)
    return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  return domain.vertices;
}

std::string point_label(const Vec2& x0) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%g, %g)", x0.x, x0.y);
  return buf;
}

}  // namespace

Vec2 supporting_direction(const DomainSpec& domain, const Vec2& x0) {
  if (domain.kind == DomainSpec::Kind::disk) {
    const double d = dist(x0, domain.center);
    if (std::abs(d - domain.radius) > 1e-9 * domain.radius)
      fail_geometry("boundary point " + point_label(x0) + " is not on the domain circle");
    return normalized(x0 - domain.center);
  }

  const std::vector<Vec2> poly = domain_polygon(domain);
  const double tol = 1e-9 * domain.diameter();
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    if (dist(poly[i], x0) > tol) continue;
    const Vec2 before = poly[(i + n - 1) % n];
    const Vec2 after = poly[(i + 1) % n];
    // CCW polygon: the outward normal of an edge e is (e.y, -e.x).
    const Vec2 n_in = normalized(Vec2{poly[i].y - before.y, before.x - poly[i].x});
    const Vec2 n_out = normalized(Vec2{after.y - poly[i].y, poly[i].x - after.x});
    return normalized(n_in + n_out);
  }
  fail_geometry("boundary point " + point_label(x0) +
                " has no unique supporting direction: it must be a disk boundary point or a "
                "corner of the polygon");
}

BoundaryQuery make_boundary_query(const TriMesh& mesh, const DomainSpec& domain, const Vec2& x0,
                                  double inset_fraction) {
  if (!(inset_fraction > 0.0 && inset_fraction < 0.5))
    fail_config("boundary probe inset must lie in (0, 0.5)");

  BoundaryQuery query;
  query.x0 = x0;
  query.rho = supporting_direction(domain, x0);
  query.t0 = dot(query.rho, x0);

  const auto [lo, hi] = mesh.extent(query.rho);
  if (!(hi > lo)) fail_geometry("mesh has no extent along the supporting direction");
  if (std::abs(hi - query.t0) > 1e-9 * domain.diameter())
    fail_config("the mesh does not attain its extreme point at " + point_label(x0) +
                ": refine the mesh or move the query to a mesh vertex");
  query.t = query.t0 - inset_fraction * (hi - lo);
  return query;
}

BoundaryRecovery recover_boundary_value(const DnOracle& oracle_sigma,
                                        const std::shared_ptr<const WolffSolution>& wolff,
                                        const BoundaryQuery& query,
                                        const BoundaryOptions& options) {
  if (!(options.gamma_low > 0.0) || !(options.gamma_high > options.gamma_low))
    fail_config("boundary comparison bracket must satisfy 0 < low < high");
  if (!(options.tolerance > 0.0)) fail_config("boundary tolerance must be positive");
  if (options.max_widen < 0) fail_config("boundary widening budget must be nonnegative");
  if (std::abs(norm(query.rho) - 1.0) > 1e-12)
    fail_config("boundary query direction must be a unit vector");
  if (!(query.t < query.t0)) fail_config("boundary probe offset must sit inside the domain");

  const ConductivityScene& scene = oracle_sigma.scene();
  const TriMesh& mesh = *scene.mesh;
  const std::vector<double> taus =
      options.tau_override.empty() ? probe_frequencies(mesh, query.rho) : options.tau_override;

  BoundaryRecovery recovery;
  recovery.x0 = query.x0;

  auto classify = [&](double gamma) {
    DnOracle reference(
        make_scene(scene.mesh, std::vector<double>(mesh.cells.size(), gamma), scene.p));
    IndicatorCurve curve = indicator_curve(oracle_sigma, reference, wolff, query.rho, query.t,
                                           taus, options.noise_floor);
    const CurveClass verdict =
        classify_curve(curve, options.slope_threshold, options.compensation);
    recovery.trace.push_back({gamma, verdict, curve.fitted_slope});
    recovery.iterations += 1;
    return verdict;
  };

  double lo = options.gamma_low;
  double hi = options.gamma_high;

  // The low endpoint must look too small (positive blowup). Halve it while it
  // does not; a probe that stops growing already names the value.
  CurveClass c_lo = classify(lo);
  for (int w = 0; c_lo == CurveClass::blowup_neg && w < options.max_widen; ++w)
    c_lo = classify(lo *= 0.5);
  if (c_lo == CurveClass::blowup_neg)
    fail_inconclusive("boundary value at " + point_label(query.x0) +
                      " sits below the probe range");
  if (c_lo != CurveClass::blowup_pos) {
    recovery.value = lo;
    recovery.bracket_low = recovery.bracket_high = lo;
    recovery.early_exact = true;
    return recovery;
  }

  CurveClass c_hi = classify(hi);
  for (int w = 0; c_hi == CurveClass::blowup_pos && w < options.max_widen; ++w)
    c_hi = classify(hi *= 2.0);
  if (c_hi == CurveClass::blowup_pos)
    fail_inconclusive("boundary value at " + point_label(query.x0) +
                      " sits above the probe range");
  if (c_hi != CurveClass::blowup_neg) {
    recovery.value = hi;
    recovery.bracket_low = recovery.bracket_high = hi;
    recovery.early_exact = true;
    return recovery;
  }

  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    const CurveClass c = classify(mid);
    if (c == CurveClass::blowup_pos) {
      lo = mid;
    } else if (c == CurveClass::blowup_neg) {
      hi = mid;
    } else {
      recovery.value = mid;
      recovery.bracket_low = lo;
      recovery.bracket_high = hi;
      recovery.early_exact = true;
      return recovery;
    }
  }

  recovery.value = 0.5 * (lo + hi);
  recovery.bracket_low = lo;
  recovery.bracket_high = hi;
  return recovery;
}

}  // namespace pcond
