#pragma once

#include <memory>
#include <vector>

#include "pcond/geometry.hpp"
#include "pcond/trace.hpp"

namespace pcond {

/// Restoring coefficient of the oscillator w'' + V(w, w') w = 0:
/// V = ((2p-3) w'^2 + (p-1) w^2) / ((p-1) w'^2 + w^2).
/// The phase point (0, 0) is excluded (config error).
double v_coefficient(double p, double w, double dw);

/// One full period of the oscillator, resampled on a uniform grid.
/// The phase angle atan2(w', w) decreases strictly, so the period is detected
/// as the first oriented return to the starting ray through (a0, b0).
struct WolffSolution {
  double p = 2.0;
  double a0 = 1.0, b0 = 0.0;  // initial state (w, w') at s = 0
  double lambda_p = 0.0;      // period
  double c_emp = 0.0;         // min over the period of w^2 + w'^2
  double C_emp = 0.0;         // max over the period of w^2 + w'^2
  std::vector<double> w;      // samples at s = lambda_p * i / n, i = 0..n-1
  std::vector<double> dw;     // d/ds samples on the same grid

  int sample_count() const { return static_cast<int>(w.size()); }

  /// Periodic cubic interpolation of w at arbitrary s.
  double value(double s) const;
  /// Periodic cubic interpolation of w' at arbitrary s.
  double derivative(double s) const;
};

/// Adaptive high-order integration from (a0, b0) until the phase has wound by
/// exactly -2*pi; the result is resampled to `samples` uniform points.
/// c_emp / C_emp come from the critical points of w^2 + w'^2 (zeros of w and
/// w'), located by bisection during the sweep, so they do not depend on the
/// resampling density.
WolffSolution integrate_wolff(double p, double a0 = 1.0, double b0 = 0.0,
                              double step_tolerance = 1e-12, int samples = 2048);

/// Exponentially growing oscillatory field
///   u(x) = exp(tau (x.rho - t) + log_scale) * w(tau x.rho_perp),
/// the probe attached to the half-space { x . rho <= t }.
struct WolffField {
  std::shared_ptr<const WolffSolution> solution;
  Vec2 rho{1.0, 0.0};       // unit direction of growth
  Vec2 rho_perp{0.0, 1.0};  // rho rotated +90 degrees
  double t = 0.0;           // half-space offset
  double tau = 1.0;         // frequency, > 0
  double log_scale = 0.0;   // extra log-amplitude carried symbolically
};

WolffField make_wolff_field(std::shared_ptr<const WolffSolution> solution, Vec2 rho, double tau,
                            double t, double log_scale = 0.0);

struct FieldValue {
  double u = 0.0;
  Vec2 grad{0.0, 0.0};
};

/// Value and gradient at a point. The raw exponent is capped at 300: beyond
/// that the caller must work with boundary_trace's log_scale instead.
FieldValue field_value(const WolffField& field, const Vec2& x);

/// Sup-normalized trace of the field on the mesh boundary. The normalized
/// values do not depend on the offset t at all (t only shifts log_scale by
/// -tau*t), which downstream caches exploit: sweeping t costs one solve.
BoundaryTrace boundary_trace(const WolffField& field, const TriMesh& mesh);

/// Strictly increasing probe frequencies for a direction: `count` values
/// evenly spaced from 4/extent to min(24/extent, cap_fraction/h_max). The
/// mesh cap keeps tau * h_max <= cap_fraction so the oscillation stays
/// resolvable; the extent cap keeps the probe's exponential window above the
/// measurement noise floor along long extents. A mesh too coarse to fit the
/// lower end under the cap is a config error.
std::vector<double> probe_frequencies(const TriMesh& mesh, const Vec2& rho, int count = 6,
                                      double cap_fraction = 0.5);

}  // namespace pcond
