#include "pcond/wolff.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "pcond/errors.hpp"

namespace pcond {

namespace {

using State = std::array<double, 2>;

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kOverflowCap = 300.0;

/// Catmull-Rom on a uniform periodic grid; reproduces samples at grid points.
double periodic_cubic(const std::vector<double>& a, double period, double s) {
  const int n = static_cast<int>(a.size());
  double phase = s / period;
  phase -= std::floor(phase);
  double u = phase * n;
  if (u >= n) u = 0.0;
  int i1 = static_cast<int>(u);
  if (i1 >= n) i1 = n - 1;
  const double f = u - i1;
  const double a0 = a[(i1 + n - 1) % n];
  const double a1 = a[i1];
  const double a2 = a[(i1 + 1) % n];
  const double a3 = a[(i1 + 2) % n];
  return a1 + 0.5 * f * (a2 - a0 +
                         f * (2.0 * a0 - 5.0 * a1 + 4.0 * a2 - a3 + f * (3.0 * (a1 - a2) + a3 - a0)));
}

}  // namespace

double v_coefficient(double p, double w, double dw) {
  if (w == 0.0 && dw == 0.0) fail_config("phase state (0, 0) is excluded");
  const double denom = (p - 1.0) * dw * dw + w * w;
  return ((2.0 * p - 3.0) * dw * dw + (p - 1.0) * w * w) / denom;
}

WolffSolution integrate_wolff(double p, double a0, double b0, double step_tolerance, int samples) {
  if (!(p > 1.0) || !std::isfinite(p)) fail_config("p must lie in (1, inf)");
  if (a0 == 0.0 && b0 == 0.0) fail_config("initial state (0, 0) is excluded");
  if (!(step_tolerance > 0.0)) fail_config("step tolerance must be positive");
  if (samples < 512) fail_config("need at least 512 samples per period");

  namespace ode = boost::numeric::odeint;
  auto rhs = [p](const State& x, State& dxdt, double) {
    dxdt[0] = x[1];
    dxdt[1] = -v_coefficient(p, x[0], x[1]) * x[0];
  };

  // The phase atan2(w', w) decreases at a rate between min(1, p-1) and
  // max(1, p-1), which bounds the period and lets us keep every phase
  // increment below pi/4 so that unwrapping is unambiguous.
  const double rate_max = std::max(1.0, p - 1.0);
  const double rate_min = std::min(1.0, p - 1.0);
  const double dt_sub = 0.25 * M_PI / rate_max;
  const double horizon = 100.0 * kTwoPi / rate_min;

  const State x0{a0, b0};
  auto stepper =
      ode::make_dense_output(step_tolerance, step_tolerance, ode::runge_kutta_dopri5<State>());
  stepper.initialize(x0, 0.0, std::min(0.01, dt_sub));

  const double theta0 = std::atan2(b0, a0);
  const double target = theta0 - kTwoPi;

  double r2_min = a0 * a0 + b0 * b0;
  double r2_max = r2_min;
  auto feed_r2 = [&](const State& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    r2_min = std::min(r2_min, r2);
    r2_max = std::max(r2_max, r2);
  };

  // Refine a sign change of component `comp` inside [ta, tb] of the current
  // step and record w^2 + w'^2 there (the extrema sit exactly on these zeros).
  auto refine_crossing = [&](int comp, double ta, double tb) {
    State xa, xm;
    stepper.calc_state(ta, xa);
    for (int it = 0; it < 90 && tb - ta > 1e-16 * (1.0 + tb); ++it) {
      const double tm = 0.5 * (ta + tb);
      stepper.calc_state(tm, xm);
      if ((xa[comp] > 0.0) == (xm[comp] > 0.0)) {
        ta = tm;
        xa = xm;
      } else {
        tb = tm;
      }
    }
    feed_r2(xa);
  };

  double period = -1.0;
  double prev_time = 0.0;
  State prev_state = x0;
  double prev_raw = theta0;
  double theta = theta0;

  while (period < 0.0) {
    if (stepper.current_time() > horizon) fail_solver("period detection failed");
    stepper.do_step(rhs);
    if (stepper.current_time_step() < 1e-14) fail_solver("step tolerance not reachable");
    const double t0 = stepper.previous_time();
    const double t1 = stepper.current_time();
    const int nsub = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt_sub)));
    for (int k = 1; k <= nsub && period < 0.0; ++k) {
      const double tk = t0 + (t1 - t0) * k / nsub;
      State xk;
      stepper.calc_state(tk, xk);
      if (!std::isfinite(xk[0]) || !std::isfinite(xk[1])) fail_solver("NaN encountered");
      for (int comp = 0; comp < 2; ++comp)
        if (prev_state[comp] * xk[comp] < 0.0) refine_crossing(comp, prev_time, tk);
      feed_r2(xk);

      const double raw = std::atan2(xk[1], xk[0]);
      const double delta = std::remainder(raw - prev_raw, kTwoPi);
      const double theta_new = theta + delta;
      if (theta_new <= target) {
        // Bisect the oriented return inside [prev_time, tk].
        double ta = prev_time, tb = tk;
        double theta_a = theta, raw_a = prev_raw;
        for (int it = 0; it < 200 && tb - ta > 1e-15 * tb; ++it) {
          const double tm = 0.5 * (ta + tb);
          State xm;
          stepper.calc_state(tm, xm);
          const double raw_m = std::atan2(xm[1], xm[0]);
          const double theta_m = theta_a + std::remainder(raw_m - raw_a, kTwoPi);
          if (theta_m <= target) {
            tb = tm;
          } else {
            ta = tm;
            theta_a = theta_m;
            raw_a = raw_m;
          }
        }
        period = 0.5 * (ta + tb);
        State xp;
        stepper.calc_state(period, xp);
        const double mismatch = std::abs(xp[0] - a0) + std::abs(xp[1] - b0);
        if (mismatch > std::max(1e-8, 1e4 * step_tolerance) * (1.0 + std::hypot(a0, b0)))
          fail_solver("period return mismatch exceeds tolerance");
      } else {
        theta = theta_new;
        prev_raw = raw;
        prev_time = tk;
        prev_state = xk;
      }
    }
  }

  // Second sweep: resample the period on a uniform grid.
  WolffSolution sol;
  sol.p = p;
  sol.a0 = a0;
  sol.b0 = b0;
  sol.lambda_p = period;
  sol.c_emp = r2_min;
  sol.C_emp = r2_max;
  sol.w.resize(samples);
  sol.dw.resize(samples);
  sol.w[0] = a0;
  sol.dw[0] = b0;
  auto resampler =
      ode::make_dense_output(step_tolerance, step_tolerance, ode::runge_kutta_dopri5<State>());
  resampler.initialize(x0, 0.0, std::min(0.01, dt_sub));
  for (int i = 1; i < samples; ++i) {
    const double ti = period * i / samples;
    while (resampler.current_time() < ti) {
      resampler.do_step(rhs);
      if (resampler.current_time_step() < 1e-14) fail_solver("step tolerance not reachable");
    }
    State xi;
    resampler.calc_state(ti, xi);
    if (!std::isfinite(xi[0]) || !std::isfinite(xi[1])) fail_solver("NaN encountered");
    sol.w[i] = xi[0];
    sol.dw[i] = xi[1];
  }

  if (!(sol.c_emp > 0.0) || !(sol.c_emp <= sol.C_emp))
    fail_solver("phase radius bounds violated");
  double mean = 0.0, amp = 0.0;
  for (double v : sol.w) {
    mean += v;
    amp = std::max(amp, std::abs(v));
  }
  mean /= samples;
  if (std::abs(mean) > 1e-8 * amp) fail_solver("profile mean deviates from zero");
  return sol;
}

double WolffSolution::value(double s) const { return periodic_cubic(w, lambda_p, s); }

double WolffSolution::derivative(double s) const { return periodic_cubic(dw, lambda_p, s); }

WolffField make_wolff_field(std::shared_ptr<const WolffSolution> solution, Vec2 rho, double tau,
                            double t, double log_scale) {
  if (!solution) fail_config("field requires a profile solution");
  if (std::abs(norm(rho) - 1.0) > 1e-12) fail_config("rho must be a unit vector");
  if (!(tau > 0.0)) fail_config("tau must be positive");
  WolffField f;
  f.solution = std::move(solution);
  f.rho = rho;
  f.rho_perp = perp(rho);
  f.t = t;
  f.tau = tau;
  f.log_scale = log_scale;
  return f;
}

FieldValue field_value(const WolffField& field, const Vec2& x) {
  const double e = field.tau * (dot(x, field.rho) - field.t) + field.log_scale;
  if (e > kOverflowCap)
    fail_solver("field exponent exceeds the overflow cap; renormalize through boundary_trace's log_scale");
  const double s = field.tau * dot(x, field.rho_perp);
  const double w = field.solution->value(s);
  const double dw = field.solution->derivative(s);
  const double amp = std::exp(e);
  FieldValue out;
  out.u = amp * w;
  out.grad = field.tau * amp * (w * field.rho + dw * field.rho_perp);
  return out;
}

BoundaryTrace boundary_trace(const WolffField& field, const TriMesh& mesh) {
  const auto& loop = mesh.boundary_loop;
  if (loop.empty()) fail_geometry("mesh has no boundary loop");
  const int n = static_cast<int>(loop.size());

  // Assemble from t-independent pieces so that the normalized values are
  // bitwise identical for every offset t; only log_scale moves with t.
  std::vector<double> raw(n);
  double s_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) s_max = std::max(s_max, dot(mesh.vertices[loop[i]], field.rho));
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& xv = mesh.vertices[loop[i]];
    const double wv = field.solution->value(field.tau * dot(xv, field.rho_perp));
    raw[i] = std::exp(field.tau * (dot(xv, field.rho) - s_max)) * wv;
    m = std::max(m, std::abs(raw[i]));
  }
  if (!(m > 0.0)) fail_solver("boundary trace vanished identically");

  BoundaryTrace trace;
  trace.mesh_id = mesh.id;
  trace.values.resize(n);
  for (int i = 0; i < n; ++i) trace.values[i] = raw[i] / m;
  trace.log_scale = field.tau * (s_max - field.t) + std::log(m) + field.log_scale;
  return trace;
}

std::vector<double> probe_frequencies(const TriMesh& mesh, const Vec2& rho, int count,
                                      double cap_fraction) {
  if (count < 2) fail_config("probe_frequencies needs at least 2 values");
  if (!(cap_fraction > 0.0)) fail_config("probe_frequencies cap must be positive");
  const auto [lo, hi] = mesh.extent(rho);
  const double range = hi - lo;
  if (!(range > 0.0)) fail_geometry("degenerate extent along the probe direction");
  const double tau_lo = 4.0 / range;
  const double tau_hi = std::min(24.0 / range, cap_fraction / mesh.h_max);
  if (!(tau_hi > tau_lo))
    fail_config("mesh too coarse to resolve the probe frequencies in this direction");
  std::vector<double> taus(count);
  for (int i = 0; i < count; ++i)
    taus[i] = tau_lo + (tau_hi - tau_lo) * static_cast<double>(i) / (count - 1);
  return taus;
}

}  // namespace pcond
