#include "pcond/enclosure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pcond/errors.hpp"
#include "pcond/parallel.hpp"

namespace pcond {

const char* to_string(CurveClass c) {
  switch (c) {
    case CurveClass::decay: return "decay";
    case CurveClass::blowup_pos: return "blowup_pos";
    case CurveClass::blowup_neg: return "blowup_neg";
    case CurveClass::undecided: return "undecided";
  }
  return "?";
}

const char* to_string(EnclosureVerdict v) {
  switch (v) {
    case EnclosureVerdict::inclusion: return "inclusion";
    case EnclosureVerdict::homogeneous: return "homogeneous";
    case EnclosureVerdict::partial: return "partial";
  }
  return "?";
}

IndicatorSample indicator(const DnOracle& oracle_sigma, const DnOracle& oracle_ref,
                          const std::shared_ptr<const WolffSolution>& wolff,
                          const IndicatorQuery& query, double noise_floor) {
  if (!(noise_floor >= 0.0)) fail_config("indicator noise floor must be nonnegative");
  const WolffField field = make_wolff_field(wolff, query.rho, query.tau, query.t);
  const BoundaryTrace f = boundary_trace(field, oracle_sigma.mesh());

  const double d = deficit(oracle_sigma, oracle_ref, f);
  const double scale = std::abs(oracle_ref.pair(f));
  const double p = oracle_sigma.p();

  IndicatorSample sample;
  sample.tau = query.tau;
  sample.sign = (std::abs(d) <= noise_floor * scale || d == 0.0) ? 0 : (d > 0.0 ? 1 : -1);
  sample.log_magnitude =
      std::log(std::max(std::abs(d), 1e-300)) + p * f.log_scale - p * std::log(query.tau);
  return sample;
}

IndicatorCurve indicator_curve(const DnOracle& oracle_sigma, const DnOracle& oracle_ref,
                               const std::shared_ptr<const WolffSolution>& wolff, const Vec2& rho,
                               double t, const std::vector<double>& taus, double noise_floor) {
  if (taus.empty()) fail_config("indicator curve needs a nonempty frequency schedule");
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (!(taus[i] > taus[i - 1])) fail_config("frequency schedule must increase strictly");

  IndicatorCurve curve;
  curve.rho = rho;
  curve.t = t;
  curve.samples.reserve(taus.size());
  for (double tau : taus)
    curve.samples.push_back(indicator(oracle_sigma, oracle_ref, wolff, {rho, t, tau}, noise_floor));
  return curve;
}

CurveClass classify_curve(IndicatorCurve& curve, double slope_threshold, double compensation) {
  const int n = static_cast<int>(curve.samples.size());
  if (n < 4) fail_config("curve classification needs at least 4 frequency samples");
  const int top_begin = n / 2;
  const int top_count = n - top_begin;

  int zeros = 0;
  for (int i = top_begin; i < n; ++i)
    if (curve.samples[i].sign == 0) ++zeros;
  if (2 * zeros >= top_count) {
    curve.fitted_slope = 0.0;
    return CurveClass::decay;  // the indicator has sunk below the noise floor
  }

  // Least-squares slope of the compensated log-magnitude over the top half,
  // ignoring noise-floor samples.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  int sign = 0;
  bool coherent = true;
  for (int i = top_begin; i < n; ++i) {
    const IndicatorSample& s = curve.samples[i];
    if (s.sign == 0) continue;
    if (sign == 0)
      sign = s.sign;
    else if (s.sign != sign)
      coherent = false;
    const double y = s.log_magnitude + compensation * std::log(s.tau);
    sx += s.tau;
    sy += y;
    sxx += s.tau * s.tau;
    sxy += s.tau * y;
    ++m;
  }
  const double denom = m * sxx - sx * sx;
  if (m < 2 || denom <= 0.0) {
    curve.fitted_slope = 0.0;
    return CurveClass::undecided;
  }
  const double slope = (m * sxy - sx * sy) / denom;
  curve.fitted_slope = slope;

  if (slope > slope_threshold && coherent)
    return sign > 0 ? CurveClass::blowup_pos : CurveClass::blowup_neg;
  if (slope < -slope_threshold) return CurveClass::decay;
  return CurveClass::undecided;
}

SupportEstimate estimate_support(const DnOracle& oracle_sigma, const DnOracle& oracle_ref,
                                 const std::shared_ptr<const WolffSolution>& wolff, const Vec2& rho,
                                 const EnclosureOptions& options) {
  const TriMesh& mesh = oracle_sigma.mesh();
  if (std::abs(norm(rho) - 1.0) > 1e-12) fail_config("support direction must be a unit vector");
  // Half a cell by default: the t-sweep rides cached solves, so the extra
  // bisection step is nearly free and halves the quantization error.
  const double tolerance = options.tolerance < 0.0 ? 0.5 * mesh.h_max : options.tolerance;
  if (!(tolerance > 0.0)) fail_config("support bisection tolerance must be positive");

  std::vector<double> taus = options.tau_override;
  if (taus.empty()) taus = probe_frequencies(mesh, rho, options.tau_count);

  SupportEstimate estimate;
  estimate.rho = rho;
  auto [t_low, t_high] = mesh.extent(rho);

  bool seen_blowup = false;
  while (t_high - t_low > tolerance) {
    const double mid = 0.5 * (t_low + t_high);
    IndicatorCurve curve =
        indicator_curve(oracle_sigma, oracle_ref, wolff, rho, mid, taus, options.noise_floor);
    const CurveClass cls =
        classify_curve(curve, options.slope_threshold, options.compensation);
    estimate.trace.push_back(std::move(curve));
    estimate.trace_class.push_back(cls);

    if (cls == CurveClass::decay) {
      t_high = mid;
    } else {
      // Blowup, or the undecided skin that hugs the support plane: either
      // way the half-space has not cleared the inclusion, so the lower end
      // moves. Erring outward keeps the enclosure an outer bound.
      t_low = mid;
      if (cls == CurveClass::blowup_pos || cls == CurveClass::blowup_neg) {
        seen_blowup = true;
        (cls == CurveClass::blowup_pos ? estimate.blowup_pos : estimate.blowup_neg) += 1;
      } else {
        estimate.contested = true;
      }
    }
  }

  if (!seen_blowup && estimate.contested) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "indicator inconclusive along direction (%.6f, %.6f): probes near %.6f never "
                  "grew decisively",
                  rho.x, rho.y, 0.5 * (t_low + t_high));
    fail_inconclusive(msg);
  }

  estimate.t_low = t_low;
  estimate.t_high = t_high;
  estimate.h_est = 0.5 * (t_low + t_high);
  estimate.no_inclusion = !seen_blowup;
  return estimate;
}

EnclosureReport reconstruct_hull(const DnOracle& oracle_sigma, const DnOracle& oracle_ref,
                                 const std::shared_ptr<const WolffSolution>& wolff,
                                 const std::vector<Vec2>& directions,
                                 const EnclosureOptions& options) {
  if (directions.size() < 8) fail_config("hull reconstruction needs at least 8 directions");

  const int n = static_cast<int>(directions.size());
  EnclosureReport report;
  report.estimates.resize(n);
  report.status.assign(n, "ok");

  parallel_for(n, [&](int i) {
    try {
      report.estimates[i] = estimate_support(oracle_sigma, oracle_ref, wolff, directions[i], options);
      if (report.estimates[i].no_inclusion)
        report.status[i] = "no_inclusion";
      else if (report.estimates[i].contested)
        report.status[i] = "flagged";
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::inconclusive) throw;
      report.estimates[i].rho = directions[i];
      report.status[i] = "inconclusive";
    }
  });

  int pos = 0, neg = 0;
  std::vector<HalfSpace> halves;
  bool any_inclusion = false, any_gap = false;
  for (int i = 0; i < n; ++i) {
    pos += report.estimates[i].blowup_pos;
    neg += report.estimates[i].blowup_neg;
    if (report.status[i] == "ok" || report.status[i] == "flagged") {
      halves.push_back({directions[i], report.estimates[i].h_est});
      any_inclusion = true;
    } else {
      any_gap = true;
    }
  }

  if (!any_inclusion) {
    report.verdict = EnclosureVerdict::homogeneous;
    report.sign_class = SignClass::homogeneous;
    return report;
  }

  report.verdict = any_gap ? EnclosureVerdict::partial : EnclosureVerdict::inclusion;
  report.sign_class =
      pos > neg ? SignClass::geq1 : (neg > pos ? SignClass::leq1 : SignClass::homogeneous);
  try {
    report.hull = halfspace_intersection(halves);
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::geometry) throw;
    report.verdict = EnclosureVerdict::partial;  // too few usable directions to bound the set
  }
  for (const HalfSpace& h : halves) report.hull.support.emplace_back(h.rho, h.t);
  return report;
}

}  // namespace pcond
