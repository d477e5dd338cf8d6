#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pcond/dnmap.hpp"
#include "pcond/geometry.hpp"
#include "pcond/wolff.hpp"

namespace pcond {

/// One probe of the indicator  I_rho(t, tau) = tau^-p <(L_sigma - L_ref)(f_tau), f_tau>,
/// where f_tau is the trace of the oscillatory field attached to { x.rho <= t }.
struct IndicatorQuery {
  Vec2 rho{1.0, 0.0};  // unit direction
  double t = 0.0;      // half-space offset
  double tau = 1.0;    // frequency, > 0
};

struct IndicatorSample {
  double tau = 0.0;
  int sign = 0;                // 0 when |I| sits below the noise floor
  double log_magnitude = 0.0;  // log |I|, reconstructed without ever forming I
};

/// Indicator values along one frequency schedule at a fixed half-space.
struct IndicatorCurve {
  Vec2 rho{1.0, 0.0};
  double t = 0.0;
  std::vector<IndicatorSample> samples;  // strictly increasing tau
  double fitted_slope = 0.0;             // filled in by classify_curve
};

enum class CurveClass { decay, blowup_pos, blowup_neg, undecided };
const char* to_string(CurveClass c);

struct EnclosureOptions {
  int tau_count = 6;               // frequencies per schedule (mesh-capped)
  std::vector<double> tau_override;  // nonempty: use exactly these frequencies
  double slope_threshold = 0.035;  // on the compensated log-magnitude, per unit tau
  double compensation = 1.5;       // prefactor removed as compensation * log(tau)
  double noise_floor = 1e-10;      // |deficit| below floor * reference pairing is zero
  double tolerance = -1.0;         // bisection bracket width; < 0 picks half the mesh width
};

/// Signed log-magnitude of one indicator value. The magnitude is assembled in
/// log space (log |deficit| + p log_scale - p log tau), so arbitrarily strong
/// probes never overflow. The sign is zeroed below the relative noise floor.
IndicatorSample indicator(const DnOracle& oracle_sigma, const DnOracle& oracle_ref,
                          const std::shared_ptr<const WolffSolution>& wolff,
                          const IndicatorQuery& query, double noise_floor = 1e-10);

/// Indicator samples over a whole frequency schedule at one offset.
IndicatorCurve indicator_curve(const DnOracle& oracle_sigma, const DnOracle& oracle_ref,
                               const std::shared_ptr<const WolffSolution>& wolff, const Vec2& rho,
                               double t, const std::vector<double>& taus,
                               double noise_floor = 1e-10);

/// Growth-vs-decay dichotomy from the top half of the schedule: least-squares
/// slope of log|I| + compensation*log(tau) against tau. Blowup additionally
/// requires a constant sign; magnitudes below the noise floor read as decay.
/// Needs at least 4 samples. Stores the fitted slope back into the curve.
CurveClass classify_curve(IndicatorCurve& curve, double slope_threshold = 0.035,
                          double compensation = 1.5);

/// Estimated support offset of the inclusion along one direction.
struct SupportEstimate {
  Vec2 rho{1.0, 0.0};
  double h_est = 0.0;         // midpoint of the final bracket
  double t_low = 0.0;         // largest offset that had not decayed yet
  double t_high = 0.0;        // smallest offset that decayed
  bool no_inclusion = false;  // every probe decayed: nothing seen along rho
  bool contested = false;     // some midpoints were unclassifiable (skin zone)
  int blowup_pos = 0;         // sign tally of the blowups encountered
  int blowup_neg = 0;
  std::vector<IndicatorCurve> trace;       // every probed midpoint, in order
  std::vector<CurveClass> trace_class;     // its classification
};

/// Bisection on the half-space offset: decay moves the upper end, anything
/// else (blowup, or the undecided skin hugging the support plane) moves the
/// lower end, so the estimate lands on the outer edge of the region the
/// indicator cannot clear -- the safe side for an enclosing half-space. The
/// initial bracket is the mesh extent, which always contains the support
/// value. A direction whose probes were contested but never grew decisively
/// errors with "indicator inconclusive": a faint inclusion and noise cannot
/// be told apart there.
SupportEstimate estimate_support(const DnOracle& oracle_sigma, const DnOracle& oracle_ref,
                                 const std::shared_ptr<const WolffSolution>& wolff, const Vec2& rho,
                                 const EnclosureOptions& options = {});

enum class EnclosureVerdict { inclusion, homogeneous, partial };
const char* to_string(EnclosureVerdict v);

struct EnclosureReport {
  EnclosureVerdict verdict = EnclosureVerdict::homogeneous;
  SignClass sign_class = SignClass::homogeneous;
  HullPolygon hull;  // intersection of the estimated half-spaces; empty if none
  std::vector<SupportEstimate> estimates;  // one per direction, estimate order
  std::vector<std::string> status;  // ok | flagged | no_inclusion | inconclusive
};

/// Full sweep: per-direction support estimation (in parallel), half-space
/// intersection, and the sign class from the majority of blowup signs.
/// All directions reporting "no inclusion" yields the homogeneous verdict.
EnclosureReport reconstruct_hull(const DnOracle& oracle_sigma, const DnOracle& oracle_ref,
                                 const std::shared_ptr<const WolffSolution>& wolff,
                                 const std::vector<Vec2>& directions,
                                 const EnclosureOptions& options = {});

}  // namespace pcond
