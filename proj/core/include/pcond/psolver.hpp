#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pcond/geometry.hpp"
#include "pcond/trace.hpp"

namespace pcond {

/// Knobs for the energy minimizer. Defaults follow the documented scheme:
/// damped Newton with Armijo backtracking, Barzilai-Borwein gradient fallback,
/// regularization eps = 1e-8 for p >= 2 and 1e-5 for p < 2.
struct SolverConfig {
  double p = 2.0;
  double epsilon = -1.0;  // < 0 means "pick the default for this p"
  int max_iterations = 500;
  double gradient_tolerance = 1e-10;  // stop at ||grad||_inf <= tol * (1 + |E|)
  double armijo_slope = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;
  /// Optional per-iteration hook (iteration, regularized energy, ||grad||_inf).
  std::function<void(int, double, double)> observer;

  double resolved_epsilon() const {
    return epsilon >= 0.0 ? epsilon : (p >= 2.0 ? 1e-8 : 1e-5);
  }
};

struct DiscreteSolution {
  std::vector<double> values;  // one per mesh vertex; boundary matches the trace exactly
  double energy = 0.0;         // unregularized discrete energy of the final iterate
  int iterations = 0;
  double residual_norm = 0.0;  // final ||grad||_inf of the regularized energy
};

/// Discrete energy  sum_T area * sigma_T * (|grad u|_T^2 + eps^2)^(p/2)
/// with the exact per-triangle gradient of the vertex-linear interpolant.
double energy(const TriMesh& mesh, const std::vector<double>& sigma, const std::vector<double>& u,
              double p, double epsilon);

/// Quadrature of  sum_T area * sigma_T * |grad u|^(p-2) grad u . grad v.
/// Cells with a vanishing gradient contribute zero (also for p < 2).
double pairing_quadrature(const TriMesh& mesh, const std::vector<double>& sigma,
                          const std::vector<double>& u, const std::vector<double>& v, double p);

/// Reusable minimizer for one (mesh, sigma, p): keeps the interior indexing,
/// the sparsity analysis, and a lazily factorized p = 2 operator that serves
/// as the initial guess for every subsequent solve. Safe to call from several
/// threads at once.
class PSolver {
 public:
  PSolver(std::shared_ptr<const TriMesh> mesh, std::vector<double> sigma, SolverConfig config);
  ~PSolver();
  PSolver(PSolver&&) noexcept;
  PSolver& operator=(PSolver&&) noexcept;

  const TriMesh& mesh() const;
  const std::vector<double>& sigma() const;
  const SolverConfig& config() const;

  /// Minimize the regularized energy subject to the Dirichlet trace.
  DiscreteSolution solve(const BoundaryTrace& f) const;

  /// Per-cell gradient of a vertex field (helper for pairings and scans).
  std::vector<Vec2> cell_gradients(const std::vector<double>& u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around PSolver.
DiscreteSolution solve_dirichlet(const TriMesh& mesh, const std::vector<double>& sigma,
                                 const BoundaryTrace& f, const SolverConfig& config);

/// Boundary pairing <L_sigma(f), g> on normalized traces (log_scale is the
/// caller's business via homogeneity: scale by exp((p-1) ls_f + ls_g)).
/// g is extended to the interior by the sigma = 1 energy minimizer; when
/// g == f the extension is u itself, making pair(f, f) the exact energy.
double dn_pairing(const TriMesh& mesh, const std::vector<double>& sigma, const BoundaryTrace& f,
                  const BoundaryTrace& g, const SolverConfig& config);

/// Localized reference pairing <L_B(f), g>: both fields solved with sigma = 1,
/// the integrand accumulated over the cells of B only.
double lambda_b_pairing(const TriMesh& mesh, const std::vector<int>& cells, const BoundaryTrace& f,
                        const BoundaryTrace& g, const SolverConfig& config);

struct MonotonicityBounds {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
};

/// The two-sided monotonicity estimate around sigma0 -> sigma1, all three
/// numbers from the same base solution u0:
///   lower = (p-1) sum area sigma0 (1 - (sigma0/sigma1)^(1/(p-1))) |grad u0|^p
///   middle = <(L_sigma1 - L_sigma0) f, f>
///   upper = sum area (sigma1 - sigma0) |grad u0|^p
/// A sandwich violation beyond numerical tolerance raises a solver error.
MonotonicityBounds monotonicity_bounds(const TriMesh& mesh, const std::vector<double>& sigma0,
                                       const std::vector<double>& sigma1, const BoundaryTrace& f,
                                       const SolverConfig& config);

}  // namespace pcond
