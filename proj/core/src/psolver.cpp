#include "pcond/psolver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "pcond/errors.hpp"

namespace pcond {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using VecX = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

std::array<Vec2, 3> cell_basis_gradients(const TriMesh& mesh, int t) {
  const auto& c = mesh.cells[t];
  const Vec2& v0 = mesh.vertices[c[0]];
  const Vec2& v1 = mesh.vertices[c[1]];
  const Vec2& v2 = mesh.vertices[c[2]];
  const double inv2a = 1.0 / (2.0 * mesh.cell_area[t]);
  return {perp(v2 - v1) * inv2a, perp(v0 - v2) * inv2a, perp(v1 - v0) * inv2a};
}

void validate_sigma(const TriMesh& mesh, const std::vector<double>& sigma) {
  if (static_cast<int>(sigma.size()) != mesh.cell_count())
    fail_config("sigma vector length must match the cell count");
  for (double s : sigma)
    if (!(s > 0.0) || !std::isfinite(s)) fail_config("sigma values must be positive and finite");
}

void validate_config(const SolverConfig& config) {
  if (!(config.p > 1.0) || !std::isfinite(config.p)) fail_config("p must lie in (1, inf)");
  if (config.max_iterations < 1) fail_config("max_iterations must be positive");
  if (!(config.gradient_tolerance > 0.0)) fail_config("gradient tolerance must be positive");
  if (!(config.armijo_slope > 0.0 && config.armijo_slope < 1.0))
    fail_config("armijo slope must lie in (0, 1)");
  if (!(config.backtrack_factor > 0.0 && config.backtrack_factor < 1.0))
    fail_config("backtrack factor must lie in (0, 1)");
}

void validate_trace(const TriMesh& mesh, const BoundaryTrace& f) {
  if (f.mesh_id != mesh.id) fail_config("trace was sampled on a different mesh");
  if (f.size() != mesh.boundary_count())
    fail_config("trace length must match the boundary vertex count");
  for (double v : f.values)
    if (!std::isfinite(v)) fail_config("trace contains non-finite values");
}

std::vector<double> full_vertex_field(const TriMesh& mesh, const BoundaryTrace& f) {
  std::vector<double> u(mesh.vertex_count(), 0.0);
  for (int i = 0; i < f.size(); ++i) u[mesh.boundary_loop[i]] = f.values[i];
  return u;
}

}  // namespace

double energy(const TriMesh& mesh, const std::vector<double>& sigma, const std::vector<double>& u,
              double p, double epsilon) {
  validate_sigma(mesh, sigma);
  if (static_cast<int>(u.size()) != mesh.vertex_count())
    fail_config("vertex field length must match the vertex count");
  const double e2 = epsilon * epsilon;
  double total = 0.0;
  for (int t = 0; t < mesh.cell_count(); ++t) {
    const auto g = cell_basis_gradients(mesh, t);
    const auto& c = mesh.cells[t];
    Vec2 gu = u[c[0]] * g[0] + u[c[1]] * g[1] + u[c[2]] * g[2];
    total += mesh.cell_area[t] * sigma[t] * std::pow(norm2(gu) + e2, 0.5 * p);
  }
  return total;
}

double pairing_quadrature(const TriMesh& mesh, const std::vector<double>& sigma,
                          const std::vector<double>& u, const std::vector<double>& v, double p) {
  validate_sigma(mesh, sigma);
  if (static_cast<int>(u.size()) != mesh.vertex_count() ||
      static_cast<int>(v.size()) != mesh.vertex_count())
    fail_config("vertex field length must match the vertex count");
  double total = 0.0;
  for (int t = 0; t < mesh.cell_count(); ++t) {
    const auto g = cell_basis_gradients(mesh, t);
    const auto& c = mesh.cells[t];
    Vec2 gu = u[c[0]] * g[0] + u[c[1]] * g[1] + u[c[2]] * g[2];
    const double gn2 = norm2(gu);
    if (gn2 == 0.0) continue;
    Vec2 gv = v[c[0]] * g[0] + v[c[1]] * g[1] + v[c[2]] * g[2];
    total += mesh.cell_area[t] * sigma[t] * std::pow(gn2, 0.5 * (p - 2.0)) * dot(gu, gv);
  }
  return total;
}

struct PSolver::Impl {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<double> sigma;
  SolverConfig config;
  double eps = 0.0;

  int n_int = 0;
  std::vector<int> interior_index;  // vertex -> compact interior index, or -1
  std::vector<int> interior_vertex;
  std::vector<std::array<Vec2, 3>> basis;

  // p = 2 operator (shared initial guess), factorized once
  Eigen::SimplicialLDLT<SpMat> p2_factor;
  bool p2_ok = false;

  Impl(std::shared_ptr<const TriMesh> mesh_in, std::vector<double> sigma_in, SolverConfig cfg)
      : mesh(std::move(mesh_in)), sigma(std::move(sigma_in)), config(std::move(cfg)) {
    if (!mesh) fail_config("solver requires a mesh");
    validate_sigma(*mesh, sigma);
    validate_config(config);
    eps = config.resolved_epsilon();

    interior_index.assign(mesh->vertex_count(), -1);
    for (int v = 0; v < mesh->vertex_count(); ++v) {
      if (!mesh->vertex_on_boundary[v]) {
        interior_index[v] = n_int++;
        interior_vertex.push_back(v);
      }
    }
    basis.resize(mesh->cell_count());
    for (int t = 0; t < mesh->cell_count(); ++t) basis[t] = cell_basis_gradients(*mesh, t);

    if (n_int > 0) {
      std::vector<Triplet> trip;
      trip.reserve(mesh->cell_count() * 9);
      for (int t = 0; t < mesh->cell_count(); ++t) {
        const auto& c = mesh->cells[t];
        const double w = mesh->cell_area[t] * sigma[t];
        for (int a = 0; a < 3; ++a) {
          const int ia = interior_index[c[a]];
          if (ia < 0) continue;
          for (int b = 0; b < 3; ++b) {
            const int ib = interior_index[c[b]];
            if (ib >= 0) trip.emplace_back(ia, ib, w * dot(basis[t][a], basis[t][b]));
          }
        }
      }
      SpMat k2(n_int, n_int);
      k2.setFromTriplets(trip.begin(), trip.end());
      p2_factor.compute(k2);
      p2_ok = p2_factor.info() == Eigen::Success;
    }
  }

  std::vector<Vec2> gradients(const std::vector<double>& u) const {
    std::vector<Vec2> g(mesh->cell_count());
    for (int t = 0; t < mesh->cell_count(); ++t) {
      const auto& c = mesh->cells[t];
      g[t] = u[c[0]] * basis[t][0] + u[c[1]] * basis[t][1] + u[c[2]] * basis[t][2];
    }
    return g;
  }

  double eval_energy(const std::vector<double>& u) const {
    const double e2 = eps * eps;
    double total = 0.0;
    for (int t = 0; t < mesh->cell_count(); ++t) {
      const auto& c = mesh->cells[t];
      Vec2 gu = u[c[0]] * basis[t][0] + u[c[1]] * basis[t][1] + u[c[2]] * basis[t][2];
      total += mesh->cell_area[t] * sigma[t] * std::pow(norm2(gu) + e2, 0.5 * config.p);
    }
    return total;
  }

  /// Energy, interior gradient, and (optionally) Hessian triplets at u.
  double eval(const std::vector<double>& u, VecX& grad, std::vector<Triplet>* hess) const {
    const double p = config.p;
    const double e2 = eps * eps;
    grad.setZero(n_int);
    if (hess) hess->clear();
    double total = 0.0;
    for (int t = 0; t < mesh->cell_count(); ++t) {
      const auto& c = mesh->cells[t];
      Vec2 gu = u[c[0]] * basis[t][0] + u[c[1]] * basis[t][1] + u[c[2]] * basis[t][2];
      const double q = norm2(gu) + e2;
      const double w = mesh->cell_area[t] * sigma[t];
      total += w * std::pow(q, 0.5 * p);
      const double c1 = w * p * std::pow(q, 0.5 * p - 1.0);
      for (int a = 0; a < 3; ++a) {
        const int ia = interior_index[c[a]];
        if (ia < 0) continue;
        grad[ia] += c1 * dot(gu, basis[t][a]);
      }
      if (hess) {
        const double c2 = w * p * (p - 2.0) * std::pow(q, 0.5 * p - 2.0);
        for (int a = 0; a < 3; ++a) {
          const int ia = interior_index[c[a]];
          if (ia < 0) continue;
          const double ga = dot(gu, basis[t][a]);
          for (int b = 0; b < 3; ++b) {
            const int ib = interior_index[c[b]];
            if (ib < 0) continue;
            hess->emplace_back(ia, ib,
                               c1 * dot(basis[t][a], basis[t][b]) + c2 * ga * dot(gu, basis[t][b]));
          }
        }
      }
    }
    return total;
  }

  /// Right-hand side of the p = 2 system for the given boundary values.
  VecX p2_rhs(const std::vector<double>& u) const {
    VecX rhs = VecX::Zero(n_int);
    for (int t = 0; t < mesh->cell_count(); ++t) {
      const auto& c = mesh->cells[t];
      const double w = mesh->cell_area[t] * sigma[t];
      for (int a = 0; a < 3; ++a) {
        const int ia = interior_index[c[a]];
        if (ia < 0) continue;
        for (int b = 0; b < 3; ++b) {
          if (interior_index[c[b]] >= 0) continue;
          rhs[ia] -= w * dot(basis[t][a], basis[t][b]) * u[c[b]];
        }
      }
    }
    return rhs;
  }

  DiscreteSolution run(const BoundaryTrace& f) const {
    validate_trace(*mesh, f);
    std::vector<double> u = full_vertex_field(*mesh, f);
    DiscreteSolution out;
    if (n_int == 0) {
      out.values = std::move(u);
      out.energy = energy(*mesh, sigma, out.values, config.p, 0.0);
      return out;
    }

    auto set_interior = [&](const VecX& x) {
      for (int i = 0; i < n_int; ++i) u[interior_vertex[i]] = x[i];
    };

    // initial guess: the p = 2 solution with the same sigma and trace
    VecX x;
    if (p2_ok) {
      x = p2_factor.solve(p2_rhs(u));
      if (p2_factor.info() != Eigen::Success) x = VecX::Zero(n_int);
    } else {
      x = VecX::Zero(n_int);
    }
    set_interior(x);

    const double tol = config.gradient_tolerance;
    VecX grad(n_int), prev_grad(n_int), prev_x(n_int);
    std::vector<Triplet> hess;
    hess.reserve(mesh->cell_count() * 9);
    SpMat h(n_int, n_int);
    Eigen::SimplicialLDLT<SpMat> newton;
    bool analyzed = false;
    bool have_prev = false;

    double e = 0.0;
    for (int iter = 0; iter <= config.max_iterations; ++iter) {
      e = eval(u, grad, &hess);
      if (!std::isfinite(e) || !grad.allFinite()) fail_solver("NaN encountered during minimization");
      const double gnorm = grad.lpNorm<Eigen::Infinity>();
      if (config.observer) config.observer(iter, e, gnorm);
      if (gnorm <= tol * (1.0 + std::abs(e))) {
        out.values = std::move(u);
        out.energy = energy(*mesh, sigma, out.values, config.p, 0.0);
        out.iterations = iter;
        out.residual_norm = gnorm;
        return out;
      }
      if (iter == config.max_iterations) break;

      h.setFromTriplets(hess.begin(), hess.end());
      if (!analyzed) {
        newton.analyzePattern(h);
        analyzed = true;
      }
      newton.factorize(h);

      VecX d;
      bool newton_ok = newton.info() == Eigen::Success;
      if (newton_ok) {
        d = newton.solve(-grad);
        newton_ok = newton.info() == Eigen::Success && d.allFinite() && grad.dot(d) < 0.0;
      }
      if (!newton_ok) {
        // Barzilai-Borwein step along the negative gradient
        double alpha = 1.0 / (1.0 + gnorm);
        if (have_prev) {
          const VecX dx = x - prev_x;
          const VecX dg = grad - prev_grad;
          const double dxdg = dx.dot(dg);
          if (dxdg > 0.0) alpha = std::clamp(dx.squaredNorm() / dxdg, 1e-12, 1e12);
        }
        d = -alpha * grad;
      }

      prev_x = x;
      prev_grad = grad;
      have_prev = true;

      // Armijo backtracking; once the predicted decrease drops below what the
      // energy can resolve in double precision, accept the step on a no-blowup
      // check instead (descent is then unmeasurable but the direction is sound)
      const double slope = grad.dot(d);
      double step = 1.0;
      double e_new = 0.0;
      bool accepted = false;
      for (int bt = 0; bt < config.max_backtracks; ++bt) {
        set_interior(x + step * d);
        e_new = eval_energy(u);
        const bool measurable = std::abs(step * slope) > 1e-14 * (1.0 + std::abs(e));
        if (std::isfinite(e_new) &&
            (e_new <= e + config.armijo_slope * step * slope ||
             (!measurable && e_new <= e + 1e-13 * (1.0 + std::abs(e))))) {
          accepted = true;
          break;
        }
        step *= config.backtrack_factor;
      }
      if (!accepted) {
        set_interior(x);  // restore
        std::ostringstream msg;
        msg << "line search stalled at iteration " << iter << "; residual " << gnorm;
        fail_solver(msg.str());
      }
      x += step * d;
    }

    std::ostringstream msg;
    msg << "no convergence within " << config.max_iterations
        << " iterations; residual " << grad.lpNorm<Eigen::Infinity>() << ", tolerance "
        << tol * (1.0 + std::abs(e));
    fail_solver(msg.str());
  }
};

PSolver::PSolver(std::shared_ptr<const TriMesh> mesh, std::vector<double> sigma, SolverConfig config)
    : impl_(std::make_unique<Impl>(std::move(mesh), std::move(sigma), std::move(config))) {}

PSolver::~PSolver() = default;
PSolver::PSolver(PSolver&&) noexcept = default;
PSolver& PSolver::operator=(PSolver&&) noexcept = default;

const TriMesh& PSolver::mesh() const { return *impl_->mesh; }
const std::vector<double>& PSolver::sigma() const { return impl_->sigma; }
const SolverConfig& PSolver::config() const { return impl_->config; }

DiscreteSolution PSolver::solve(const BoundaryTrace& f) const { return impl_->run(f); }

std::vector<Vec2> PSolver::cell_gradients(const std::vector<double>& u) const {
  if (static_cast<int>(u.size()) != impl_->mesh->vertex_count())
    fail_config("vertex field length must match the vertex count");
  return impl_->gradients(u);
}

DiscreteSolution solve_dirichlet(const TriMesh& mesh, const std::vector<double>& sigma,
                                 const BoundaryTrace& f, const SolverConfig& config) {
  auto shared = std::make_shared<TriMesh>(mesh);
  return PSolver(shared, sigma, config).solve(f);
}

double dn_pairing(const TriMesh& mesh, const std::vector<double>& sigma, const BoundaryTrace& f,
                  const BoundaryTrace& g, const SolverConfig& config) {
  DiscreteSolution u = solve_dirichlet(mesh, sigma, f, config);
  if (g.values == f.values) return u.energy;  // v = u makes the pairing the energy exactly
  validate_trace(mesh, g);
  std::vector<double> ones(mesh.cell_count(), 1.0);
  DiscreteSolution v = solve_dirichlet(mesh, ones, g, config);
  return pairing_quadrature(mesh, sigma, u.values, v.values, config.p);
}

double lambda_b_pairing(const TriMesh& mesh, const std::vector<int>& cells, const BoundaryTrace& f,
                        const BoundaryTrace& g, const SolverConfig& config) {
  if (cells.empty()) fail_config("localized pairing needs a nonempty cell set");
  std::vector<double> ones(mesh.cell_count(), 1.0);
  auto shared = std::make_shared<TriMesh>(mesh);
  PSolver reference(shared, ones, config);
  DiscreteSolution uf = reference.solve(f);
  DiscreteSolution ug = (g.values == f.values) ? uf : reference.solve(g);

  std::vector<Vec2> gf = reference.cell_gradients(uf.values);
  std::vector<Vec2> gg = reference.cell_gradients(ug.values);
  const double p = config.p;
  double total = 0.0;
  for (int t : cells) {
    if (t < 0 || t >= mesh.cell_count()) fail_config("cell index out of range");
    const double gn2 = norm2(gf[t]);
    if (gn2 == 0.0) continue;
    total += mesh.cell_area[t] * std::pow(gn2, 0.5 * (p - 2.0)) * dot(gf[t], gg[t]);
  }
  return total;
}

MonotonicityBounds monotonicity_bounds(const TriMesh& mesh, const std::vector<double>& sigma0,
                                       const std::vector<double>& sigma1, const BoundaryTrace& f,
                                       const SolverConfig& config) {
  validate_sigma(mesh, sigma0);
  validate_sigma(mesh, sigma1);
  const double p = config.p;
  auto shared = std::make_shared<TriMesh>(mesh);
  PSolver base(shared, sigma0, config);
  DiscreteSolution u0 = base.solve(f);
  DiscreteSolution u1 = PSolver(shared, sigma1, config).solve(f);

  std::vector<Vec2> g0 = base.cell_gradients(u0.values);
  MonotonicityBounds out;
  out.middle = u1.energy - u0.energy;
  const double inv_pm1 = 1.0 / (p - 1.0);
  for (int t = 0; t < mesh.cell_count(); ++t) {
    const double gp = std::pow(norm2(g0[t]), 0.5 * p);
    const double a = mesh.cell_area[t];
    out.lower += (p - 1.0) * a * sigma0[t] * (1.0 - std::pow(sigma0[t] / sigma1[t], inv_pm1)) * gp;
    out.upper += a * (sigma1[t] - sigma0[t]) * gp;
  }

  const double scale =
      std::max({1.0, std::abs(out.lower), std::abs(out.middle), std::abs(out.upper)});
  if (out.middle - out.lower < -1e-6 * scale || out.upper - out.middle < -1e-6 * scale) {
    std::ostringstream msg;
    msg << "monotonicity sandwich violated: lower " << out.lower << ", middle " << out.middle
        << ", upper " << out.upper << " (solver accuracy problem)";
    fail_solver(msg.str());
  }
  return out;
}

}  // namespace pcond
