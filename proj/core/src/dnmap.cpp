#include "pcond/dnmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>
#include <utility>

#include "pcond/errors.hpp"

namespace pcond {

namespace {

/// Exact byte identity of (mesh, values); log_scale is deliberately left out
/// so that offset sweeps of the same normalized profile share one solve.
std::string fingerprint(const BoundaryTrace& f) {
  std::string key;
  key.resize(sizeof(f.mesh_id) + f.values.size() * sizeof(double));
  std::memcpy(key.data(), &f.mesh_id, sizeof(f.mesh_id));
  if (!f.values.empty())
    std::memcpy(key.data() + sizeof(f.mesh_id), f.values.data(),
                f.values.size() * sizeof(double));
  return key;
}

}  // namespace

double cell_energy(double area, double sigma, const Vec2& grad, double p) {
  const double gn2 = norm2(grad);
  if (gn2 == 0.0) return 0.0;
  return area * sigma * std::pow(gn2, 0.5 * p);
}

DnOracle::DnOracle(ConductivityScene scene, SolverConfig config) : scene_(std::move(scene)) {
  if (!scene_.mesh) fail_config("oracle scene has no mesh");
  config_ = std::move(config);
  config_.p = scene_.p;
  solver_ = std::make_unique<PSolver>(scene_.mesh, scene_.sigma, config_);
  const bool unit = std::all_of(scene_.sigma.begin(), scene_.sigma.end(),
                                [](double s) { return s == 1.0; });
  if (!unit)
    unit_solver_ = std::make_unique<PSolver>(
        scene_.mesh, std::vector<double>(scene_.sigma.size(), 1.0), config_);
}

DnOracle DnOracle::reference(std::shared_ptr<const TriMesh> mesh, double p, SolverConfig config) {
  auto n = static_cast<std::size_t>(mesh ? mesh->cell_count() : 0);
  return DnOracle(make_scene(std::move(mesh), std::vector<double>(n, 1.0), p), std::move(config));
}

void DnOracle::set_cache_enabled(bool enabled) {
  std::lock_guard<std::mutex> lock(mutex_);
  cache_enabled_ = enabled;
}

std::shared_ptr<const CachedSolve> DnOracle::solve(const BoundaryTrace& f) const {
  const std::string key = fingerprint(f);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (cache_enabled_) {
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        ++cache_hit_count_;
        return it->second;
      }
    }
  }
  DiscreteSolution sol = solver_->solve(f);
  auto entry = std::make_shared<CachedSolve>();
  entry->gradients = solver_->cell_gradients(sol.values);
  entry->values = std::move(sol.values);
  entry->energy = sol.energy;
  entry->iterations = sol.iterations;
  ++solve_count_;
  std::lock_guard<std::mutex> lock(mutex_);
  if (!cache_enabled_) return entry;
  return cache_.emplace(key, std::move(entry)).first->second;
}

std::shared_ptr<const CachedSolve> DnOracle::extension(const BoundaryTrace& g) const {
  if (!unit_solver_) return solve(g);  // sigma == 1: the main cache already holds extensions
  const std::string key = fingerprint(g);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (cache_enabled_) {
      auto it = extension_cache_.find(key);
      if (it != extension_cache_.end()) {
        ++cache_hit_count_;
        return it->second;
      }
    }
  }
  DiscreteSolution sol = unit_solver_->solve(g);
  auto entry = std::make_shared<CachedSolve>();
  entry->gradients = unit_solver_->cell_gradients(sol.values);
  entry->values = std::move(sol.values);
  entry->energy = sol.energy;
  entry->iterations = sol.iterations;
  ++solve_count_;
  std::lock_guard<std::mutex> lock(mutex_);
  if (!cache_enabled_) return entry;
  return extension_cache_.emplace(key, std::move(entry)).first->second;
}

double DnOracle::pair(const BoundaryTrace& f) const { return solve(f)->energy; }

double DnOracle::pair(const BoundaryTrace& f, const BoundaryTrace& g) const {
  if (f.mesh_id == g.mesh_id && f.values == g.values) return pair(f);
  auto u = solve(f);
  auto v = extension(g);
  return pairing_quadrature(mesh(), scene_.sigma, u->values, v->values, scene_.p);
}

double DnOracle::pair_scaled(const BoundaryTrace& f) const {
  return std::exp(scene_.p * f.log_scale) * pair(f);
}

double DnOracle::pair_scaled(const BoundaryTrace& f, const BoundaryTrace& g) const {
  return std::exp((scene_.p - 1.0) * f.log_scale + g.log_scale) * pair(f, g);
}

double DnOracle::localized_pair(const BoundaryTrace& f, const std::vector<int>& cells) const {
  auto u = solve(f);
  const TriMesh& m = mesh();
  double sum = 0.0;
  for (int c : cells) {
    if (c < 0 || c >= m.cell_count()) fail_geometry("localized pairing cell index out of range");
    sum += cell_energy(m.cell_area[c], scene_.sigma[c], u->gradients[c], scene_.p);
  }
  return sum;
}

double deficit(const DnOracle& a, const DnOracle& b, const BoundaryTrace& f) {
  if (a.mesh().id != b.mesh().id) fail_config("deficit requires oracles on the same mesh");
  if (a.p() != b.p()) fail_config("deficit requires oracles with the same exponent p");
  return a.pair(f) - b.pair(f);
}

double PairingExpr::evaluate(const BoundaryTrace& f) const {
  double sum = 0.0;
  for (const Term& term : terms) {
    if (!term.oracle) fail_config("pairing expression term has no oracle");
    const double value =
        term.cells ? term.oracle->localized_pair(f, *term.cells) : term.oracle->pair(f);
    sum += term.coeff * value;
  }
  return sum;
}

PairingExpr dn_term(const DnOracle& oracle, double coeff) {
  PairingExpr expr;
  expr.terms.push_back({&oracle, nullptr, coeff});
  return expr;
}

PairingExpr localized_term(const DnOracle& oracle, std::vector<int> cells, double coeff) {
  PairingExpr expr;
  expr.terms.push_back(
      {&oracle, std::make_shared<const std::vector<int>>(std::move(cells)), coeff});
  return expr;
}

PairingExpr operator+(PairingExpr lhs, PairingExpr rhs) {
  for (auto& term : rhs.terms) lhs.terms.push_back(std::move(term));
  return lhs;
}

std::vector<DictionaryEntry> make_dictionary(const TriMesh& mesh,
                                             std::shared_ptr<const WolffSolution> wolff,
                                             const DictionaryOptions& options) {
  if (!wolff) fail_config("dictionary needs an oscillator profile");
  if (options.directions < 1 || options.tau_count < 2 || options.offsets < 1)
    fail_config("dictionary needs at least one direction, two frequencies, and one offset");

  std::vector<DictionaryEntry> dict;
  char id[64];

  const std::vector<Vec2> dirs = default_directions(options.directions);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const std::vector<double> taus = probe_frequencies(mesh, dirs[d], options.tau_count);
    const auto [lo, hi] = mesh.extent(dirs[d]);
    for (std::size_t k = 0; k < taus.size(); ++k) {
      for (int o = 0; o < options.offsets; ++o) {
        const double t = lo + (hi - lo) * (o + 1.0) / (options.offsets + 1.0);
        const WolffField field = make_wolff_field(wolff, dirs[d], taus[k], t);
        std::snprintf(id, sizeof(id), "wolff_d%02zu_t%zu_o%d", d, k, o);
        dict.push_back({id, boundary_trace(field, mesh)});
      }
    }
  }

  const double r = 1.0 / std::sqrt(2.0);
  dict.push_back({"affine_x", trace_from_function(mesh, [](const Vec2& v) { return v.x; })});
  dict.push_back({"affine_y", trace_from_function(mesh, [](const Vec2& v) { return v.y; })});
  dict.push_back(
      {"affine_xpy", trace_from_function(mesh, [r](const Vec2& v) { return (v.x + v.y) * r; })});
  dict.push_back(
      {"affine_xmy", trace_from_function(mesh, [r](const Vec2& v) { return (v.x - v.y) * r; })});

  std::mt19937 rng(options.seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const int n = mesh.boundary_count();
  for (int j = 0; j < options.random_profiles; ++j) {
    std::vector<double> a(options.fourier_modes), b(options.fourier_modes);
    for (int k = 0; k < options.fourier_modes; ++k) {
      a[k] = coeff(rng) / (k + 1.0);
      b[k] = coeff(rng) / (k + 1.0);
    }
    std::vector<double> values(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double lambda = 2.0 * M_PI * i / n;
      for (int k = 0; k < options.fourier_modes; ++k)
        values[i] += a[k] * std::cos((k + 1) * lambda) + b[k] * std::sin((k + 1) * lambda);
    }
    std::snprintf(id, sizeof(id), "fourier_%02d", j);
    dict.push_back({id, make_trace(mesh, std::move(values))});
  }
  return dict;
}

PreorderVerdict preorder_test(const PairingExpr& lhs, const PairingExpr& rhs,
                              const std::vector<DictionaryEntry>& dictionary,
                              const DnOracle& reference, double margin) {
  if (dictionary.empty()) fail_config("preorder test needs a nonempty dictionary");
  if (!(margin >= 0.0)) fail_config("preorder margin must be nonnegative");

  PreorderVerdict verdict;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dictionary.size(); ++i) {
    const BoundaryTrace& f = dictionary[i].trace;
    const double value = lhs.evaluate(f) - rhs.evaluate(f);
    const double scale = std::abs(reference.pair(f));
    double ratio;
    if (scale > 0.0)
      ratio = value / scale;
    else
      ratio = value == 0.0 ? 0.0
                           : std::copysign(std::numeric_limits<double>::infinity(), value);
    if (ratio < worst) {
      worst = ratio;
      verdict.worst = {dictionary[i].id, i, value, scale};
    }
  }
  verdict.worst_ratio = worst;
  verdict.consistent = !(worst < -margin);
  return verdict;
}

void dump_measurements(const DnOracle& oracle, const std::vector<DictionaryEntry>& dictionary,
                       std::ostream& out) {
  out << "trace_id,value,log_scale\n";
  char row[160];
  for (const auto& entry : dictionary) {
    std::snprintf(row, sizeof(row), "%s,%.17g,%.17g\n", entry.id.c_str(),
                  oracle.pair(entry.trace), entry.trace.log_scale);
    out << row;
  }
}

}  // namespace pcond
