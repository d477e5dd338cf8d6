#include "pcond/dnmap.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "pcond/errors.hpp"

using namespace pcond;

namespace {

std::shared_ptr<const TriMesh> square_mesh(int n) {
  return std::make_shared<TriMesh>(build_mesh(DomainSpec::unit_square(), n));
}

ConductivityScene disk_scene(std::shared_ptr<const TriMesh> mesh, Vec2 center, double radius,
                             double sigma, double p) {
  return paint_scene(mesh, {{DiskShape{center, radius}, sigma}}, p);
}

ConductivityScene homogeneous_scene(std::shared_ptr<const TriMesh> mesh, double p) {
  return make_scene(mesh, std::vector<double>(mesh->cell_count(), 1.0), p);
}

}  // namespace

TEST_CASE("cache: repeated queries cost one solve and return identical values") {
  auto mesh = square_mesh(12);
  DnOracle oracle(disk_scene(mesh, {0.5, 0.5}, 0.2, 2.0, 3.0));

  auto f = trace_from_function(*mesh, [](const Vec2& v) { return v.x; });
  const double first = oracle.pair(f);
  CHECK(oracle.solve_count() == 1);
  const double second = oracle.pair(f);
  CHECK(oracle.solve_count() == 1);
  CHECK(oracle.cache_hit_count() >= 1);
  CHECK(first == second);  // bit-identical, not merely close

  BoundaryTrace copy = f;  // byte-identical values, fresh object
  CHECK(oracle.pair(copy) == first);
  CHECK(oracle.solve_count() == 1);

  // Amplitude bookkeeping sits on top of the same cached solve.
  CHECK(oracle.pair_scaled(f) == doctest::Approx(std::exp(3.0 * f.log_scale) * first));
  CHECK(oracle.solve_count() == 1);
}

TEST_CASE("cache: sweeping the probe offset reuses one solve per (direction, frequency)") {
  auto mesh = square_mesh(12);
  DnOracle oracle(disk_scene(mesh, {0.5, 0.5}, 0.2, 2.0, 2.0));
  auto wolff = std::make_shared<WolffSolution>(integrate_wolff(2.0));

  const Vec2 rho{1.0, 0.0};
  const double tau = probe_frequencies(*mesh, rho).back();
  auto f1 = boundary_trace(make_wolff_field(wolff, rho, tau, 0.3), *mesh);
  auto f2 = boundary_trace(make_wolff_field(wolff, rho, tau, 0.8), *mesh);
  REQUIRE(f1.values == f2.values);
  CHECK(f1.log_scale != f2.log_scale);

  oracle.pair(f1);
  CHECK(oracle.solve_count() == 1);
  oracle.pair(f2);
  CHECK(oracle.solve_count() == 1);  // offset sweep hits the cache

  // A different frequency is a genuinely new profile.
  auto f3 = boundary_trace(make_wolff_field(wolff, rho, 0.7 * tau, 0.3), *mesh);
  oracle.pair(f3);
  CHECK(oracle.solve_count() == 2);
}

TEST_CASE("cache transparency: disabling the cache changes no returned value") {
  auto mesh = square_mesh(10);
  auto scene = disk_scene(mesh, {0.5, 0.5}, 0.25, 0.5, 1.5);
  DnOracle cached(scene);
  DnOracle uncached(scene);
  uncached.set_cache_enabled(false);

  auto wolff = std::make_shared<WolffSolution>(integrate_wolff(1.5));
  std::vector<BoundaryTrace> traces = {
      trace_from_function(*mesh, [](const Vec2& v) { return v.x - v.y; }),
      trace_from_function(*mesh, [](const Vec2& v) { return v.x * v.y + 0.3; }),
      boundary_trace(make_wolff_field(wolff, {0.0, 1.0}, 4.0, 0.5), *mesh),
  };
  for (const auto& f : traces) {
    CHECK(cached.pair(f) == uncached.pair(f));
    CHECK(cached.pair(f) == uncached.pair(f));  // repeat query, still identical
  }
  CHECK(cached.solve_count() == traces.size());
  CHECK(uncached.solve_count() == 2 * traces.size());
}

TEST_CASE("pairings: nonnegativity, homogeneous reference match, cross-pair identities") {
  auto mesh = square_mesh(10);
  const double p = 3.0;
  DnOracle oracle(disk_scene(mesh, {0.4, 0.6}, 0.2, 2.0, p));
  DnOracle homog(homogeneous_scene(mesh, p));
  DnOracle ref = DnOracle::reference(mesh, p);

  auto f = trace_from_function(*mesh, [](const Vec2& v) { return v.x + 0.5 * v.y; });
  auto g = trace_from_function(*mesh, [](const Vec2& v) { return std::sin(3.0 * v.x) - v.y; });

  CHECK(oracle.pair(f) >= 0.0);
  CHECK(oracle.pair(g) >= 0.0);

  // A scene with sigma == 1 painted by hand is the reference operator.
  CHECK(homog.pair(f) == doctest::Approx(ref.pair(f)).epsilon(1e-12));
  CHECK(homog.pair(g) == doctest::Approx(ref.pair(g)).epsilon(1e-12));

  // Cross pairing against a byte-identical copy collapses to the energy.
  BoundaryTrace f_copy = f;
  CHECK(oracle.pair(f, f_copy) == oracle.pair(f));

  // And the generic path agrees with the standalone pairing routine.
  SolverConfig config;
  config.p = p;
  const double standalone = dn_pairing(*mesh, oracle.scene().sigma, f, g, config);
  CHECK(oracle.pair(f, g) == doctest::Approx(standalone).epsilon(1e-12));

  // Localizing to every cell recovers the full pairing.
  std::vector<int> all_cells(mesh->cell_count());
  for (int i = 0; i < mesh->cell_count(); ++i) all_cells[i] = i;
  CHECK(oracle.localized_pair(f, all_cells) == doctest::Approx(oracle.pair(f)).epsilon(1e-13));

  // Localized contributions are nonnegative and monotone in the cell set.
  std::vector<int> half(all_cells.begin(), all_cells.begin() + mesh->cell_count() / 2);
  const double part = oracle.localized_pair(f, half);
  CHECK(part >= 0.0);
  CHECK(part <= oracle.localized_pair(f, all_cells));
}

TEST_CASE("deficit: sign follows the conductivity's side of 1") {
  auto mesh = square_mesh(12);
  const double p = 1.5;
  DnOracle ref = DnOracle::reference(mesh, p);
  DnOracle above(disk_scene(mesh, {0.5, 0.5}, 0.25, 3.0, p));
  DnOracle below(disk_scene(mesh, {0.5, 0.5}, 0.25, 0.4, p));
  DnOracle same(homogeneous_scene(mesh, p));

  auto wolff = std::make_shared<WolffSolution>(integrate_wolff(p));
  std::vector<BoundaryTrace> traces = {
      trace_from_function(*mesh, [](const Vec2& v) { return v.x; }),
      trace_from_function(*mesh, [](const Vec2& v) { return v.y - 0.2 * v.x; }),
      boundary_trace(make_wolff_field(wolff, normalized({1.0, 1.0}), 4.0, 0.5), *mesh),
  };
  for (const auto& f : traces) {
    const double scale = std::abs(ref.pair(f));
    CHECK(deficit(same, ref, f) == 0.0);  // identical solves, exactly zero
    CHECK(deficit(above, ref, f) >= -1e-9 * scale);
    CHECK(deficit(below, ref, f) <= 1e-9 * scale);
  }

  // Oracle compatibility is checked, not assumed.
  auto other_mesh = square_mesh(12);
  DnOracle foreign = DnOracle::reference(other_mesh, p);
  auto f = traces.front();
  CHECK_THROWS_AS(deficit(above, foreign, f), Error);
  DnOracle wrong_p = DnOracle::reference(mesh, 2.0);
  CHECK_THROWS_AS(deficit(above, wrong_p, f), Error);
}

TEST_CASE("preorder: background below a sigma >= 1 scene, witness against the reverse claim") {
  auto mesh = square_mesh(16);
  const double p = 3.0;
  DnOracle oracle(disk_scene(mesh, {0.5, 0.5}, 0.2, 2.0, p));
  DnOracle ref = DnOracle::reference(mesh, p);
  auto wolff = std::make_shared<WolffSolution>(integrate_wolff(p));
  auto dict = make_dictionary(*mesh, wolff);

  // Identical sides: consistent with a gap of exactly zero.
  auto self = preorder_test(dn_term(oracle), dn_term(oracle), dict, ref);
  CHECK(self.consistent);
  CHECK(self.worst.value == 0.0);

  // L_1 <= L_sigma holds over any dictionary when sigma >= 1.
  auto forward = preorder_test(dn_term(oracle), dn_term(ref), dict, ref);
  CHECK(forward.consistent);
  CHECK(forward.worst_ratio >= -1e-8);

  // The reverse claim is violated, and the witness gap replays bit-identically.
  auto reverse = preorder_test(dn_term(ref), dn_term(oracle), dict, ref);
  CHECK(!reverse.consistent);
  CHECK(reverse.worst_ratio < -1e-4);  // a real violation, far beyond the margin
  const BoundaryTrace& witness = dict[reverse.worst.index].trace;
  CHECK(dict[reverse.worst.index].id == reverse.worst.id);
  const double replay = dn_term(ref).evaluate(witness) - dn_term(oracle).evaluate(witness);
  CHECK(replay == reverse.worst.value);
}

TEST_CASE("preorder: consistency is dictionary-relative, growth can only break it") {
  auto mesh = square_mesh(32);
  const double p = 3.0;
  // Small inclusion far to the right; probes pointing left barely feel it.
  DnOracle oracle(disk_scene(mesh, {0.85, 0.5}, 0.1, 2.0, p));
  DnOracle ref = DnOracle::reference(mesh, p);
  auto wolff = std::make_shared<WolffSolution>(integrate_wolff(p));

  const Vec2 away{-1.0, 0.0};
  const double tau = probe_frequencies(*mesh, away).back();
  std::vector<DictionaryEntry> small_dict = {
      {"far_probe", boundary_trace(make_wolff_field(wolff, away, tau, 0.25), *mesh)}};

  // The claim L_1 >= L_sigma is false, but the far probe cannot tell.
  auto lhs = dn_term(ref);
  auto rhs = dn_term(oracle);
  auto blind = preorder_test(lhs, rhs, small_dict, ref);
  CHECK(blind.consistent);

  std::vector<DictionaryEntry> grown = small_dict;
  grown.push_back({"affine_x", trace_from_function(*mesh, [](const Vec2& v) { return v.x; })});
  auto seen = preorder_test(lhs, rhs, grown, ref);
  CHECK(!seen.consistent);
  CHECK(seen.worst.id == "affine_x");
  CHECK(seen.worst_ratio <= blind.worst_ratio);

  // Empty dictionaries are rejected rather than silently consistent.
  CHECK_THROWS_AS(preorder_test(lhs, rhs, {}, ref), Error);
}

TEST_CASE("dictionary: composition, determinism, and mesh fit") {
  auto mesh = square_mesh(16);
  auto wolff = std::make_shared<WolffSolution>(integrate_wolff(2.0));
  auto dict = make_dictionary(*mesh, wolff);

  DictionaryOptions opts;
  CHECK(static_cast<int>(dict.size()) ==
        opts.directions * opts.tau_count * opts.offsets + 4 + opts.random_profiles);

  std::set<std::string> ids;
  for (const auto& e : dict) {
    ids.insert(e.id);
    CHECK(e.trace.mesh_id == mesh->id);
    CHECK(static_cast<int>(e.trace.values.size()) == mesh->boundary_count());
    double m = 0.0;
    for (double v : e.trace.values) m = std::max(m, std::abs(v));
    CHECK(m == 1.0);  // sup-normalized
  }
  CHECK(ids.size() == dict.size());

  auto again = make_dictionary(*mesh, wolff);
  for (std::size_t i = 0; i < dict.size(); ++i) {
    CHECK(again[i].id == dict[i].id);
    CHECK(again[i].trace.values == dict[i].trace.values);
  }

  DictionaryOptions reseeded;
  reseeded.seed = 1;
  auto other = make_dictionary(*mesh, wolff, reseeded);
  bool any_difference = false;
  for (std::size_t i = 0; i < dict.size(); ++i)
    if (other[i].trace.values != dict[i].trace.values) any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("probe frequencies: spacing, resolution cap, coarse-mesh rejection") {
  auto mesh = square_mesh(16);
  const Vec2 rho{1.0, 0.0};
  auto taus = probe_frequencies(*mesh, rho);
  REQUIRE(taus.size() == 6);
  CHECK(taus.front() == doctest::Approx(4.0));
  for (std::size_t i = 1; i < taus.size(); ++i) CHECK(taus[i] > taus[i - 1]);
  CHECK(taus.back() * mesh->h_max <= 0.5 + 1e-12);

  // Diagonal probes scale with the direction's extent.
  auto diag = probe_frequencies(*mesh, normalized({1.0, 1.0}));
  CHECK(diag.front() == doctest::Approx(4.0 / std::sqrt(2.0)));

  auto coarse = square_mesh(4);
  CHECK_THROWS_AS(probe_frequencies(*coarse, rho), Error);
  CHECK_THROWS_AS(probe_frequencies(*mesh, rho, 1), Error);
}

TEST_CASE("measurement dump: one row per dictionary entry, full precision") {
  auto mesh = square_mesh(16);
  DnOracle oracle(disk_scene(mesh, {0.5, 0.5}, 0.2, 2.0, 2.0));
  auto wolff = std::make_shared<WolffSolution>(integrate_wolff(2.0));
  DictionaryOptions opts;
  opts.directions = 2;
  opts.tau_count = 2;
  opts.offsets = 1;
  opts.random_profiles = 2;
  auto dict = make_dictionary(*mesh, wolff, opts);

  std::ostringstream out;
  dump_measurements(oracle, dict, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "trace_id,value,log_scale");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    REQUIRE(c1 != std::string::npos);
    REQUIRE(c2 != std::string::npos);
    const std::string id = line.substr(0, c1);
    const double value = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    const double ls = std::stod(line.substr(c2 + 1));
    CHECK(id == dict[rows].id);
    CHECK(value == oracle.pair(dict[rows].trace));  // %.17g rows round-trip exactly
    CHECK(ls == dict[rows].trace.log_scale);
    ++rows;
  }
  CHECK(rows == dict.size());
}
