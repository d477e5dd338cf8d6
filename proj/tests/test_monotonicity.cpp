#include "pcond/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "pcond/errors.hpp"

using namespace pcond;

namespace {

std::shared_ptr<const TriMesh> square_mesh(int n) {
  return std::make_shared<TriMesh>(build_mesh(DomainSpec::unit_square(), n));
}

std::vector<DictionaryEntry> small_dictionary(const TriMesh& mesh, double p) {
  DictionaryOptions options;
  options.directions = 8;
  options.random_profiles = 4;
  return make_dictionary(mesh, std::make_shared<WolffSolution>(integrate_wolff(p)), options);
}

TestRegion ball_at(const TriMesh& mesh, Vec2 center, double radius) {
  TestRegion region;
  region.center = center;
  region.radius = radius;
  for (int j = 0; j < mesh.cell_count(); ++j)
    if (dist(mesh.cell_centroid[j], center) <= radius) region.cells.push_back(j);
  return region;
}

}  // namespace

TEST_CASE("alpha_tilde: closed forms, range and monotonicity") {
  CHECK(alpha_tilde(2.0, 1.0) == 0.5);
  CHECK(alpha_tilde(2.0, 3.0) == 0.75);
  CHECK(alpha_tilde(3.0, 7.0) == doctest::Approx(2.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-14));
  // p = 2 collapses to alpha / (1 + alpha).
  for (double a : {0.1, 0.5, 2.0, 9.0})
    CHECK(alpha_tilde(2.0, a) == doctest::Approx(a / (1.0 + a)).epsilon(1e-14));

  for (double p : {1.5, 2.0, 3.0, 4.5}) {
    double prev = 0.0;
    for (double a : {0.125, 0.25, 0.5, 1.0, 2.0, 8.0, 64.0}) {
      const double v = alpha_tilde(p, a);
      CHECK(v > 0.0);
      CHECK(v < p - 1.0);
      CHECK(v > prev);  // strictly increasing in the contrast
      prev = v;
    }
  }

  CHECK_THROWS_AS(alpha_tilde(1.0, 0.5), Error);
  CHECK_THROWS_AS(alpha_tilde(2.0, 0.0), Error);
  CHECK_THROWS_AS(alpha_tilde(2.0, -0.5), Error);
}

TEST_CASE("ball grid: strided centers collecting nearby cells") {
  auto mesh = square_mesh(16);
  auto grid = make_ball_grid(*mesh, 4, 2.0);
  REQUIRE(grid.size() == static_cast<std::size_t>((mesh->cell_count() + 3) / 4));

  const double radius = 2.0 * mesh->h_max;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const TestRegion& region = grid[r];
    CHECK(region.radius == radius);
    CHECK(region.center.x == mesh->cell_centroid[4 * r].x);
    CHECK(region.center.y == mesh->cell_centroid[4 * r].y);
    REQUIRE(!region.cells.empty());
    // The anchor cell always belongs to its own ball.
    CHECK(std::find(region.cells.begin(), region.cells.end(), static_cast<int>(4 * r)) !=
          region.cells.end());
    int prev = -1;
    for (int c : region.cells) {
      CHECK(c > prev);
      prev = c;
      CHECK(dist(mesh->cell_centroid[c], region.center) <= radius * (1.0 + 1e-12));
    }
  }

  CHECK(make_ball_grid(*mesh, 1, 2.0).size() == static_cast<std::size_t>(mesh->cell_count()));
  CHECK_THROWS_AS(make_ball_grid(*mesh, 0, 2.0), Error);
  CHECK_THROWS_AS(make_ball_grid(*mesh, 2, 0.0), Error);
}

TEST_CASE("plus test: marks inside the inclusion, soundly rejects outside") {
  auto mesh = square_mesh(32);
  for (double p : {2.0, 3.0}) {
    auto dict = small_dictionary(*mesh, p);
    DnOracle ref = DnOracle::reference(mesh, p);
    DnOracle high(paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 2.0}}, p));

    const double radius = 2.0 * mesh->h_max;
    auto inside = ball_at(*mesh, {0.5, 0.5}, radius);
    auto outside = ball_at(*mesh, {0.85, 0.15}, radius);

    for (double alpha : {0.125, 1.0}) {
      RegionTest in = test_region_plus(high, ref, inside, alpha, dict);
      CHECK(in.marked);
      CHECK(in.worst_ratio > 0.0);
      CHECK(in.direction == TestDirection::plus);
      CHECK(in.alpha == alpha);
    }
    // Marking is dictionary-relative: boundary probes cannot pin energy onto
    // a deep interior ball, so an over-ambitious contrast still "marks" here.
    CHECK(test_region_plus(high, ref, inside, 3.0, dict).marked);

    RegionTest out = test_region_plus(high, ref, outside, 0.125, dict);
    CHECK_FALSE(out.marked);
    CHECK(out.worst_ratio < -1e-3);
    CHECK(out.witness.value < 0.0);
    CHECK(out.witness.scale > 0.0);
    // The separating witness is an oscillatory probe aimed at the ball.
    CHECK(out.witness.id.substr(0, 5) == "wolff");

    // Replays are bit-identical: same witness, same numbers.
    RegionTest again = test_region_plus(high, ref, outside, 0.125, dict);
    CHECK(again.witness.index == out.witness.index);
    CHECK(again.witness.value == out.witness.value);
    CHECK(again.worst_ratio == out.worst_ratio);
  }
}

TEST_CASE("minus test: mirror behavior for conductivity below one") {
  auto mesh = square_mesh(32);
  const double p = 2.0;
  auto dict = small_dictionary(*mesh, p);
  DnOracle ref = DnOracle::reference(mesh, p);
  DnOracle low(paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 0.5}}, p));
  DnOracle high(paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 2.0}}, p));

  const double radius = 2.0 * mesh->h_max;
  auto inside = ball_at(*mesh, {0.5, 0.5}, radius);
  auto outside = ball_at(*mesh, {0.85, 0.15}, radius);

  for (double alpha : {0.125, 0.5}) CHECK(test_region_minus(low, ref, inside, alpha, dict).marked);

  RegionTest out = test_region_minus(low, ref, outside, 0.125, dict);
  CHECK_FALSE(out.marked);
  CHECK(out.worst_ratio < -1e-3);

  // Each test only accepts its own sign of contrast.
  CHECK_FALSE(test_region_plus(low, ref, inside, 0.125, dict).marked);
  CHECK_FALSE(test_region_minus(high, ref, inside, 0.125, dict).marked);
}

TEST_CASE("region tests: homogeneous scenes never mark") {
  auto mesh = square_mesh(32);
  const double p = 2.0;
  auto dict = small_dictionary(*mesh, p);
  DnOracle ref = DnOracle::reference(mesh, p);
  DnOracle same(make_scene(mesh, std::vector<double>(mesh->cell_count(), 1.0), p));

  auto ball = ball_at(*mesh, {0.5, 0.5}, 2.0 * mesh->h_max);
  CHECK_FALSE(test_region_plus(same, ref, ball, 0.25, dict).marked);
  CHECK_FALSE(test_region_minus(same, ref, ball, 0.25, dict).marked);
}

TEST_CASE("region tests: input validation") {
  auto mesh = square_mesh(16);
  const double p = 2.0;
  auto dict = small_dictionary(*mesh, p);
  DnOracle ref = DnOracle::reference(mesh, p);
  DnOracle high(paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 2.0}}, p));
  auto ball = ball_at(*mesh, {0.5, 0.5}, 2.0 * mesh->h_max);

  TestRegion empty;
  CHECK_THROWS_AS(test_region_plus(high, ref, empty, 0.5, dict), Error);

  TestRegion unsorted = ball;
  std::swap(unsorted.cells.front(), unsorted.cells.back());
  CHECK_THROWS_AS(test_region_plus(high, ref, unsorted, 0.5, dict), Error);

  TestRegion out_of_range = ball;
  out_of_range.cells.push_back(mesh->cell_count() + 7);
  CHECK_THROWS_AS(test_region_plus(high, ref, out_of_range, 0.5, dict), Error);

  CHECK_THROWS_AS(test_region_plus(high, ref, ball, 0.0, dict), Error);
  CHECK_THROWS_AS(test_region_minus(high, ref, ball, -1.0, dict), Error);

  DnOracle other_p(paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 2.0}}, 3.0));
  CHECK_THROWS_AS(test_region_plus(other_p, ref, ball, 0.5, dict), Error);
}

TEST_CASE("scan: covers the inclusion, marks nothing far outside") {
  auto mesh = square_mesh(32);
  const double p = 2.0;
  auto dict = small_dictionary(*mesh, p);
  DnOracle ref = DnOracle::reference(mesh, p);
  DnOracle high(paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 2.0}}, p));

  auto grid = make_ball_grid(*mesh, 8, 2.0);
  ScanReport report = scan(high, ref, grid, dict);

  CHECK(report.inclusion_found);
  CHECK(report.sign_class == SignClass::geq1);
  REQUIRE(report.verdicts.size() == grid.size());
  REQUIRE(!report.marked_cells.empty());

  auto painted = convex_hull_of_cells(*mesh, discrete_support_set(high.scene()));
  int marked_count = 0;
  for (const auto& v : report.verdicts) {
    if (!v.marked) continue;
    ++marked_count;
    CHECK(v.direction == TestDirection::plus);
    // No false positives: marked centers hug the inclusion.
    CHECK(distance_to_hull(v.center, painted) <= v.radius + 2.0 * mesh->h_max);
  }
  CHECK(marked_count >= 10);

  // A ball centered on the inclusion marks at the top of the schedule.
  bool saw_deep = false;
  for (const auto& v : report.verdicts)
    if (v.marked && dist(v.center, {0.5, 0.5}) < 0.05) {
      CHECK(v.alpha == 1.0);
      saw_deep = true;
    }
  CHECK(saw_deep);

  // The marked union stays a faithful cover: its hull tracks the painted
  // hull to within the ball radius plus a couple of cells.
  REQUIRE(!report.hull.empty());
  CHECK(hausdorff_distance(report.hull, painted) <= 2.0 * mesh->h_max + 2.0 * mesh->h_max + 0.01);

  // The cell under the inclusion center is part of the marked union.
  int deep_cell = 0;
  double best = 1e30;
  for (int c = 0; c < mesh->cell_count(); ++c) {
    const double d = dist(mesh->cell_centroid[c], {0.5, 0.5});
    if (d < best) {
      best = d;
      deep_cell = c;
    }
  }
  CHECK(std::binary_search(report.marked_cells.begin(), report.marked_cells.end(), deep_cell));

  // Unmarked verdicts carry the rejection at the bottom of the schedule, and
  // replaying that exact test reproduces the witness bit for bit.
  bool replayed = false;
  for (const auto& v : report.verdicts) {
    if (v.marked) continue;
    CHECK(v.alpha == 0.125);
    if (!replayed) {
      const TestRegion& region = grid[v.region_index];
      RegionTest replay = v.direction == TestDirection::plus
                              ? test_region_plus(high, ref, region, v.alpha, dict)
                              : test_region_minus(high, ref, region, v.alpha, dict);
      CHECK_FALSE(replay.marked);
      CHECK(replay.witness.index == v.witness.index);
      CHECK(replay.witness.id == v.witness.id);
      CHECK(replay.witness.value == v.witness.value);
      CHECK(replay.witness.scale == v.witness.scale);
      CHECK(replay.worst_ratio == v.worst_ratio);
      replayed = true;
    }
  }
  CHECK(replayed);

  // Determinism: a rerun reproduces every verdict exactly.
  ScanReport again = scan(high, ref, grid, dict);
  REQUIRE(again.verdicts.size() == report.verdicts.size());
  for (std::size_t r = 0; r < report.verdicts.size(); ++r) {
    CHECK(again.verdicts[r].marked == report.verdicts[r].marked);
    CHECK(again.verdicts[r].alpha == report.verdicts[r].alpha);
    CHECK(again.verdicts[r].worst_ratio == report.verdicts[r].worst_ratio);
  }
  CHECK(again.marked_cells == report.marked_cells);
}

TEST_CASE("scan: contrast below one is found by the minus pass") {
  auto mesh = square_mesh(32);
  const double p = 2.0;
  auto dict = small_dictionary(*mesh, p);
  DnOracle ref = DnOracle::reference(mesh, p);
  DnOracle low(paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 0.5}}, p));

  auto grid = make_ball_grid(*mesh, 16, 2.0);
  ScanReport report = scan(low, ref, grid, dict);
  CHECK(report.inclusion_found);
  CHECK(report.sign_class == SignClass::leq1);
  for (const auto& v : report.verdicts)
    if (v.marked) CHECK(v.direction == TestDirection::minus);

  // Forcing the wrong sign finds nothing.
  ScanOptions plus_only;
  plus_only.sign = ScanSign::plus;
  ScanReport empty = scan(low, ref, grid, dict, plus_only);
  CHECK_FALSE(empty.inclusion_found);
  CHECK(empty.sign_class == SignClass::homogeneous);
  CHECK(empty.hull.empty());
}

TEST_CASE("scan: homogeneous scene yields an empty report") {
  auto mesh = square_mesh(32);
  const double p = 2.0;
  auto dict = small_dictionary(*mesh, p);
  DnOracle ref = DnOracle::reference(mesh, p);
  DnOracle same(make_scene(mesh, std::vector<double>(mesh->cell_count(), 1.0), p));

  ScanReport report = scan(same, ref, make_ball_grid(*mesh, 32, 2.0), dict);
  CHECK_FALSE(report.inclusion_found);
  CHECK(report.sign_class == SignClass::homogeneous);
  CHECK(report.marked_cells.empty());
  CHECK(report.hull.empty());
  for (const auto& v : report.verdicts) {
    CHECK_FALSE(v.marked);
    CHECK(v.witness.scale > 0.0);
  }
}

TEST_CASE("scan: configuration validation") {
  auto mesh = square_mesh(16);
  const double p = 2.0;
  auto dict = small_dictionary(*mesh, p);
  DnOracle ref = DnOracle::reference(mesh, p);
  DnOracle high(paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 2.0}}, p));
  auto grid = make_ball_grid(*mesh, 32, 2.0);

  CHECK_THROWS_AS(scan(high, ref, {}, dict), Error);
  CHECK_THROWS_AS(scan(high, ref, grid, {}), Error);

  ScanOptions bad_schedule;
  bad_schedule.alpha_schedule = {};
  CHECK_THROWS_AS(scan(high, ref, grid, dict, bad_schedule), Error);
  bad_schedule.alpha_schedule = {0.5, -0.25};
  CHECK_THROWS_AS(scan(high, ref, grid, dict, bad_schedule), Error);

  ScanOptions bad_margin;
  bad_margin.margin = -1.0;
  CHECK_THROWS_AS(scan(high, ref, grid, dict, bad_margin), Error);
}
