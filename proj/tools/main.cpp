#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "pcond/errors.hpp"
#include "runners.hpp"

namespace {

const char* category_name(pcond::ErrorCategory category) {
  switch (category) {
    case pcond::ErrorCategory::config: return "config";
    case pcond::ErrorCategory::geometry: return "geometry";
    case pcond::ErrorCategory::solver: return "solver";
    case pcond::ErrorCategory::inconclusive: return "inconclusive";
  }
  return "unknown";
}

void add_scene_out(CLI::App* cmd, std::string& scene, std::string& out) {
  cmd->add_option("--scene", scene, "Scene JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", out, "Output directory for the run artifacts")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inclusion detection and boundary determination for the p-conductivity equation"};
  app.require_subcommand(1);

  pcond::cli::SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve one Dirichlet problem and dump the vertex field");
  add_scene_out(solve, solve_args.scene_path, solve_args.out_dir);
  solve->add_option("--affine", solve_args.affine, "Boundary data direction dx,dy for f(x) = d.x")
      ->delimiter(',')
      ->expected(2);
  solve->add_flag("--svg", solve_args.svg, "Also write an SVG scene overlay");

  pcond::cli::WolffArgs wolff_args;
  auto* wolff = app.add_subcommand("wolff", "Integrate the oscillatory profile for one exponent p");
  wolff->add_option("--out", wolff_args.out_dir, "Output directory")->required();
  wolff->add_option("--p", wolff_args.p, "Exponent p > 1")->required();
  wolff->add_option("--samples", wolff_args.samples, "Uniform resampling density")
      ->check(CLI::PositiveNumber);

  pcond::cli::EnclosureArgs enclosure_args;
  auto* enclosure =
      app.add_subcommand("enclosure", "Reconstruct the inclusion hull from half-space probes");
  add_scene_out(enclosure, enclosure_args.scene_path, enclosure_args.out_dir);
  enclosure->add_option("--directions", enclosure_args.directions, "Probe directions (default 16)");
  enclosure->add_option("--tolerance", enclosure_args.tolerance,
                        "Bisection bracket width (default: half a mesh width)");
  enclosure->add_option("--tau-schedule", enclosure_args.tau_schedule,
                        "Explicit comma-separated frequency schedule")
      ->delimiter(',');
  enclosure->add_flag("--svg", enclosure_args.svg, "Also write an SVG overlay");

  pcond::cli::ScanArgs scan_args;
  auto* scan =
      app.add_subcommand("monotonicity", "Mark inclusion regions with localized comparison tests");
  add_scene_out(scan, scan_args.scene_path, scan_args.out_dir);
  scan->add_option("--alpha-schedule", scan_args.alpha_schedule,
                   "Comma-separated contrast levels to try (descending attempts)")
      ->delimiter(',');
  scan->add_option("--stride", scan_args.stride, "Cell stride between ball centers (default 2)");
  scan->add_option("--radius", scan_args.radius, "Ball radius in cell widths (default 2)");
  scan->add_option("--sign", scan_args.sign, "Test family: auto, plus, or minus");
  scan->add_option("--seed", scan_args.seed, "Seed for the randomized dictionary profiles");
  scan->add_flag("--svg", scan_args.svg, "Also write an SVG overlay");

  pcond::cli::BoundaryArgs boundary_args;
  auto* boundary =
      app.add_subcommand("boundary", "Recover the conductivity at boundary points by bisection");
  add_scene_out(boundary, boundary_args.scene_path, boundary_args.out_dir);
  boundary->add_option("--points", boundary_args.points, "Semicolon-separated points x,y;x,y;...")
      ->required();
  boundary->add_option("--tolerance", boundary_args.tolerance,
                       "Final comparison bracket width (default 0.01)");
  boundary->add_option("--inset", boundary_args.inset,
                       "Probe offset inside the supporting half-space, as a fraction of the "
                       "extent (default 0.05)");
  boundary->add_option("--gamma-low", boundary_args.gamma_low, "Initial bracket low end");
  boundary->add_option("--gamma-high", boundary_args.gamma_high, "Initial bracket high end");
  boundary->add_option("--tau-schedule", boundary_args.tau_schedule,
                       "Explicit comma-separated frequency schedule")
      ->delimiter(',');

  pcond::cli::CompareArgs compare_args;
  auto* compare =
      app.add_subcommand("compare", "Run both reconstructions and compare the recovered hulls");
  add_scene_out(compare, compare_args.scene_path, compare_args.out_dir);
  compare->add_option("--directions", compare_args.directions, "Half-space probe directions");
  compare->add_option("--tolerance", compare_args.tolerance, "Half-space bisection tolerance");
  compare->add_option("--alpha-schedule", compare_args.alpha_schedule, "Contrast levels")
      ->delimiter(',');
  compare->add_option("--stride", compare_args.stride, "Ball grid stride");
  compare->add_option("--radius", compare_args.radius, "Ball radius in cell widths");
  compare->add_option("--seed", compare_args.seed, "Dictionary seed");
  compare->add_flag("--svg", compare_args.svg, "Also write an SVG overlay");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad command lines are config errors
  }

  try {
    if (solve->parsed()) pcond::cli::run_solve(solve_args);
    if (wolff->parsed()) pcond::cli::run_wolff(wolff_args);
    if (enclosure->parsed()) pcond::cli::run_enclosure(enclosure_args);
    if (scan->parsed()) pcond::cli::run_scan(scan_args);
    if (boundary->parsed()) pcond::cli::run_boundary(boundary_args);
    if (compare->parsed()) pcond::cli::run_compare(compare_args);
  } catch (const pcond::Error& e) {
    std::cerr << "error (" << category_name(e.category()) << "): " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
