#include "runners.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "pcond/boundary.hpp"
#include "pcond/csv.hpp"
#include "pcond/dnmap.hpp"
#include "pcond/enclosure.hpp"
#include "pcond/errors.hpp"
#include "pcond/monotonicity.hpp"
#include "pcond/psolver.hpp"
#include "pcond/scene_io.hpp"
#include "pcond/trace.hpp"
#include "pcond/wolff.hpp"
#include "svg.hpp"

namespace pcond::cli {
namespace {

using json = nlohmann::ordered_json;

class WallTimer {
 public:
  double ms() const {
    auto now = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(now - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string artifact_path(const std::string& out_dir, const std::string& name) {
  return (std::filesystem::path(out_dir) / name).string();
}

void prepare_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) fail_config("--out directory is required");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail_config("cannot create output directory \"" + out_dir + "\": " + ec.message());
}

struct LoadedScene {
  SceneFile file;
  ConductivityScene scene;
};

LoadedScene load(const std::string& scene_path) {
  LoadedScene loaded;
  loaded.file = load_scene_file(scene_path);
  loaded.scene = build_scene(loaded.file);
  return loaded;
}

json scene_summary(const std::string& scene_path, const LoadedScene& loaded) {
  const TriMesh& mesh = *loaded.scene.mesh;
  json j;
  j["path"] = scene_path;
  j["p"] = loaded.scene.p;
  j["resolution"] = loaded.file.resolution;
  j["inclusions"] = loaded.file.inclusions.size();
  j["sign_class"] = to_string(loaded.scene.sign_class);
  j["vertices"] = mesh.vertex_count();
  j["cells"] = mesh.cell_count();
  j["h_max"] = mesh.h_max;
  return j;
}

void save_summary(const json& summary, const std::string& out_dir) {
  std::string path = artifact_path(out_dir, "summary.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_config("cannot open \"" + path + "\" for writing");
  out << summary.dump(2) << '\n';
  out.flush();
  if (!out) fail_config("write to \"" + path + "\" failed");
}

void save_hull_csv(const HullPolygon& hull, const std::string& path) {
  CsvTable table;
  table.header = {"x", "y"};
  for (const Vec2& v : hull.vertices)
    table.add_row({format_double(v.x), format_double(v.y)});
  save_csv(table, path);
}

std::vector<Vec2> boundary_loop_points(const TriMesh& mesh) {
  std::vector<Vec2> loop;
  loop.reserve(mesh.boundary_loop.size());
  for (int v : mesh.boundary_loop) loop.push_back(mesh.vertices[v]);
  return loop;
}

SvgCanvas scene_canvas(const ConductivityScene& scene) {
  const TriMesh& mesh = *scene.mesh;
  auto [lo_x, hi_x] = mesh.extent({1.0, 0.0});
  auto [lo_y, hi_y] = mesh.extent({0.0, 1.0});
  SvgCanvas canvas({lo_x, lo_y}, {hi_x, hi_y});
  for (int c = 0; c < mesh.cell_count(); ++c) {
    if (scene.sigma[c] == 1.0) continue;
    const auto& cell = mesh.cells[c];
    std::vector<Vec2> tri{mesh.vertices[cell[0]], mesh.vertices[cell[1]], mesh.vertices[cell[2]]};
    canvas.add_polygon(tri, scene.sigma[c] > 1.0 ? "#e07050" : "#5580d5", "none", 0.0, 0.55);
  }
  canvas.add_polyline(boundary_loop_points(mesh), true, "black", 1.5);
  return canvas;
}

std::vector<Vec2> parse_points_arg(const std::string& text) {
  std::vector<Vec2> points;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ';')) {
    if (item.empty()) continue;
    std::istringstream cell(item);
    double x = 0.0, y = 0.0;
    char comma = '\0';
    if (!(cell >> x >> comma >> y) || comma != ',' || (cell >> std::ws, !cell.eof()))
      fail_config("boundary: cannot parse point \"" + item + "\" (expected x,y)");
    points.push_back({x, y});
  }
  if (points.empty()) fail_config("boundary: --points lists no points");
  return points;
}

std::shared_ptr<const WolffSolution> wolff_for(double p) {
  return std::make_shared<const WolffSolution>(integrate_wolff(p));
}

}  // namespace

void run_solve(const SolveArgs& args) {
  WallTimer timer;
  if (args.affine.size() != 2)
    fail_config("solve: --affine needs exactly two numbers dx,dy");
  prepare_out_dir(args.out_dir);
  LoadedScene loaded = load(args.scene_path);
  const TriMesh& mesh = *loaded.scene.mesh;

  Vec2 direction{args.affine[0], args.affine[1]};
  BoundaryTrace f =
      trace_from_function(mesh, [&](const Vec2& x) { return dot(direction, x); });

  SolverConfig config;
  config.p = loaded.scene.p;
  PSolver solver(loaded.scene.mesh, loaded.scene.sigma, config);
  DiscreteSolution solution = solver.solve(f);

  // The solver works on the sup-normalized trace; rescale back to the
  // requested boundary data.
  double amplitude = std::exp(f.log_scale);
  CsvTable table;
  table.header = {"vertex", "x", "y", "value"};
  for (int v = 0; v < mesh.vertex_count(); ++v)
    table.add_row({std::to_string(v), format_double(mesh.vertices[v].x),
                   format_double(mesh.vertices[v].y),
                   format_double(solution.values[v] * amplitude)});
  save_csv(table, artifact_path(args.out_dir, "solution.csv"));

  if (args.svg) scene_canvas(loaded.scene).save(artifact_path(args.out_dir, "overlay.svg"));

  json summary;
  summary["command"] = "solve";
  summary["scene"] = scene_summary(args.scene_path, loaded);
  summary["affine"] = {direction.x, direction.y};
  summary["energy"] = solution.energy * std::pow(amplitude, loaded.scene.p);
  summary["iterations"] = solution.iterations;
  summary["residual_norm"] = solution.residual_norm;
  summary["solver_calls"] = 1;
  summary["wall_ms"] = timer.ms();
  save_summary(summary, args.out_dir);
}

void run_wolff(const WolffArgs& args) {
  WallTimer timer;
  prepare_out_dir(args.out_dir);
  WolffSolution solution = integrate_wolff(args.p, 1.0, 0.0, 1e-12, args.samples);

  CsvTable table;
  table.header = {"s", "w", "dw"};
  for (int i = 0; i < solution.sample_count(); ++i) {
    double s = solution.lambda_p * i / solution.sample_count();
    table.add_row({format_double(s), format_double(solution.w[i]), format_double(solution.dw[i])});
  }
  save_csv(table, artifact_path(args.out_dir, "profile.csv"));

  json summary;
  summary["command"] = "wolff";
  summary["p"] = args.p;
  summary["period"] = solution.lambda_p;
  summary["c_emp"] = solution.c_emp;
  summary["C_emp"] = solution.C_emp;
  summary["samples"] = solution.sample_count();
  summary["wall_ms"] = timer.ms();
  save_summary(summary, args.out_dir);
}

namespace {

void write_enclosure_artifacts(const EnclosureReport& report, const std::string& out_dir,
                               const std::string& hull_name = "hull.csv") {
  CsvTable support;
  support.header = {"rho_x",  "rho_y",  "status",     "h_est",
                    "t_low",  "t_high", "blowup_pos", "blowup_neg"};
  for (std::size_t i = 0; i < report.estimates.size(); ++i) {
    const SupportEstimate& est = report.estimates[i];
    support.add_row({format_double(est.rho.x), format_double(est.rho.y), report.status[i],
                     format_double(est.h_est), format_double(est.t_low),
                     format_double(est.t_high), std::to_string(est.blowup_pos),
                     std::to_string(est.blowup_neg)});
  }
  save_csv(support, artifact_path(out_dir, "support.csv"));
  save_hull_csv(report.hull, artifact_path(out_dir, hull_name));

  CsvTable indicators;
  indicators.header = {"rho_x", "rho_y", "t",           "tau",
                       "sign",  "class", "fitted_slope", "log_magnitude"};
  for (const SupportEstimate& est : report.estimates) {
    for (std::size_t k = 0; k < est.trace.size(); ++k) {
      const IndicatorCurve& curve = est.trace[k];
      const char* cls = to_string(est.trace_class[k]);
      for (const IndicatorSample& sample : curve.samples)
        indicators.add_row({format_double(est.rho.x), format_double(est.rho.y),
                            format_double(curve.t), format_double(sample.tau),
                            std::to_string(sample.sign), cls,
                            format_double(curve.fitted_slope),
                            format_double(sample.log_magnitude)});
    }
  }
  save_csv(indicators, artifact_path(out_dir, "indicators.csv"));
}

json enclosure_summary_block(const EnclosureReport& report) {
  json j;
  j["verdict"] = to_string(report.verdict);
  j["sign_class"] = to_string(report.sign_class);
  j["hull_vertices"] = report.hull.vertices.size();
  j["hull_area"] = report.hull.empty() ? 0.0 : polygon_area(report.hull.vertices);
  j["status"] = report.status;
  return j;
}

void write_scan_artifacts(const ScanReport& report, const std::string& out_dir,
                          const std::string& hull_name = "hull.csv") {
  CsvTable balls;
  balls.header = {"index",      "center_x",   "center_y",   "radius",
                  "marked",     "alpha",      "direction",  "worst_ratio",
                  "witness_id", "witness_value", "witness_scale"};
  for (const RegionVerdict& v : report.verdicts)
    balls.add_row({std::to_string(v.region_index), format_double(v.center.x),
                   format_double(v.center.y), format_double(v.radius), v.marked ? "1" : "0",
                   format_double(v.alpha), to_string(v.direction), format_double(v.worst_ratio),
                   v.witness.id, format_double(v.witness.value),
                   format_double(v.witness.scale)});
  save_csv(balls, artifact_path(out_dir, "balls.csv"));
  save_hull_csv(report.hull, artifact_path(out_dir, hull_name));
}

json scan_summary_block(const ScanReport& report) {
  std::size_t marked = 0;
  for (const RegionVerdict& v : report.verdicts)
    if (v.marked) ++marked;
  json j;
  j["inclusion_found"] = report.inclusion_found;
  j["sign_class"] = to_string(report.sign_class);
  j["regions"] = report.verdicts.size();
  j["marked_regions"] = marked;
  j["marked_cells"] = report.marked_cells.size();
  j["hull_vertices"] = report.hull.vertices.size();
  j["hull_area"] = report.hull.empty() ? 0.0 : polygon_area(report.hull.vertices);
  return j;
}

ScanSign parse_sign(const std::string& sign) {
  if (sign == "auto") return ScanSign::automatic;
  if (sign == "plus") return ScanSign::plus;
  if (sign == "minus") return ScanSign::minus;
  fail_config("scan: --sign must be auto, plus, or minus (got \"" + sign + "\")");
}

void add_hull_overlay(SvgCanvas& canvas, const HullPolygon& hull, const std::string& color) {
  if (!hull.empty()) canvas.add_polyline(hull.vertices, true, color, 2.0);
}

}  // namespace

void run_enclosure(const EnclosureArgs& args) {
  WallTimer timer;
  prepare_out_dir(args.out_dir);
  LoadedScene loaded = load(args.scene_path);
  auto wolff = wolff_for(loaded.scene.p);

  DnOracle oracle(loaded.scene);
  DnOracle reference = DnOracle::reference(loaded.scene.mesh, loaded.scene.p);

  EnclosureOptions options;
  options.tolerance = args.tolerance;
  options.tau_override = args.tau_schedule;
  EnclosureReport report =
      reconstruct_hull(oracle, reference, wolff, default_directions(args.directions), options);

  write_enclosure_artifacts(report, args.out_dir);
  if (args.svg) {
    SvgCanvas canvas = scene_canvas(loaded.scene);
    add_hull_overlay(canvas, report.hull, "#107030");
    canvas.save(artifact_path(args.out_dir, "overlay.svg"));
  }

  json summary;
  summary["command"] = "enclosure";
  summary["scene"] = scene_summary(args.scene_path, loaded);
  summary["directions"] = args.directions;
  summary["enclosure"] = enclosure_summary_block(report);
  summary["solver_calls"] = {{"sigma", oracle.solve_count()},
                             {"reference", reference.solve_count()}};
  summary["wall_ms"] = timer.ms();
  save_summary(summary, args.out_dir);
}

void run_scan(const ScanArgs& args) {
  WallTimer timer;
  prepare_out_dir(args.out_dir);
  LoadedScene loaded = load(args.scene_path);
  auto wolff = wolff_for(loaded.scene.p);

  DnOracle oracle(loaded.scene);
  DnOracle reference = DnOracle::reference(loaded.scene.mesh, loaded.scene.p);

  DictionaryOptions dict_options;
  dict_options.seed = args.seed;
  auto dictionary = make_dictionary(*loaded.scene.mesh, wolff, dict_options);
  auto grid = make_ball_grid(*loaded.scene.mesh, args.stride, args.radius);

  ScanOptions options;
  options.alpha_schedule = args.alpha_schedule;
  options.sign = parse_sign(args.sign);
  ScanReport report = scan(oracle, reference, grid, dictionary, options);

  write_scan_artifacts(report, args.out_dir);
  if (args.svg) {
    SvgCanvas canvas = scene_canvas(loaded.scene);
    for (const RegionVerdict& v : report.verdicts)
      if (v.marked) canvas.add_circle(v.center, v.radius, "#107030", "none", 0.0, 0.2);
    add_hull_overlay(canvas, report.hull, "#107030");
    canvas.save(artifact_path(args.out_dir, "overlay.svg"));
  }

  json summary;
  summary["command"] = "monotonicity";
  summary["scene"] = scene_summary(args.scene_path, loaded);
  summary["seed"] = args.seed;
  summary["stride"] = args.stride;
  summary["ball_radius_cells"] = args.radius;
  summary["alpha_schedule"] = args.alpha_schedule;
  summary["dictionary_entries"] = dictionary.size();
  summary["monotonicity"] = scan_summary_block(report);
  summary["solver_calls"] = {{"sigma", oracle.solve_count()},
                             {"reference", reference.solve_count()}};
  summary["wall_ms"] = timer.ms();
  save_summary(summary, args.out_dir);
}

void run_boundary(const BoundaryArgs& args) {
  WallTimer timer;
  prepare_out_dir(args.out_dir);
  LoadedScene loaded = load(args.scene_path);
  auto wolff = wolff_for(loaded.scene.p);
  std::vector<Vec2> points = parse_points_arg(args.points);

  DnOracle oracle(loaded.scene);

  BoundaryOptions options;
  options.gamma_low = args.gamma_low;
  options.gamma_high = args.gamma_high;
  options.tolerance = args.tolerance;
  options.tau_override = args.tau_schedule;

  CsvTable recovered;
  recovered.header = {"x",           "y",            "value",      "iterations",
                      "bracket_low", "bracket_high", "early_exact"};
  CsvTable probes;
  probes.header = {"x", "y", "gamma", "verdict", "slope"};

  json per_point = json::array();
  for (const Vec2& x0 : points) {
    BoundaryQuery query =
        make_boundary_query(*loaded.scene.mesh, loaded.file.domain, x0, args.inset);
    BoundaryRecovery recovery = recover_boundary_value(oracle, wolff, query, options);
    recovered.add_row({format_double(x0.x), format_double(x0.y), format_double(recovery.value),
                       std::to_string(recovery.iterations), format_double(recovery.bracket_low),
                       format_double(recovery.bracket_high), recovery.early_exact ? "1" : "0"});
    for (const GammaProbe& probe : recovery.trace)
      probes.add_row({format_double(x0.x), format_double(x0.y), format_double(probe.gamma),
                      to_string(probe.verdict), format_double(probe.slope)});
    json entry;
    entry["point"] = {x0.x, x0.y};
    entry["value"] = recovery.value;
    entry["iterations"] = recovery.iterations;
    entry["early_exact"] = recovery.early_exact;
    per_point.push_back(std::move(entry));
  }
  save_csv(recovered, artifact_path(args.out_dir, "boundary.csv"));
  save_csv(probes, artifact_path(args.out_dir, "probes.csv"));

  json summary;
  summary["command"] = "boundary";
  summary["scene"] = scene_summary(args.scene_path, loaded);
  summary["tolerance"] = args.tolerance;
  summary["points"] = std::move(per_point);
  summary["solver_calls"] = {{"sigma", oracle.solve_count()}};
  summary["wall_ms"] = timer.ms();
  save_summary(summary, args.out_dir);
}

void run_compare(const CompareArgs& args) {
  WallTimer timer;
  prepare_out_dir(args.out_dir);
  LoadedScene loaded = load(args.scene_path);
  auto wolff = wolff_for(loaded.scene.p);

  DnOracle oracle(loaded.scene);
  DnOracle reference = DnOracle::reference(loaded.scene.mesh, loaded.scene.p);

  EnclosureOptions enclosure_options;
  enclosure_options.tolerance = args.tolerance;
  EnclosureReport enclosure_report = reconstruct_hull(
      oracle, reference, wolff, default_directions(args.directions), enclosure_options);
  write_enclosure_artifacts(enclosure_report, args.out_dir, "enclosure_hull.csv");

  DictionaryOptions dict_options;
  dict_options.seed = args.seed;
  auto dictionary = make_dictionary(*loaded.scene.mesh, wolff, dict_options);
  auto grid = make_ball_grid(*loaded.scene.mesh, args.stride, args.radius);
  ScanOptions scan_options;
  scan_options.alpha_schedule = args.alpha_schedule;
  ScanReport scan_report = scan(oracle, reference, grid, dictionary, scan_options);
  write_scan_artifacts(scan_report, args.out_dir, "monotonicity_hull.csv");

  json summary;
  summary["command"] = "compare";
  summary["scene"] = scene_summary(args.scene_path, loaded);
  summary["enclosure"] = enclosure_summary_block(enclosure_report);
  summary["monotonicity"] = scan_summary_block(scan_report);

  const double h = loaded.scene.mesh->h_max;
  if (!enclosure_report.hull.empty() && !scan_report.hull.empty()) {
    double separation = hausdorff_distance(enclosure_report.hull, scan_report.hull);
    // Documented per-method resolution bounds: two cell widths for the
    // half-space bisection, two cell widths plus one ball radius for the
    // region scan.
    double bound = 2.0 * h + (2.0 * h + args.radius * h);
    summary["hausdorff"] = separation;
    summary["resolution_bound"] = bound;
    summary["within_bound"] = separation <= bound;
  } else {
    summary["hausdorff"] = nullptr;
    summary["agree_homogeneous"] =
        enclosure_report.hull.empty() && scan_report.hull.empty();
  }
  summary["solver_calls"] = {{"sigma", oracle.solve_count()},
                             {"reference", reference.solve_count()}};
  summary["wall_ms"] = timer.ms();
  save_summary(summary, args.out_dir);

  if (args.svg) {
    SvgCanvas canvas = scene_canvas(loaded.scene);
    add_hull_overlay(canvas, enclosure_report.hull, "#107030");
    add_hull_overlay(canvas, scan_report.hull, "#a040a0");
    canvas.save(artifact_path(args.out_dir, "overlay.svg"));
  }
}

}  // namespace pcond::cli
