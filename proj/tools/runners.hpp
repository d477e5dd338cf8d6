#pragma once

#include <string>
#include <vector>

namespace pcond::cli {

struct SolveArgs {
  std::string scene_path;
  std::string out_dir;
  std::vector<double> affine{1.0, 0.0};  // boundary data f(x) = d . x
  bool svg = false;
};

struct WolffArgs {
  std::string out_dir;
  double p = 2.0;
  int samples = 2048;
};

struct EnclosureArgs {
  std::string scene_path;
  std::string out_dir;
  int directions = 16;
  double tolerance = -1.0;           // bisection bracket width; < 0 picks half a mesh width
  std::vector<double> tau_schedule;  // empty: derived from the mesh
  bool svg = false;
};

struct ScanArgs {
  std::string scene_path;
  std::string out_dir;
  std::vector<double> alpha_schedule{0.125, 0.25, 0.5, 1.0};
  int stride = 2;
  double radius = 2.0;  // ball radius in cell widths
  std::string sign = "auto";
  unsigned seed = 0;
  bool svg = false;
};

struct BoundaryArgs {
  std::string scene_path;
  std::string out_dir;
  std::string points;  // "x,y;x,y;..."
  double tolerance = 0.01;
  double inset = 0.05;
  double gamma_low = 0.25;
  double gamma_high = 4.0;
  std::vector<double> tau_schedule;
};

struct CompareArgs {
  std::string scene_path;
  std::string out_dir;
  int directions = 16;
  double tolerance = -1.0;
  std::vector<double> alpha_schedule{0.125, 0.25, 0.5, 1.0};
  int stride = 2;
  double radius = 2.0;
  unsigned seed = 0;
  bool svg = false;
};

void run_solve(const SolveArgs& args);
void run_wolff(const WolffArgs& args);
void run_enclosure(const EnclosureArgs& args);
void run_scan(const ScanArgs& args);
void run_boundary(const BoundaryArgs& args);
void run_compare(const CompareArgs& args);

}  // namespace pcond::cli
