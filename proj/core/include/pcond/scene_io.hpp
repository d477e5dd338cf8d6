#pragma once

#include <string>
#include <vector>

#include "pcond/geometry.hpp"

namespace pcond {

/// On-disk description of an experiment scene. The JSON layout is
///
///   {
///     "domain": {"kind": "unit_square"}
///               | {"kind": "disk", "center": [x, y], "radius": r}
///               | {"kind": "polygon", "vertices": [[x, y], ...]},
///     "resolution": 64,
///     "p": 2.0,
///     "inclusions": [
///       {"shape": {"kind": "disk", "center": [0.5, 0.5], "radius": 0.2}, "sigma": 2.0},
///       {"shape": {"kind": "rect", "lo": [0.4, 0.4], "hi": [0.7, 0.7]}, "sigma": 0.5},
///       {"shape": {"kind": "polygon", "vertices": [[x, y], ...]}, "sigma": 3.0}
///     ]
///   }
///
/// "inclusions" may be omitted (homogeneous scene). Domain polygons must be
/// strictly convex and CCW; inclusion polygons only need to be simple.
/// Unknown fields are rejected so that typos cannot silently change a run.
struct SceneFile {
  DomainSpec domain;
  int resolution = 32;
  double p = 2.0;
  std::vector<Inclusion> inclusions;
};

/// Parse JSON text; malformed input is a config error naming the bad field.
SceneFile parse_scene(const std::string& text);

/// Serialize back to JSON; parse_scene(scene_to_json(s)) reproduces s exactly.
std::string scene_to_json(const SceneFile& file);

SceneFile load_scene_file(const std::string& path);
void save_scene_file(const SceneFile& file, const std::string& path);

/// Mesh the domain and paint the inclusions over the unit background.
ConductivityScene build_scene(const SceneFile& file);

}  // namespace pcond
