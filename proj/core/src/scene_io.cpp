#include "pcond/scene_io.hpp"

#include <fstream>
#include <memory>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "pcond/errors.hpp"

namespace pcond {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& context, const std::string& what) {
  fail_config("scene " + context + ": " + what);
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& context) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known) bad(context, "unknown field \"" + item.key() + "\"");
  }
}

const json& need(const json& obj, const char* key, const std::string& context) {
  if (!obj.is_object()) bad(context, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(context, std::string("missing field \"") + key + "\"");
  return *it;
}

double need_number(const json& obj, const char* key, const std::string& context) {
  const json& v = need(obj, key, context);
  if (!v.is_number()) bad(context + "." + key, "expected a number");
  return v.get<double>();
}

std::string need_string(const json& obj, const char* key, const std::string& context) {
  const json& v = need(obj, key, context);
  if (!v.is_string()) bad(context + "." + key, "expected a string");
  return v.get<std::string>();
}

Vec2 parse_point(const json& v, const std::string& context) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    bad(context, "expected a point [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<Vec2> parse_points(const json& v, const std::string& context) {
  if (!v.is_array()) bad(context, "expected an array of points");
  std::vector<Vec2> points;
  points.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    points.push_back(parse_point(v[i], context + "[" + std::to_string(i) + "]"));
  return points;
}

DomainSpec parse_domain(const json& j) {
  const std::string context = "domain";
  std::string kind = need_string(j, "kind", context);
  if (kind == "unit_square") {
    reject_unknown_keys(j, {"kind"}, context);
    return DomainSpec::unit_square();
  }
  if (kind == "disk") {
    reject_unknown_keys(j, {"kind", "center", "radius"}, context);
    return DomainSpec::disk(parse_point(need(j, "center", context), context + ".center"),
                            need_number(j, "radius", context));
  }
  if (kind == "polygon") {
    reject_unknown_keys(j, {"kind", "vertices"}, context);
    return DomainSpec::convex_polygon(
        parse_points(need(j, "vertices", context), context + ".vertices"));
  }
  bad(context + ".kind", "unknown kind \"" + kind + "\" (expected unit_square, disk, or polygon)");
}

InclusionShape parse_shape(const json& j, const std::string& context) {
  std::string kind = need_string(j, "kind", context);
  if (kind == "disk") {
    reject_unknown_keys(j, {"kind", "center", "radius"}, context);
    DiskShape disk{parse_point(need(j, "center", context), context + ".center"),
                   need_number(j, "radius", context)};
    if (!(disk.radius > 0.0)) bad(context + ".radius", "must be positive");
    return disk;
  }
  if (kind == "rect") {
    reject_unknown_keys(j, {"kind", "lo", "hi"}, context);
    RectShape rect{parse_point(need(j, "lo", context), context + ".lo"),
                   parse_point(need(j, "hi", context), context + ".hi")};
    if (!(rect.lo.x < rect.hi.x && rect.lo.y < rect.hi.y))
      bad(context, "rect needs lo strictly below hi in both coordinates");
    return rect;
  }
  if (kind == "polygon") {
    reject_unknown_keys(j, {"kind", "vertices"}, context);
    PolygonShape poly{parse_points(need(j, "vertices", context), context + ".vertices")};
    if (poly.vertices.size() < 3) bad(context + ".vertices", "needs at least 3 points");
    return poly;
  }
  bad(context + ".kind", "unknown kind \"" + kind + "\" (expected disk, rect, or polygon)");
}

json point_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

json points_to_json(const std::vector<Vec2>& points) {
  json arr = json::array();
  for (const Vec2& v : points) arr.push_back(point_to_json(v));
  return arr;
}

json domain_to_json(const DomainSpec& domain) {
  json j;
  switch (domain.kind) {
    case DomainSpec::Kind::unit_square:
      j["kind"] = "unit_square";
      break;
    case DomainSpec::Kind::disk:
      j["kind"] = "disk";
      j["center"] = point_to_json(domain.center);
      j["radius"] = domain.radius;
      break;
    case DomainSpec::Kind::polygon:
      j["kind"] = "polygon";
      j["vertices"] = points_to_json(domain.vertices);
      break;
  }
  return j;
}

json shape_to_json(const InclusionShape& shape) {
  json j;
  if (const auto* d = std::get_if<DiskShape>(&shape)) {
    j["kind"] = "disk";
    j["center"] = point_to_json(d->center);
    j["radius"] = d->radius;
  } else if (const auto* r = std::get_if<RectShape>(&shape)) {
    j["kind"] = "rect";
    j["lo"] = point_to_json(r->lo);
    j["hi"] = point_to_json(r->hi);
  } else {
    j["kind"] = "polygon";
    j["vertices"] = points_to_json(std::get<PolygonShape>(shape).vertices);
  }
  return j;
}

}  // namespace

SceneFile parse_scene(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail_config(std::string("scene: ") + e.what());
  }
  if (!root.is_object()) fail_config("scene: expected a JSON object at the top level");
  reject_unknown_keys(root, {"domain", "resolution", "p", "inclusions"}, "file");

  SceneFile file;
  file.domain = parse_domain(need(root, "domain", "file"));

  const json& res = need(root, "resolution", "file");
  if (!res.is_number_integer()) bad("resolution", "expected an integer");
  file.resolution = res.get<int>();
  if (file.resolution < 1) bad("resolution", "must be at least 1");

  file.p = need_number(root, "p", "file");
  if (!(file.p > 1.0)) bad("p", "must be greater than 1");

  if (auto it = root.find("inclusions"); it != root.end()) {
    if (!it->is_array()) bad("inclusions", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string context = "inclusions[" + std::to_string(i) + "]";
      const json& inc = (*it)[i];
      if (!inc.is_object()) bad(context, "expected an object");
      reject_unknown_keys(inc, {"shape", "sigma"}, context);
      Inclusion parsed;
      parsed.shape = parse_shape(need(inc, "shape", context), context + ".shape");
      parsed.sigma = need_number(inc, "sigma", context);
      if (!(parsed.sigma > 0.0)) bad(context + ".sigma", "must be positive");
      file.inclusions.push_back(std::move(parsed));
    }
  }
  return file;
}

std::string scene_to_json(const SceneFile& file) {
  json root;
  root["domain"] = domain_to_json(file.domain);
  root["resolution"] = file.resolution;
  root["p"] = file.p;
  json incs = json::array();
  for (const Inclusion& inc : file.inclusions) {
    json j;
    j["shape"] = shape_to_json(inc.shape);
    j["sigma"] = inc.sigma;
    incs.push_back(std::move(j));
  }
  root["inclusions"] = std::move(incs);
  return root.dump(2) + "\n";
}

SceneFile load_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_config("scene: cannot open \"" + path + "\"");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scene(text.str());
}

void save_scene_file(const SceneFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_config("scene: cannot open \"" + path + "\" for writing");
  out << scene_to_json(file);
  out.flush();
  if (!out) fail_config("scene: write to \"" + path + "\" failed");
}

ConductivityScene build_scene(const SceneFile& file) {
  auto mesh = std::make_shared<TriMesh>(build_mesh(file.domain, file.resolution));
  return paint_scene(std::move(mesh), file.inclusions, file.p);
}

}  // namespace pcond
