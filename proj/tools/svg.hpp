#pragma once

#include <string>
#include <vector>

#include "pcond/vec2.hpp"

namespace pcond::cli {

/// Minimal SVG writer for scene overlays. Geometry is given in world
/// coordinates; the canvas flips the y axis and adds a small margin.
class SvgCanvas {
 public:
  SvgCanvas(Vec2 lo, Vec2 hi, int width_px = 640);

  void add_polygon(const std::vector<Vec2>& points, const std::string& fill,
                   const std::string& stroke, double stroke_width, double opacity = 1.0);
  void add_polyline(const std::vector<Vec2>& points, bool closed, const std::string& stroke,
                    double stroke_width);
  void add_circle(const Vec2& center, double radius, const std::string& fill,
                  const std::string& stroke, double stroke_width, double opacity = 1.0);

  std::string render() const;
  void save(const std::string& path) const;

 private:
  Vec2 to_pixels(const Vec2& world) const;
  double scale_;
  Vec2 lo_;
  double width_px_;
  double height_px_;
  std::vector<std::string> elements_;
};

}  // namespace pcond::cli
