#include "svg.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pcond/errors.hpp"

namespace pcond::cli {

namespace {

constexpr double kMarginPx = 16.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(Vec2 lo, Vec2 hi, int width_px) : lo_(lo) {
  double span_x = hi.x - lo.x;
  double span_y = hi.y - lo.y;
  if (!(span_x > 0.0) || !(span_y > 0.0)) fail_config("svg: empty drawing extent");
  scale_ = (width_px - 2.0 * kMarginPx) / span_x;
  width_px_ = width_px;
  height_px_ = span_y * scale_ + 2.0 * kMarginPx;
}

Vec2 SvgCanvas::to_pixels(const Vec2& world) const {
  return {kMarginPx + (world.x - lo_.x) * scale_,
          height_px_ - kMarginPx - (world.y - lo_.y) * scale_};
}

void SvgCanvas::add_polygon(const std::vector<Vec2>& points, const std::string& fill,
                            const std::string& stroke, double stroke_width, double opacity) {
  if (points.size() < 3) return;
  std::ostringstream el;
  el << "<polygon points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    Vec2 px = to_pixels(points[i]);
    el << (i ? " " : "") << num(px.x) << ',' << num(px.y);
  }
  el << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\""
     << num(stroke_width) << "\" fill-opacity=\"" << num(opacity) << "\"/>";
  elements_.push_back(el.str());
}

void SvgCanvas::add_polyline(const std::vector<Vec2>& points, bool closed,
                             const std::string& stroke, double stroke_width) {
  if (points.size() < 2) return;
  std::ostringstream el;
  el << (closed ? "<polygon points=\"" : "<polyline points=\"");
  for (std::size_t i = 0; i < points.size(); ++i) {
    Vec2 px = to_pixels(points[i]);
    el << (i ? " " : "") << num(px.x) << ',' << num(px.y);
  }
  el << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(stroke_width)
     << "\"/>";
  elements_.push_back(el.str());
}

void SvgCanvas::add_circle(const Vec2& center, double radius, const std::string& fill,
                           const std::string& stroke, double stroke_width, double opacity) {
  Vec2 px = to_pixels(center);
  std::ostringstream el;
  el << "<circle cx=\"" << num(px.x) << "\" cy=\"" << num(px.y) << "\" r=\""
     << num(radius * scale_) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
     << "\" stroke-width=\"" << num(stroke_width) << "\" fill-opacity=\"" << num(opacity)
     << "\"/>";
  elements_.push_back(el.str());
}

std::string SvgCanvas::render() const {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_px_) << "\" height=\""
      << num(height_px_) << "\" viewBox=\"0 0 " << num(width_px_) << ' ' << num(height_px_)
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& el : elements_) out << el << '\n';
  out << "</svg>\n";
  return out.str();
}

void SvgCanvas::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_config("svg: cannot open \"" + path + "\" for writing");
  out << render();
  out.flush();
  if (!out) fail_config("svg: write to \"" + path + "\" failed");
}

}  // namespace pcond::cli
