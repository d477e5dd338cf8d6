#pragma once

#include <cmath>

namespace pcond {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }  // rotate +90 degrees
inline Vec2 normalized(const Vec2& v) {
  double n = norm(v);
  return {v.x / n, v.y / n};
}
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

/// Unit vector at angle theta from the positive x axis.
inline Vec2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace pcond
