#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace press {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

inline double euclid(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline Point lerp(const Point& a, const Point& b, double u) {
  return {a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u};
}

// Axis-aligned bounding rectangle. Default-constructed Mbr is empty and
// behaves as the identity under expand().
struct Mbr {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  Mbr() = default;
  Mbr(double x0, double y0, double x1, double y1) : min_x(x0), min_y(y0), max_x(x1), max_y(y1) {}

  bool empty() const { return min_x > max_x || min_y > max_y; }

  void expand(const Point& p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }

  void expand(const Mbr& o) {
    min_x = std::min(min_x, o.min_x);
    min_y = std::min(min_y, o.min_y);
    max_x = std::max(max_x, o.max_x);
    max_y = std::max(max_y, o.max_y);
  }

  // Closed containment, optionally inflated by tol on every side.
  bool contains(const Point& p, double tol = 0.0) const {
    return p.x >= min_x - tol && p.x <= max_x + tol && p.y >= min_y - tol && p.y <= max_y + tol;
  }

  bool intersects(const Mbr& o) const {
    return !(o.min_x > max_x || o.max_x < min_x || o.min_y > max_y || o.max_y < min_y);
  }
};

inline bool operator==(const Mbr& a, const Mbr& b) {
  return a.min_x == b.min_x && a.min_y == b.min_y && a.max_x == b.max_x && a.max_y == b.max_y;
}

// Parameter u in [0,1] of the point on segment ab closest to p.
inline double project_on_segment(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return 0.0;
  const double u = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  return std::clamp(u, 0.0, 1.0);
}

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  return euclid(p, lerp(a, b, project_on_segment(p, a, b)));
}

// Liang-Barsky style test: true iff segment ab has a point inside the closed
// rectangle.
inline bool segment_intersects_rect(const Point& a, const Point& b, const Mbr& r) {
  if (r.empty()) return false;
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - r.min_x, r.max_x - a.x, a.y - r.min_y, r.max_y - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;  // parallel and outside this slab
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) {
        if (t > t1) return false;
        t0 = std::max(t0, t);
      } else {
        if (t < t0) return false;
        t1 = std::min(t1, t);
      }
    }
  }
  return t0 <= t1;
}

}  // namespace press
