// Copyright 2026 The gcplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GCPLAN_GEOMETRY_HPP_
#define GCPLAN_GEOMETRY_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

namespace gcplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Position plus heading, radians in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
};

// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

inline double heading_of(const Vec2& d) { return std::atan2(d.y, d.x); }

// Piecewise-linear curve with a precomputed cumulative arc-length table.
// Arc-length queries clamp to [0, length()].
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return pts_; }
  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }

  // Arc length from the start to vertex i.
  double arc_at_vertex(std::size_t i) const { return cum_[i]; }

  Vec2 point_at(double s) const;

  // Direction of the segment containing arc length s. Degenerate segments
  // reuse the nearest non-degenerate direction.
  double heading_at(double s) const;

  struct Projection {
    double arc = 0.0;            // arc length of the closest point
    double dist = 0.0;           // unsigned distance
    double signed_lateral = 0.0; // >0 when the query is left of the curve
    double seg_heading = 0.0;    // direction of the matched segment
  };
  Projection project(const Vec2& p) const;

  void append(const Vec2& p);

 private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

// Boundary points count as inside.
bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p);

bool point_in_any_polygon(const std::vector<std::vector<Vec2>>& polygons,
                          const Vec2& p);

// Rectangle described by its centre, heading, and dimensions.
struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double heading = 0.0;
  double length = 0.0;  // extent along the heading
  double width = 0.0;   // extent across the heading

  // Corner order: front-left, front-right, rear-right, rear-left.
  std::vector<Vec2> corners() const;
};

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

// Convex intersection of two oriented boxes (Sutherland-Hodgman). Empty
// when they do not overlap.
std::vector<Vec2> box_intersection(const OrientedBox& a, const OrientedBox& b);

Vec2 polygon_centroid(const std::vector<Vec2>& polygon);

}  // namespace gcplan

#endif  // GCPLAN_GEOMETRY_HPP_
