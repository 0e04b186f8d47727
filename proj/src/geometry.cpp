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

#include "gcplan/geometry.hpp"

#include <algorithm>
#include <limits>

namespace gcplan {

Polyline::Polyline(std::vector<Vec2> points) : pts_(std::move(points)) {
  cum_.reserve(pts_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    if (i > 0) s += distance(pts_[i - 1], pts_[i]);
    cum_.push_back(s);
  }
}

void Polyline::append(const Vec2& p) {
  double s = length();
  if (!pts_.empty()) s += distance(pts_.back(), p);
  pts_.push_back(p);
  cum_.push_back(s);
}

Vec2 Polyline::point_at(double s) const {
  if (pts_.empty()) return {};
  if (pts_.size() == 1 || s <= 0.0) return pts_.front();
  if (s >= length()) return pts_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  const double seg = cum_[i] - cum_[i - 1];
  if (seg <= 0.0) return pts_[i];
  const double t = (s - cum_[i - 1]) / seg;
  return pts_[i - 1] + (pts_[i] - pts_[i - 1]) * t;
}

double Polyline::heading_at(double s) const {
  if (pts_.size() < 2) return 0.0;
  s = std::clamp(s, 0.0, length());
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(cum_.begin(), cum_.end(), s) - cum_.begin());
  i = std::min(i, pts_.size() - 1);
  // Walk to a non-degenerate segment; forward first, then backward.
  for (std::size_t j = i; j < pts_.size(); ++j) {
    const Vec2 d = pts_[j] - pts_[j - 1];
    if (d.norm() > 0.0) return heading_of(d);
  }
  for (std::size_t j = i; j-- > 1;) {
    const Vec2 d = pts_[j] - pts_[j - 1];
    if (d.norm() > 0.0) return heading_of(d);
  }
  return 0.0;
}

Polyline::Projection Polyline::project(const Vec2& p) const {
  Projection best;
  best.dist = std::numeric_limits<double>::infinity();
  if (pts_.empty()) return best;
  if (pts_.size() == 1) {
    best = {0.0, distance(pts_[0], p), 0.0, 0.0};
    return best;
  }
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    const Vec2 a = pts_[i];
    const Vec2 b = pts_[i + 1];
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    const double d = distance(q, p);
    if (d < best.dist) {
      best.dist = d;
      best.arc = cum_[i] + std::sqrt(len2) * t;
      best.seg_heading = len2 > 0.0 ? heading_of(ab) : heading_at(cum_[i]);
      const Vec2 dir{std::cos(best.seg_heading), std::sin(best.seg_heading)};
      const double c = dir.cross(p - q);
      best.signed_lateral = (c >= 0.0 ? 1.0 : -1.0) * d;
    }
  }
  return best;
}

bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[j];
    const Vec2& b = polygon[i];
    // On-edge check, including endpoints.
    const Vec2 ab = b - a;
    const double cross = ab.cross(p - a);
    if (std::abs(cross) < 1e-9) {
      const double dot = (p - a).dot(p - b);
      if (dot <= 1e-9) return true;
    }
    const bool crosses = (b.y > p.y) != (a.y > p.y);
    if (crosses) {
      const double x_at = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

bool point_in_any_polygon(const std::vector<std::vector<Vec2>>& polygons,
                          const Vec2& p) {
  for (const auto& poly : polygons) {
    if (point_in_polygon(poly, p)) return true;
  }
  return false;
}

std::vector<Vec2> OrientedBox::corners() const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  const Vec2 fwd{c * hl, s * hl};
  const Vec2 left{-s * hw, c * hw};
  const Vec2 ctr{cx, cy};
  return {ctr + fwd + left, ctr + fwd - left, ctr - fwd - left,
          ctr - fwd + left};
}

namespace {

// Separating axis test for convex quads; true when projections overlap on
// every edge normal of both boxes.
bool overlap_on_axes(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 e = a[(i + 1) % a.size()] - a[i];
    const Vec2 axis{-e.y, e.x};
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    double bmin = amin, bmax = -amin;
    for (const Vec2& p : a) {
      const double v = axis.dot(p);
      amin = std::min(amin, v);
      amax = std::max(amax, v);
    }
    for (const Vec2& p : b) {
      const double v = axis.dot(p);
      bmin = std::min(bmin, v);
      bmax = std::max(bmax, v);
    }
    if (amax < bmin || bmax < amin) return false;
  }
  return true;
}

}  // namespace

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  return overlap_on_axes(ca, cb) && overlap_on_axes(cb, ca);
}

std::vector<Vec2> box_intersection(const OrientedBox& a,
                                   const OrientedBox& b) {
  std::vector<Vec2> poly = a.corners();
  const std::vector<Vec2> clip = b.corners();
  // Clip polygon against each (counter-clockwise) edge of the clip box.
  for (std::size_t i = 0; i < clip.size() && !poly.empty(); ++i) {
    const Vec2 e0 = clip[i];
    const Vec2 e1 = clip[(i + 1) % clip.size()];
    const Vec2 edge = e1 - e0;
    std::vector<Vec2> out;
    out.reserve(poly.size() + 2);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      const Vec2 cur = poly[j];
      const Vec2 nxt = poly[(j + 1) % poly.size()];
      const double side_cur = edge.cross(cur - e0);
      const double side_nxt = edge.cross(nxt - e0);
      // corners() winds clockwise, so "inside" is the non-positive side.
      const bool in_cur = side_cur <= 0.0;
      const bool in_nxt = side_nxt <= 0.0;
      if (in_cur) out.push_back(cur);
      if (in_cur != in_nxt) {
        const double t = side_cur / (side_cur - side_nxt);
        out.push_back(cur + (nxt - cur) * t);
      }
    }
    poly = std::move(out);
  }
  return poly;
}

Vec2 polygon_centroid(const std::vector<Vec2>& polygon) {
  if (polygon.empty()) return {};
  Vec2 sum{0.0, 0.0};
  for (const Vec2& p : polygon) sum = sum + p;
  return sum * (1.0 / static_cast<double>(polygon.size()));
}

}  // namespace gcplan
