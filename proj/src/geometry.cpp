#include "evac/geometry.hpp"

#include "evac/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace evac::geometry {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point& p, const Point& a, const Point& b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

struct Box {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void add(const Point& p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
};

Box bounds(std::span<const Point> pts) {
  Box b;
  for (const auto& p : pts) b.add(p);
  return b;
}

double box_gap(const Box& a, const Box& b) {
  const double dx = std::max({0.0, a.xmin - b.xmax, b.xmin - a.xmax});
  const double dy = std::max({0.0, a.ymin - b.ymax, b.ymin - a.ymax});
  return std::hypot(dx, dy);
}

}  // namespace

Polyline::Polyline(std::vector<Point> vertices) {
  vertices_.reserve(vertices.size());
  for (const auto& v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw InputError("polyline vertex is not finite");
    }
    if (vertices_.empty() || !(vertices_.back() == v)) vertices_.push_back(v);
  }
  if (vertices_.size() < 2) {
    throw InputError("polyline needs at least two distinct vertices");
  }
}

double Polyline::length() const {
  double total = 0.0;
  for (std::size_t k = 1; k < vertices_.size(); ++k) {
    total += distance(vertices_[k - 1], vertices_[k]);
  }
  return total;
}

Polyline Polyline::reversed() const {
  Polyline out;
  out.vertices_.assign(vertices_.rbegin(), vertices_.rend());
  return out;
}

void FireSet::unite(const FireSet& other) {
  circles.insert(circles.end(), other.circles.begin(), other.circles.end());
  polygons.insert(polygons.end(), other.polygons.begin(), other.polygons.end());
}

Point project(double lat, double lon, const GeoOrigin& origin) {
  if (!(std::abs(lat) <= 90.0) || !(std::abs(lon) <= 180.0)) {
    throw InputError("coordinate out of range: lat=" + std::to_string(lat) +
                     " lon=" + std::to_string(lon));
  }
  const double x = kEarthRadiusM * (lon - origin.lon) * std::cos(origin.lat * kDegToRad) * kDegToRad;
  const double y = kEarthRadiusM * (lat - origin.lat) * kDegToRad;
  return {x, y};
}

GeoOrigin unproject(const Point& p, const GeoOrigin& origin) {
  const double lat = origin.lat + p.y / (kEarthRadiusM * kDegToRad);
  const double lon = origin.lon + p.x / (kEarthRadiusM * std::cos(origin.lat * kDegToRad) * kDegToRad);
  return {lat, lon};
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDegToRad;
  const double p2 = lat2 * kDegToRad;
  const double dp = (lat2 - lat1) * kDegToRad;
  const double dl = (lon2 - lon1) * kDegToRad;
  const double h = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double dist_point_segment(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  double s = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return distance(p, Point{a.x + s * dx, a.y + s * dy});
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return d1 * d2 < 0 && d3 * d4 < 0;
}

double dist_segment_segment(const Point& a, const Point& b, const Point& c, const Point& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({dist_point_segment(a, c, d), dist_point_segment(b, c, d),
                   dist_point_segment(c, a, b), dist_point_segment(d, a, b)});
}

bool contains(const Circle& circle, const Point& p) {
  return distance(circle.center, p) <= circle.radius;
}

bool contains(const Polygon& polygon, const Point& p) {
  const auto& ring = polygon.ring;
  const std::size_t n = ring.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t k = 0, prev = n - 1; k < n; prev = k++) {
    const Point& a = ring[prev];
    const Point& b = ring[k];
    // Boundary counts as burnt.
    if (sign(cross(a, b, p)) == 0 && on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

bool contains(const FireSet& fire, const Point& p) {
  for (const auto& c : fire.circles) {
    if (contains(c, p)) return true;
  }
  for (const auto& poly : fire.polygons) {
    if (contains(poly, p)) return true;
  }
  return false;
}

std::optional<double> dist_polyline_fireset(const Polyline& line, const FireSet& fire) {
  if (fire.empty()) return std::nullopt;
  const auto& v = line.vertices();
  double best = std::numeric_limits<double>::infinity();

  for (const auto& c : fire.circles) {
    for (std::size_t k = 1; k < v.size(); ++k) {
      const double d = dist_point_segment(c.center, v[k - 1], v[k]) - c.radius;
      best = std::min(best, std::max(0.0, d));
      if (best == 0.0) return 0.0;
    }
  }

  const Box line_box = bounds(v);
  for (const auto& poly : fire.polygons) {
    const auto& ring = poly.ring;
    if (ring.size() < 3) continue;
    if (box_gap(line_box, bounds(ring)) >= best) continue;
    // A vertex inside the polygon, or any crossing with its boundary, means contact.
    if (contains(poly, v.front())) return 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      for (std::size_t e = 0, prev = ring.size() - 1; e < ring.size(); prev = e++) {
        const double d = dist_segment_segment(v[k - 1], v[k], ring[prev], ring[e]);
        if (d == 0.0) return 0.0;
        best = std::min(best, d);
      }
    }
  }
  return best;
}

FireIndex::FireIndex(FireSet set) : set_(std::move(set)) {
  Box all;
  for (const auto& poly : set_.polygons) {
    const auto& ring = poly.ring;
    const Box b = bounds(ring);
    poly_box_.insert(poly_box_.end(), {b.xmin, b.ymin, b.xmax, b.ymax});
    if (ring.size() < 3) continue;
    for (std::size_t e = 0, prev = ring.size() - 1; e < ring.size(); prev = e++) {
      edges_.push_back({ring[prev], ring[e]});
      all.add(ring[e]);
    }
  }
  if (edges_.empty()) return;

  // About one edge per cell.
  const double w = all.xmax - all.xmin;
  const double h = all.ymax - all.ymin;
  const int side = std::clamp(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(edges_.size())))), 1, 512);
  cell_ = std::max({w, h, 1e-9}) / side;
  x0_ = all.xmin;
  y0_ = all.ymin;
  nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(h / cell_)));

  auto cell_range = [&](const Edge& e, int& cx0, int& cy0, int& cx1, int& cy1) {
    cx0 = std::clamp(static_cast<int>((std::min(e.a.x, e.b.x) - x0_) / cell_), 0, nx_ - 1);
    cx1 = std::clamp(static_cast<int>((std::max(e.a.x, e.b.x) - x0_) / cell_), 0, nx_ - 1);
    cy0 = std::clamp(static_cast<int>((std::min(e.a.y, e.b.y) - y0_) / cell_), 0, ny_ - 1);
    cy1 = std::clamp(static_cast<int>((std::max(e.a.y, e.b.y) - y0_) / cell_), 0, ny_ - 1);
  };
  cell_start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (const auto& e : edges_) {
    int cx0, cy0, cx1, cy1;
    cell_range(e, cx0, cy0, cx1, cy1);
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) ++cell_start_[static_cast<std::size_t>(cy) * nx_ + cx + 1];
    }
  }
  for (std::size_t c = 1; c < cell_start_.size(); ++c) cell_start_[c] += cell_start_[c - 1];
  cell_edges_.resize(static_cast<std::size_t>(cell_start_.back()));
  std::vector<int> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    int cx0, cy0, cx1, cy1;
    cell_range(edges_[k], cx0, cy0, cx1, cy1);
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) {
        cell_edges_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cy) * nx_ + cx]++)] = static_cast<int>(k);
      }
    }
  }
}

bool FireIndex::contains(const Point& p) const { return geometry::contains(set_, p); }

std::optional<double> FireIndex::distance(const Polyline& line) const {
  if (set_.empty()) return std::nullopt;
  const auto& v = line.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : set_.circles) {
    for (std::size_t k = 1; k < v.size(); ++k) {
      best = std::min(best, std::max(0.0, dist_point_segment(c.center, v[k - 1], v[k]) - c.radius));
      if (best == 0.0) return 0.0;
    }
  }
  if (edges_.empty()) return best;

  const Box line_box = bounds(v);
  for (std::size_t k = 0; k < set_.polygons.size(); ++k) {
    const double* b = &poly_box_[4 * k];
    const bool inside_box = b[0] <= v.front().x && v.front().x <= b[2] && b[1] <= v.front().y && v.front().y <= b[3];
    if (inside_box && geometry::contains(set_.polygons[k], v.front())) return 0.0;
  }

  // Scan cells near the road, widening the window until every edge outside it
  // is provably farther than the best distance found. An edge within distance
  // r of the road has a point inside the road's box grown by r, and is listed
  // in the cell holding that point.
  std::vector<char> seen(edges_.size(), 0);
  const Box grid{x0_, y0_, x0_ + nx_ * cell_, y0_ + ny_ * cell_};
  double r = std::max(cell_, box_gap(line_box, grid));
  while (true) {
    const Box q{line_box.xmin - r, line_box.ymin - r, line_box.xmax + r, line_box.ymax + r};
    const int cx0 = std::clamp(static_cast<int>(std::floor((q.xmin - x0_) / cell_)), 0, nx_ - 1);
    const int cx1 = std::clamp(static_cast<int>(std::floor((q.xmax - x0_) / cell_)), 0, nx_ - 1);
    const int cy0 = std::clamp(static_cast<int>(std::floor((q.ymin - y0_) / cell_)), 0, ny_ - 1);
    const int cy1 = std::clamp(static_cast<int>(std::floor((q.ymax - y0_) / cell_)), 0, ny_ - 1);
    for (int cy = cy0; cy <= cy1; ++cy) {
      const std::size_t row = static_cast<std::size_t>(cy) * nx_;
      for (int pos = cell_start_[row + cx0]; pos < cell_start_[row + cx1 + 1]; ++pos) {
        const int e = cell_edges_[static_cast<std::size_t>(pos)];
        if (seen[e]) continue;
        seen[e] = 1;
        const Edge& edge = edges_[e];
        Box eb;
        eb.add(edge.a);
        eb.add(edge.b);
        if (box_gap(line_box, eb) >= best) continue;
        for (std::size_t k = 1; k < v.size(); ++k) {
          const double d = dist_segment_segment(v[k - 1], v[k], edge.a, edge.b);
          if (d == 0.0) return 0.0;
          best = std::min(best, d);
        }
      }
    }
    const bool covers_grid = q.xmin <= grid.xmin && q.ymin <= grid.ymin && q.xmax >= grid.xmax && q.ymax >= grid.ymax;
    if (best <= r || covers_grid) return best;
    // Everything within r is done; the best so far bounds the remaining search.
    r = std::min(2.0 * r, best);
  }
}

double signed_area2(std::span<const Point> ring) {
  double acc = 0.0;
  for (std::size_t k = 0, prev = ring.size() - 1; k < ring.size(); prev = k++) {
    acc += ring[prev].x * ring[k].y - ring[k].x * ring[prev].y;
  }
  return acc;
}

Polygon circle_polygon(const Circle& circle, int segments) {
  Polygon out;
  out.ring.reserve(static_cast<std::size_t>(segments));
  for (int k = 0; k < segments; ++k) {
    const double a = 2.0 * std::numbers::pi * k / segments;
    out.ring.push_back({circle.center.x + circle.radius * std::cos(a),
                        circle.center.y + circle.radius * std::sin(a)});
  }
  return out;
}

}  // namespace evac::geometry
