#pragma once

// Planar geometry in a local metric frame: projection from lat/lon and the
// distance / containment queries used to place roads relative to a fire.

#include <optional>
#include <span>
#include <vector>

namespace evac::geometry {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct Point {
  double x = 0.0;  // meters east of the projection origin
  double y = 0.0;  // meters north of the projection origin

  friend bool operator==(const Point&, const Point&) = default;
};

struct GeoOrigin {
  double lat = 0.0;
  double lon = 0.0;
};

/// Road centerline. Always holds at least two vertices.
class Polyline {
public:
  Polyline() = default;
  /// Drops consecutive duplicate vertices; throws InputError if fewer than
  /// two distinct vertices remain.
  explicit Polyline(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t segment_count() const { return vertices_.empty() ? 0 : vertices_.size() - 1; }
  double length() const;
  Polyline reversed() const;

private:
  std::vector<Point> vertices_;
};

struct Circle {
  Point center;
  double radius = 0.0;
};

/// Simple polygon without holes. The ring is stored open (first vertex not repeated).
struct Polygon {
  std::vector<Point> ring;
};

/// A closed burnt region: the union of its circles and polygons.
struct FireSet {
  std::vector<Circle> circles;
  std::vector<Polygon> polygons;

  bool empty() const { return circles.empty() && polygons.empty(); }
  /// Appends every component of `other` (set union).
  void unite(const FireSet& other);
};

/// Equirectangular projection about `origin`. Throws InputError on out-of-range input.
Point project(double lat, double lon, const GeoOrigin& origin);

/// Inverse of project(); returns {lat, lon}.
GeoOrigin unproject(const Point& p, const GeoOrigin& origin);

/// Great-circle distance in meters, used to check the projection.
double haversine_m(double lat1, double lon1, double lat2, double lon2);

double distance(const Point& a, const Point& b);

/// Distance from p to the closed segment [a, b]; a == b degrades to point distance.
double dist_point_segment(const Point& p, const Point& a, const Point& b);

/// Distance between closed segments [a, b] and [c, d]; zero when they intersect.
double dist_segment_segment(const Point& a, const Point& b, const Point& c, const Point& d);

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d);

/// Closed containment: boundary points count as inside.
bool contains(const Circle& circle, const Point& p);
bool contains(const Polygon& polygon, const Point& p);
bool contains(const FireSet& fire, const Point& p);

/// Minimum distance from a road polyline to the fire; 0 iff the road touches or
/// enters the fire. Returns nullopt for an empty fire set ("no fire").
std::optional<double> dist_polyline_fireset(const Polyline& line, const FireSet& fire);

/// A fire set with its polygon edges bucketed on a uniform grid, for running
/// many distance queries against the same F(t). Answers are identical to
/// contains() / dist_polyline_fireset() on the wrapped set.
class FireIndex {
public:
  explicit FireIndex(FireSet set);

  const FireSet& set() const { return set_; }
  bool contains(const Point& p) const;
  std::optional<double> distance(const Polyline& line) const;

private:
  struct Edge {
    Point a;
    Point b;
  };

  FireSet set_;
  std::vector<Edge> edges_;
  std::vector<double> poly_box_;  // xmin, ymin, xmax, ymax per polygon
  double x0_ = 0.0;
  double y0_ = 0.0;
  double cell_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<int> cell_start_;  // CSR over cells, row-major
  std::vector<int> cell_edges_;
};

/// Ring orientation helper: twice the signed area (positive = counter-clockwise).
double signed_area2(std::span<const Point> ring);

/// Regular n-gon approximating a circle, as GIS packages emit for buffered points.
Polygon circle_polygon(const Circle& circle, int segments = 64);

}  // namespace evac::geometry
