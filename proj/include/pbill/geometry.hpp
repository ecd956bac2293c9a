#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pbill/error.hpp"

namespace pbill {

inline constexpr double kPi = 3.14159265358979323846;

/// Relative tolerance for point/segment coincidence, scaled by polygon diameter.
inline constexpr double kEpsGeom = 1e-9;
inline constexpr double kEpsUnit = 1e-12;
inline constexpr double kEpsAngle = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
/// Counterclockwise quarter turn.
inline Point2 perp(Point2 a) { return {-a.y, a.x}; }

/// Unit-length direction. Construction normalizes; the fields are read-only so
/// the unit invariant cannot be broken after the fact.
class UnitDir {
 public:
  UnitDir() = default;
  static UnitDir from(Point2 v);
  static UnitDir from_angle(double angle) { return UnitDir(std::cos(angle), std::sin(angle)); }

  double dx() const { return dx_; }
  double dy() const { return dy_; }
  Point2 vec() const { return {dx_, dy_}; }
  UnitDir operator-() const { return UnitDir(-dx_, -dy_); }

 private:
  UnitDir(double dx, double dy) : dx_(dx), dy_(dy) {}
  double dx_ = 1.0;
  double dy_ = 0.0;
};

/// Simple polygon with counterclockwise vertex order. Only `validate_polygon`
/// produces instances, so every Polygon satisfies the validity invariants.
class Polygon {
 public:
  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }
  const Point2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  /// Edge i runs from vertex i to vertex i+1 (mod n).
  Point2 edge_start(std::size_t i) const { return vertex(i); }
  Point2 edge_end(std::size_t i) const { return vertex(i + 1); }

  double area() const;
  double diameter() const { return diameter_; }
  double perimeter() const;
  /// Absolute coincidence tolerance: kEpsGeom times the diameter.
  double tolerance() const { return kEpsGeom * diameter_; }

  friend Polygon validate_polygon(std::span<const Point2> points);

 private:
  std::vector<Point2> vertices_;
  double diameter_ = 0.0;
};

struct BoundingBox {
  Point2 lo;
  Point2 hi;
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double area() const { return width() * height(); }
};

struct InteriorAngle {
  std::size_t vertex_index = 0;
  double theta = 0.0;
  bool is_reflex = false;
};

struct AngleRationality {
  std::size_t vertex_index = 0;
  std::int64_t p = 0;
  std::int64_t q = 1;
  double residual = 0.0;
  bool is_rational = false;
};

struct RationalityReport {
  std::vector<AngleRationality> angles;
  bool is_rational_within_tol = false;
};

struct MetricEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Best rational approximation p/q of x with 1 <= q <= q_max (closest value,
/// smallest q on ties), via convergents and semiconvergents.
struct Rational {
  std::int64_t p = 0;
  std::int64_t q = 1;
};
Rational best_rational(double x, std::int64_t q_max);

// ---------------------------------------------------------------------------
// Primitive predicates

double signed_area(std::span<const Point2> pts);
BoundingBox bounding_box(std::span<const Point2> pts);
double point_segment_distance(Point2 p, Point2 a, Point2 b);
/// Closed-segment intersection test; `eps` is an absolute distance slack.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d, double eps);
/// Crossing-number containment; boundary points may fall either way.
bool point_in_polygon(Point2 p, const Polygon& poly);
/// Strict interior: inside and farther than `margin` from every edge.
bool strictly_inside(Point2 p, const Polygon& poly, double margin);
double distance_to_boundary(Point2 p, const Polygon& poly);

// ---------------------------------------------------------------------------
// Operations

Polygon validate_polygon(std::span<const Point2> points);
inline Polygon validate_polygon(const std::vector<Point2>& points) {
  return validate_polygon(std::span<const Point2>(points));
}

std::vector<InteriorAngle> interior_angles(const Polygon& p);
std::size_t reflex_count(const Polygon& p);

RationalityReport rationality_report(const Polygon& p, double tol_rat = 1e-9,
                                     std::int64_t q_max = 1'000'000);

/// Monte Carlo estimate of the symmetric-difference area over the joint
/// bounding box. Deterministic in `seed`, symmetric in (p, q).
MetricEstimate polygon_metric_d(const Polygon& p, const Polygon& q, std::int64_t samples,
                                std::uint64_t seed);

/// Replace edge `edge_index` by two edges through a new vertex on its
/// perpendicular bisector, pushed inward so the new interior angle is pi + pi/k.
Polygon reflexify(const Polygon& p, std::size_t edge_index, int k);

/// Smallest k for which `reflexify(p, edge_index, k)` succeeds (scans up to k_cap).
int reflexify_min_k(const Polygon& p, std::size_t edge_index, int k_cap = 1 << 20);

/// Rotate/translate so vertex 0 sits at the origin and vertex n-1 on the positive x-axis.
Polygon canonical_embedding(const Polygon& p);

}  // namespace pbill
