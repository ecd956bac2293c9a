#pragma once

#include <variant>
#include <vector>

#include "pbill/geometry.hpp"

namespace pbill {

/// Flat boundary piece, traversed from `a` to `b` with the table on the left.
struct Wall {
  Point2 a;
  Point2 b;
  UnitDir inward_normal;
  std::size_t source_edge = 0;
};

/// Circular piece centred at a reflex vertex of the source polygon.
///
/// The arc covers the counterclockwise angular range [angle_start, angle_end]
/// (span below pi). The table lies outside the circle, so the boundary chain
/// runs clockwise around the centre: it enters at angle_end and leaves at
/// angle_start.
struct DispersingArc {
  Point2 center;
  double radius = 0.0;
  double angle_start = 0.0;
  double angle_end = 0.0;
  std::size_t source_vertex = 0;

  double span() const { return angle_end - angle_start; }
  Point2 point_at_angle(double a) const {
    return center + radius * Point2{std::cos(a), std::sin(a)};
  }
  /// True when `a` lies inside the span, widened by `slack` radians on each side.
  bool contains_angle(double a, double slack) const;
};

using Component = std::variant<Wall, DispersingArc>;

inline bool is_arc(const Component& c) { return std::holds_alternative<DispersingArc>(c); }

Point2 chain_start(const Component& c);
Point2 chain_end(const Component& c);
double length(const Component& c);
/// 0 for walls, 1/r for arcs (positive means dispersing).
double curvature(const Component& c);
/// Point at arclength `s` from the chain start.
Point2 point_at(const Component& c, double s);
/// Unit tangent along the chain direction at the point with arclength `s`.
UnitDir tangent_at(const Component& c, double s);
/// Normal pointing into the table at (or nearest to) `p`.
UnitDir inward_normal(const Component& c, Point2 p);
double distance_to(const Component& c, Point2 p);

/// The billiard table seen by the centre of a disc of radius `radius`.
struct EquivalentTable {
  std::vector<Component> components;
  double radius = 0.0;
  Polygon source;

  std::size_t arc_count() const;
  double boundary_length() const;
  double tolerance() const { return source.tolerance(); }
};

struct ChainResiduals {
  double closure_gap = 0.0;
  double tangency = 0.0;
};

/// Distance from v_k to the nearest edge not incident to v_k.
double compute_rk(const Polygon& p, std::size_t k);
/// Half the smallest r_k; radii strictly below this are admissible.
double compute_rP(const Polygon& p);

/// Inward erosion of `p` by `r`: offset walls with mitred convex corners and a
/// dispersing arc at each reflex vertex. r = 0 returns the polygon's edges.
EquivalentTable build_equivalent_table(const Polygon& p, double r);

/// Closure and tangency residuals plus the simplicity check; throws
/// ErosionInvalid when the chain is broken.
ChainResiduals validate_table(const EquivalentTable& t);

/// Polygon obtained by replacing every arc with its chord.
Polygon flatten_arcs(const EquivalentTable& t);

}  // namespace pbill
