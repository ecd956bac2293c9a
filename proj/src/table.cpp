#include "pbill/table.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace pbill {

namespace {

constexpr double kTangencyTol = 1e-8;

double wrap_relative(double a, double ref) { return std::remainder(a - ref, 2.0 * kPi); }

double arc_distance(const DispersingArc& arc, Point2 p) {
  const Point2 d = p - arc.center;
  const double rho = norm(d);
  if (rho > 0.0 && arc.contains_angle(std::atan2(d.y, d.x), 0.0)) return std::abs(rho - arc.radius);
  return std::min(distance(p, arc.point_at_angle(arc.angle_start)),
                  distance(p, arc.point_at_angle(arc.angle_end)));
}

bool wall_wall_touch(const Wall& u, const Wall& v, double tol) {
  return segments_intersect(u.a, u.b, v.a, v.b, tol);
}

bool wall_arc_touch(const Wall& w, const DispersingArc& arc, double tol) {
  const Point2 arc_a = arc.point_at_angle(arc.angle_start);
  const Point2 arc_b = arc.point_at_angle(arc.angle_end);
  if (arc_distance(arc, w.a) <= tol || arc_distance(arc, w.b) <= tol) return true;
  if (point_segment_distance(arc_a, w.a, w.b) <= tol ||
      point_segment_distance(arc_b, w.a, w.b) <= tol) {
    return true;
  }
  const Point2 d = w.b - w.a;
  const Point2 m = w.a - arc.center;
  const double qa = dot(d, d);
  const double qb = dot(m, d);
  const double qc = dot(m, m) - arc.radius * arc.radius;
  const double disc = qb * qb - qa * qc;
  if (disc < 0.0) {
    // Possibly a near-tangent pass: compare the closest approach with the radius.
    const double t = std::clamp(-qb / qa, 0.0, 1.0);
    const Point2 closest = w.a + t * d;
    return arc_distance(arc, closest) <= tol;
  }
  const double sq = std::sqrt(disc);
  for (const double t : {(-qb - sq) / qa, (-qb + sq) / qa}) {
    if (t < 0.0 || t > 1.0) continue;
    const Point2 x = w.a + t * d - arc.center;
    if (arc.contains_angle(std::atan2(x.y, x.x), 0.0)) return true;
  }
  return false;
}

bool arc_arc_touch(const DispersingArc& u, const DispersingArc& v, double tol) {
  for (const double a : {u.angle_start, u.angle_end}) {
    if (arc_distance(v, u.point_at_angle(a)) <= tol) return true;
  }
  for (const double a : {v.angle_start, v.angle_end}) {
    if (arc_distance(u, v.point_at_angle(a)) <= tol) return true;
  }
  const Point2 dc = v.center - u.center;
  const double d = norm(dc);
  if (d == 0.0 || d > u.radius + v.radius + tol || d < std::abs(u.radius - v.radius) - tol) {
    return false;
  }
  const double along = (d * d + u.radius * u.radius - v.radius * v.radius) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, u.radius * u.radius - along * along));
  const Point2 e = (1.0 / d) * dc;
  const Point2 base = u.center + along * e;
  for (const double sgn : {-1.0, 1.0}) {
    const Point2 x = base + sgn * h * perp(e);
    const Point2 du = x - u.center;
    const Point2 dv = x - v.center;
    if (u.contains_angle(std::atan2(du.y, du.x), 0.0) &&
        v.contains_angle(std::atan2(dv.y, dv.x), 0.0)) {
      return true;
    }
  }
  return false;
}

bool components_touch(const Component& c1, const Component& c2, double tol) {
  return std::visit(
      [tol](const auto& x, const auto& y) -> bool {
        using X = std::decay_t<decltype(x)>;
        using Y = std::decay_t<decltype(y)>;
        if constexpr (std::is_same_v<X, Wall> && std::is_same_v<Y, Wall>) {
          return wall_wall_touch(x, y, tol);
        } else if constexpr (std::is_same_v<X, Wall>) {
          return wall_arc_touch(x, y, tol);
        } else if constexpr (std::is_same_v<Y, Wall>) {
          return wall_arc_touch(y, x, tol);
        } else {
          return arc_arc_touch(x, y, tol);
        }
      },
      c1, c2);
}

double turn_between(UnitDir a, UnitDir b) {
  return std::atan2(cross(a.vec(), b.vec()), dot(a.vec(), b.vec()));
}

}  // namespace

bool DispersingArc::contains_angle(double a, double slack) const {
  const double rel = wrap_relative(a, angle_start);
  return rel >= -slack && rel <= span() + slack;
}

Point2 chain_start(const Component& c) {
  if (const auto* w = std::get_if<Wall>(&c)) return w->a;
  const auto& arc = std::get<DispersingArc>(c);
  return arc.point_at_angle(arc.angle_end);
}

Point2 chain_end(const Component& c) {
  if (const auto* w = std::get_if<Wall>(&c)) return w->b;
  const auto& arc = std::get<DispersingArc>(c);
  return arc.point_at_angle(arc.angle_start);
}

double length(const Component& c) {
  if (const auto* w = std::get_if<Wall>(&c)) return distance(w->a, w->b);
  const auto& arc = std::get<DispersingArc>(c);
  return arc.radius * arc.span();
}

double curvature(const Component& c) {
  if (const auto* arc = std::get_if<DispersingArc>(&c)) return 1.0 / arc->radius;
  return 0.0;
}

Point2 point_at(const Component& c, double s) {
  if (const auto* w = std::get_if<Wall>(&c)) {
    const double len = distance(w->a, w->b);
    return w->a + (s / len) * (w->b - w->a);
  }
  const auto& arc = std::get<DispersingArc>(c);
  return arc.point_at_angle(arc.angle_end - s / arc.radius);
}

UnitDir tangent_at(const Component& c, double s) {
  if (const auto* w = std::get_if<Wall>(&c)) return UnitDir::from(w->b - w->a);
  const auto& arc = std::get<DispersingArc>(c);
  const double a = arc.angle_end - s / arc.radius;
  return UnitDir::from({std::sin(a), -std::cos(a)});
}

UnitDir inward_normal(const Component& c, Point2 p) {
  if (const auto* w = std::get_if<Wall>(&c)) return w->inward_normal;
  return UnitDir::from(p - std::get<DispersingArc>(c).center);
}

double distance_to(const Component& c, Point2 p) {
  if (const auto* w = std::get_if<Wall>(&c)) return point_segment_distance(p, w->a, w->b);
  return arc_distance(std::get<DispersingArc>(c), p);
}

std::size_t EquivalentTable::arc_count() const {
  return static_cast<std::size_t>(std::count_if(components.begin(), components.end(), is_arc));
}

double EquivalentTable::boundary_length() const {
  double total = 0.0;
  for (const auto& c : components) total += length(c);
  return total;
}

double compute_rk(const Polygon& p, std::size_t k) {
  const std::size_t n = p.size();
  if (k >= n) throw std::out_of_range("compute_rk: vertex index out of range");
  const std::size_t before = (k + n - 1) % n;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < n; ++e) {
    if (e == k || e == before) continue;
    best = std::min(best, point_segment_distance(p[k], p.edge_start(e), p.edge_end(e)));
  }
  return best;
}

double compute_rP(const Polygon& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.size(); ++k) best = std::min(best, compute_rk(p, k));
  return 0.5 * best;
}

EquivalentTable build_equivalent_table(const Polygon& p, double r) {
  const double r_max = compute_rP(p);
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::RadiusTooLarge, "radius must be a finite value >= 0");
  }
  if (r >= r_max) {
    throw Error(ErrorCode::RadiusTooLarge,
                "radius " + std::to_string(r) + " is not below r_P = " + std::to_string(r_max));
  }

  const std::size_t n = p.size();
  const auto angles = interior_angles(p);
  std::vector<UnitDir> dirs;
  std::vector<UnitDir> normals;
  dirs.reserve(n);
  normals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    dirs.push_back(UnitDir::from(p.edge_end(i) - p.edge_start(i)));
    normals.push_back(UnitDir::from(perp(dirs.back().vec())));
  }

  const bool eroding = r > 0.0;
  // Where each offset wall starts and ends.
  std::vector<Point2> wall_start(n);
  std::vector<Point2> wall_end(n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t in = (v + n - 1) % n;
    const Point2 n_in = normals[in].vec();
    const Point2 n_out = normals[v].vec();
    if (!eroding) {
      wall_end[in] = p[v];
      wall_start[v] = p[v];
    } else if (angles[v].is_reflex) {
      wall_end[in] = p[v] + r * n_in;
      wall_start[v] = p[v] + r * n_out;
    } else {
      const Point2 miter = p[v] + (r / (1.0 + dot(n_in, n_out))) * (n_in + n_out);
      wall_end[in] = miter;
      wall_start[v] = miter;
    }
  }

  EquivalentTable table;
  table.radius = r;
  table.source = p;
  for (std::size_t e = 0; e < n; ++e) {
    table.components.emplace_back(Wall{wall_start[e], wall_end[e], normals[e], e});
    const std::size_t v = (e + 1) % n;
    if (eroding && angles[v].is_reflex) {
      DispersingArc arc;
      arc.center = p[v];
      arc.radius = r;
      arc.angle_start = std::atan2(normals[v].dy(), normals[v].dx());
      arc.angle_end = arc.angle_start + (angles[v].theta - kPi);
      arc.source_vertex = v;
      table.components.emplace_back(arc);
    }
  }

  (void)validate_table(table);
  return table;
}

ChainResiduals validate_table(const EquivalentTable& t) {
  const double tol = t.tolerance();
  const std::size_t m = t.components.size();
  ChainResiduals res;
  if (m < 3) throw Error(ErrorCode::ErosionInvalid, "chain has fewer than 3 components");

  for (std::size_t i = 0; i < m; ++i) {
    const Component& cur = t.components[i];
    const Component& next = t.components[(i + 1) % m];
    res.closure_gap = std::max(res.closure_gap, distance(chain_end(cur), chain_start(next)));
    if (is_arc(cur) || is_arc(next)) {
      const double turn = turn_between(tangent_at(cur, length(cur)), tangent_at(next, 0.0));
      res.tangency = std::max(res.tangency, std::abs(turn));
    }
    if (const auto* w = std::get_if<Wall>(&cur)) {
      const Point2 along = w->b - w->a;
      const Point2 edge = t.source.edge_end(w->source_edge) - t.source.edge_start(w->source_edge);
      if (norm(along) <= tol || dot(along, edge) <= 0.0) {
        throw Error(ErrorCode::ErosionInvalid,
                    "offset wall of edge " + std::to_string(w->source_edge) + " vanishes");
      }
    }
  }
  if (res.closure_gap > tol) {
    throw Error(ErrorCode::ErosionInvalid, "chain is not closed");
  }
  if (res.tangency > kTangencyTol) {
    throw Error(ErrorCode::ErosionInvalid, "arc does not meet its walls tangentially");
  }

  if (t.radius > 0.0) {
    // Every joint must keep the disc clear of the source boundary.
    for (const auto& c : t.components) {
      for (const double frac : {0.0, 0.5}) {
        const Point2 x = point_at(c, frac * length(c));
        if (distance_to_boundary(x, t.source) < t.radius - tol ||
            !point_in_polygon(x, t.source)) {
          throw Error(ErrorCode::ErosionInvalid, "eroded boundary leaves the admissible region");
        }
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      if (components_touch(t.components[i], t.components[j], tol)) {
        throw Error(ErrorCode::ErosionInvalid, "components " + std::to_string(i) + " and " +
                                                   std::to_string(j) + " intersect");
      }
    }
  }
  return res;
}

Polygon flatten_arcs(const EquivalentTable& t) {
  std::vector<Point2> verts;
  verts.reserve(t.components.size());
  for (const auto& c : t.components) verts.push_back(chain_start(c));
  return validate_polygon(verts);
}

}  // namespace pbill
