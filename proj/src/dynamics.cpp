#include "pbill/dynamics.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace pbill {

namespace {

struct Hit {
  double s = std::numeric_limits<double>::infinity();
  std::size_t component = 0;
  Point2 point;
  bool found = false;
};

/// Ray parameter of the hit on `c`, or +inf. Only hits approached from the
/// table side (dir . inward_normal < 0) count.
double ray_hit(const Component& c, Point2 from, Point2 dir, double eps_time, double tol) {
  constexpr double kMiss = std::numeric_limits<double>::infinity();
  if (const auto* w = std::get_if<Wall>(&c)) {
    const Point2 n = w->inward_normal.vec();
    const double denom = dot(dir, n);
    if (!(denom < 0.0)) return kMiss;
    const double s = dot(w->a - from, n) / denom;
    if (!(s > eps_time)) return kMiss;
    const Point2 x = from + s * dir;
    const Point2 along = w->b - w->a;
    const double len = norm(along);
    const double proj = dot(x - w->a, along) / len;
    if (proj < -tol || proj > len + tol) return kMiss;
    return s;
  }
  const auto& arc = std::get<DispersingArc>(c);
  const Point2 m = from - arc.center;
  const double b = dot(dir, m);
  if (!(b < 0.0)) return kMiss;
  const double cq = dot(m, m) - arc.radius * arc.radius;
  if (cq < 0.0) return kMiss;
  const double disc = b * b - cq;
  if (disc < 0.0) return kMiss;
  // Entry root via the cancellation-free form: q = -b + sqrt(disc) > 0.
  const double q = -b + std::sqrt(disc);
  const double s = cq / q;
  if (!(s > eps_time)) return kMiss;
  const Point2 x = m + s * dir;
  if (!arc.contains_angle(std::atan2(x.y, x.x), tol / arc.radius)) return kMiss;
  return s;
}

Hit find_hit(const EquivalentTable& t, Point2 from, Point2 dir) {
  const double tol = t.tolerance();
  const double eps_time = kEpsTimeRel * t.source.diameter();
  Hit best;
  for (std::size_t i = 0; i < t.components.size(); ++i) {
    const double s = ray_hit(t.components[i], from, dir, eps_time, tol);
    if (s < best.s) {
      best.s = s;
      best.component = i;
      best.found = true;
    }
  }
  if (best.found) best.point = from + best.s * dir;
  return best;
}

bool near_joint(const EquivalentTable& t, const Hit& hit) {
  const Component& c = t.components[hit.component];
  const double tol = t.tolerance();
  return distance(hit.point, chain_start(c)) <= tol || distance(hit.point, chain_end(c)) <= tol;
}

UnitDir chain_tangent_from_normal(UnitDir n) { return UnitDir::from({n.dy(), -n.dx()}); }

struct Advance {
  PhaseState state;
  CollisionEvent event;
  bool at_joint = false;
};

Advance advance(const EquivalentTable& t, Point2 from, UnitDir dir, double t_prev,
                std::size_t index) {
  const Hit hit = find_hit(t, from, dir.vec());
  if (!hit.found) {
    throw Error(ErrorCode::NoCollision, "ray escaped the table from (" + std::to_string(from.x) +
                                            ", " + std::to_string(from.y) + ")");
  }
  const Component& c = t.components[hit.component];
  const UnitDir n = inward_normal(c, hit.point);
  const double cos_phi = -dot(dir.vec(), n.vec());
  const UnitDir out = UnitDir::from(dir.vec() - 2.0 * dot(dir.vec(), n.vec()) * n.vec());
  const UnitDir tan = chain_tangent_from_normal(n);
  const double phi = std::atan2(dot(out.vec(), tan.vec()), dot(out.vec(), n.vec()));

  Advance a;
  a.event.index = index;
  a.event.tau = hit.s;
  a.event.t = t_prev + hit.s;
  a.event.point = hit.point;
  a.event.component_id = hit.component;
  a.event.kappa = curvature(c);
  a.event.phi = phi;
  a.event.grazing = cos_phi < kEpsGraze;
  a.state = PhaseState{hit.point, hit.component, phi, out};
  a.at_joint = near_joint(t, hit);
  return a;
}

std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

PhaseState sample_on(const EquivalentTable& t, const std::vector<std::size_t>& pool,
                     std::uint64_t seed, std::uint64_t index) {
  auto rng = trajectory_rng(seed, index);
  double total = 0.0;
  for (const auto i : pool) total += length(t.components[i]);
  const double tol = t.tolerance();
  for (;;) {
    double s = uniform01(rng) * total;
    const double v = uniform01(rng);
    std::size_t comp = pool.back();
    for (const auto i : pool) {
      const double len = length(t.components[i]);
      if (s < len) {
        comp = i;
        break;
      }
      s -= len;
    }
    const double len = length(t.components[comp]);
    // Joints are measure zero; redraw rather than start on one.
    if (s <= tol || s >= len - tol) continue;
    const double phi = std::asin(2.0 * v - 1.0);
    if (std::cos(phi) < kEpsGraze) continue;
    return make_state(t, comp, point_at(t.components[comp], s), phi);
  }
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::BounceLimit: return "BounceLimit";
    case Termination::TimeLimit: return "TimeLimit";
    case Termination::VertexHit: return "VertexHit";
    case Termination::GrazingOverflow: return "GrazingOverflow";
  }
  return "Unknown";
}

RigidMap RigidMap::compose(const RigidMap& o) const {
  RigidMap r;
  r.m00 = m00 * o.m00 + m01 * o.m10;
  r.m01 = m00 * o.m01 + m01 * o.m11;
  r.m10 = m10 * o.m00 + m11 * o.m10;
  r.m11 = m10 * o.m01 + m11 * o.m11;
  r.offset = apply(o.offset);
  return r;
}

RigidMap RigidMap::reflection_across(Point2 a, Point2 b) {
  const Point2 u = UnitDir::from(b - a).vec();
  RigidMap r;
  r.m00 = 2.0 * u.x * u.x - 1.0;
  r.m01 = 2.0 * u.x * u.y;
  r.m10 = r.m01;
  r.m11 = 2.0 * u.y * u.y - 1.0;
  const Point2 ma{r.m00 * a.x + r.m01 * a.y, r.m10 * a.x + r.m11 * a.y};
  r.offset = a - ma;
  return r;
}

PhaseState make_state(const EquivalentTable& t, std::size_t component_id, Point2 point,
                      double phi) {
  if (component_id >= t.components.size()) throw std::out_of_range("make_state: bad component");
  if (!(std::abs(phi) < 0.5 * kPi)) throw std::invalid_argument("make_state: |phi| must be < pi/2");
  const UnitDir n = inward_normal(t.components[component_id], point);
  const UnitDir tan = chain_tangent_from_normal(n);
  const UnitDir out = UnitDir::from(std::cos(phi) * n.vec() + std::sin(phi) * tan.vec());
  return PhaseState{point, component_id, phi, out};
}

PhaseState reversed(const EquivalentTable& t, const PhaseState& s) {
  return make_state(t, s.component_id, s.point, -s.phi);
}

UnitDir reflect(UnitDir dir, UnitDir normal) {
  const double dn = dot(dir.vec(), normal.vec());
  if (!(dn < 0.0)) throw Error(ErrorCode::NotIncoming, "direction does not approach the boundary");
  return UnitDir::from(dir.vec() - 2.0 * dn * normal.vec());
}

CollisionEvent next_collision(const EquivalentTable& t, Point2 from, UnitDir dir) {
  const Advance a = advance(t, from, dir, 0.0, 0);
  if (a.at_joint) {
    throw Error(ErrorCode::VertexAmbiguity,
                "hit within tolerance of a chain joint on component " +
                    std::to_string(a.event.component_id));
  }
  return a.event;
}

std::pair<PhaseState, CollisionEvent> step(const EquivalentTable& t, const PhaseState& s) {
  const Advance a = advance(t, s.point, s.outgoing_dir, 0.0, 1);
  if (a.at_joint) {
    throw Error(ErrorCode::VertexAmbiguity,
                "hit within tolerance of a chain joint on component " +
                    std::to_string(a.event.component_id));
  }
  return {a.state, a.event};
}

TrajectoryRecord simulate(const EquivalentTable& t, const PhaseState& s0,
                          const TrajectoryLimits& limits) {
  if (limits.max_bounces == 0 && !std::isfinite(limits.max_time)) {
    throw std::invalid_argument("simulate: need a bounce limit or a finite time limit");
  }
  TrajectoryRecord rec;
  rec.initial = s0;
  rec.radius = t.radius;
  if (limits.max_bounces > 0) rec.events.reserve(limits.max_bounces);

  PhaseState state = s0;
  double now = 0.0;
  for (std::size_t i = 1;; ++i) {
    if (limits.max_bounces > 0 && i > limits.max_bounces) {
      rec.termination = Termination::BounceLimit;
      break;
    }
    const Advance a = advance(t, state.point, state.outgoing_dir, now, i);
    if (a.event.t > limits.max_time) {
      rec.termination = Termination::TimeLimit;
      break;
    }
    rec.events.push_back(a.event);
    if (a.event.kappa > 0.0) ++rec.arc_hits;
    if (a.at_joint) {
      rec.termination = Termination::VertexHit;
      break;
    }
    if (a.event.grazing && ++rec.grazing_hits > limits.max_grazing) {
      rec.termination = Termination::GrazingOverflow;
      break;
    }
    state = a.state;
    now = a.event.t;
  }
  return rec;
}

PhaseState sample_initial(const EquivalentTable& t, std::uint64_t seed, std::uint64_t index) {
  std::vector<std::size_t> pool(t.components.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  return sample_on(t, pool, seed, index);
}

PhaseState sample_on_arcs(const EquivalentTable& t, std::uint64_t seed, std::uint64_t index) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < t.components.size(); ++i) {
    if (is_arc(t.components[i])) pool.push_back(i);
  }
  if (pool.empty()) throw Error(ErrorCode::NoArcs, "table has no dispersing arcs");
  return sample_on(t, pool, seed, index);
}

UnfoldingRecord unfold(const Polygon& p, const TrajectoryRecord& rec) {
  if (rec.radius > 0.0) {
    throw Error(ErrorCode::NotPolygonalMode, "unfolding needs a trajectory of the bare polygon");
  }
  UnfoldingRecord out;
  RigidMap current;
  out.copies.push_back(current);
  out.points.push_back(current.apply(rec.initial.point));
  for (const auto& ev : rec.events) {
    if (ev.component_id >= p.size()) throw std::out_of_range("unfold: component is not an edge");
    out.points.push_back(current.apply(ev.point));
    out.path_length += ev.tau;
    current = current.compose(
        RigidMap::reflection_across(p.edge_start(ev.component_id), p.edge_end(ev.component_id)));
    out.copies.push_back(current);
  }

  const Point2 first = out.points.front();
  const Point2 last = out.points.back();
  const double span = distance(first, last);
  for (const auto& x : out.points) {
    const double dev = span > 0.0 ? std::abs(cross(last - first, x - first)) / span
                                  : distance(x, first);
    out.collinearity_residual = std::max(out.collinearity_residual, dev);
  }
  return out;
}

}  // namespace pbill
