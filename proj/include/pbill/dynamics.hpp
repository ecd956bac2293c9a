#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "pbill/table.hpp"

namespace pbill {

/// |cos phi| below this marks a grazing reflection.
inline constexpr double kEpsGraze = 1e-8;
/// Minimum flight, relative to the table diameter.
inline constexpr double kEpsTimeRel = 1e-12;

/// A point of the billiard-map phase space: boundary position plus the
/// reflection angle phi, measured from the inward normal towards the chain
/// tangent.
struct PhaseState {
  Point2 point;
  std::size_t component_id = 0;
  double phi = 0.0;
  UnitDir outgoing_dir;
};

struct CollisionEvent {
  std::size_t index = 0;  // 1-based bounce number
  double t = 0.0;
  double tau = 0.0;
  Point2 point;
  std::size_t component_id = 0;
  double kappa = 0.0;
  double phi = 0.0;
  bool grazing = false;
};

enum class Termination { BounceLimit, TimeLimit, VertexHit, GrazingOverflow };
const char* to_string(Termination t);

struct TrajectoryRecord {
  PhaseState initial;
  std::vector<CollisionEvent> events;
  Termination termination = Termination::BounceLimit;
  std::size_t arc_hits = 0;
  std::size_t grazing_hits = 0;
  double radius = 0.0;

  double total_time() const { return events.empty() ? 0.0 : events.back().t; }
};

struct TrajectoryLimits {
  std::size_t max_bounces = 1000;  // 0 means unbounded
  double max_time = std::numeric_limits<double>::infinity();
  std::size_t max_grazing = 100;
};

/// Orientation-preserving or reversing isometry x -> M x + offset.
struct RigidMap {
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  Point2 offset;

  Point2 apply(Point2 p) const {
    return {m00 * p.x + m01 * p.y + offset.x, m10 * p.x + m11 * p.y + offset.y};
  }
  /// (this o other)(x) = this(other(x)).
  RigidMap compose(const RigidMap& other) const;
  static RigidMap reflection_across(Point2 a, Point2 b);
};

struct UnfoldingRecord {
  /// copies[0] is the identity; copies[i] maps P onto P_i.
  std::vector<RigidMap> copies;
  /// Unfolded initial point followed by every unfolded collision point.
  std::vector<Point2> points;
  double collinearity_residual = 0.0;
  double path_length = 0.0;
};

PhaseState make_state(const EquivalentTable& t, std::size_t component_id, Point2 point, double phi);
/// Time-reversed state at the same boundary point (phi -> -phi).
PhaseState reversed(const EquivalentTable& t, const PhaseState& s);

UnitDir reflect(UnitDir dir, UnitDir normal);

/// First boundary hit of the ray from `from` along `dir`. The returned event
/// has index 0 and t == tau. Throws VertexAmbiguity for hits at a chain joint.
CollisionEvent next_collision(const EquivalentTable& t, Point2 from, UnitDir dir);

std::pair<PhaseState, CollisionEvent> step(const EquivalentTable& t, const PhaseState& s);

TrajectoryRecord simulate(const EquivalentTable& t, const PhaseState& s0,
                          const TrajectoryLimits& limits);
inline TrajectoryRecord simulate(const EquivalentTable& t, const PhaseState& s0,
                                 std::size_t max_bounces,
                                 double max_time = std::numeric_limits<double>::infinity()) {
  return simulate(t, s0, TrajectoryLimits{max_bounces, max_time});
}

/// Draw from the invariant boundary measure (arclength x cos(phi) dphi).
/// Deterministic in (seed, index).
PhaseState sample_initial(const EquivalentTable& t, std::uint64_t seed, std::uint64_t index);
/// As `sample_initial`, restricted to dispersing arcs.
PhaseState sample_on_arcs(const EquivalentTable& t, std::uint64_t seed, std::uint64_t index);

UnfoldingRecord unfold(const Polygon& p, const TrajectoryRecord& rec);

}  // namespace pbill
