#include <doctest.h>

#include "oracles.hpp"
#include "pbill/table.hpp"

using namespace pbill;

namespace {

const Polygon& square() {
  static const Polygon p = validate_polygon(oracle::kSquare);
  return p;
}
const Polygon& lshape() {
  static const Polygon p = validate_polygon(oracle::kLShape);
  return p;
}

/// Area enclosed by the chain: shoelace over the chord polygon minus the
/// circular segments cut off by each arc.
double chain_area(const EquivalentTable& t) {
  double area = flatten_arcs(t).area();
  for (const auto& c : t.components) {
    if (const auto* arc = std::get_if<DispersingArc>(&c)) {
      const double a = arc->span();
      area -= 0.5 * arc->radius * arc->radius * (a - std::sin(a));
    }
  }
  return area;
}

ErrorCode build_error(const Polygon& p, double r) {
  try {
    (void)build_equivalent_table(p, r);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("table unexpectedly valid");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("compute_rk against the brute-force oracle") {
  CHECK(compute_rk(lshape(), 3) == doctest::Approx(1.0));
  for (std::size_t k = 0; k < 4; ++k) CHECK(compute_rk(square(), k) == doctest::Approx(1.0));
  for (std::size_t k = 0; k < 6; ++k) {
    const Point2 v = lshape()[k];
    double want = INFINITY;
    for (std::size_t e = 0; e < 6; ++e) {
      if (e == k || (e + 1) % 6 == k) continue;
      want = std::min(want, oracle::sampled_segment_distance(v, lshape().edge_start(e),
                                                             lshape().edge_end(e)));
    }
    CHECK(compute_rk(lshape(), k) == doctest::Approx(want).epsilon(1e-9));
    CHECK(compute_rk(lshape(), k) > 0.0);
  }
}

TEST_CASE("compute_rP") {
  CHECK(compute_rP(lshape()) == doctest::Approx(0.5));
  CHECK(compute_rP(square()) == doctest::Approx(0.5));
  CHECK(compute_rP(square()) == doctest::Approx(oracle::brute_force_rP(oracle::kSquare)));
  CHECK(compute_rP(lshape()) == doctest::Approx(oracle::brute_force_rP(oracle::kLShape)));
}

TEST_CASE("erosion of the unit square") {
  const auto t = build_equivalent_table(square(), 0.1);
  CHECK(t.arc_count() == 0);
  REQUIRE(t.components.size() == 4);
  const std::vector<Point2> corners{{0.1, 0.1}, {0.9, 0.1}, {0.9, 0.9}, {0.1, 0.9}};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& w = std::get<Wall>(t.components[i]);
    CHECK(w.a.x == doctest::Approx(corners[i].x));
    CHECK(w.a.y == doctest::Approx(corners[i].y));
    CHECK(w.source_edge == i);
  }
}

TEST_CASE("r = 0 returns exactly the polygon edges") {
  const auto t = build_equivalent_table(lshape(), 0.0);
  REQUIRE(t.components.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& w = std::get<Wall>(t.components[i]);
    CHECK(w.a == lshape().edge_start(i));
    CHECK(w.b == lshape().edge_end(i));
  }
}

TEST_CASE("erosion of the L-polygon at r = 0.2") {
  const auto t = build_equivalent_table(lshape(), 0.2);
  CHECK(t.components.size() == 7);
  CHECK(t.arc_count() == 1);

  const DispersingArc* arc = nullptr;
  for (const auto& c : t.components) {
    if (const auto* a = std::get_if<DispersingArc>(&c)) arc = a;
  }
  REQUIRE(arc != nullptr);
  CHECK(arc->center == Point2{1, 1});
  CHECK(arc->radius == 0.2);
  CHECK(arc->span() == doctest::Approx(kPi / 2));
  CHECK(arc->source_vertex == 3);

  // Offset lines y = 0.8 (edge (2,1)->(1,1)) and x = 0.8 (edge (1,1)->(1,2))
  // meet the circle of radius 0.2 about (1,1) at these points.
  const Component arc_c = *arc;
  CHECK(chain_start(arc_c).x == doctest::Approx(1.0));
  CHECK(chain_start(arc_c).y == doctest::Approx(0.8));
  CHECK(chain_end(arc_c).x == doctest::Approx(0.8));
  CHECK(chain_end(arc_c).y == doctest::Approx(1.0));
  CHECK(curvature(arc_c) == doctest::Approx(5.0));

  const auto res = validate_table(t);
  CHECK(res.closure_gap < kEpsGeom * lshape().diameter());
  CHECK(res.tangency < 1e-8);
}

TEST_CASE("every eroded boundary point is at distance r from the polygon") {
  for (const double r : {0.05, 0.2, 0.45}) {
    const auto t = build_equivalent_table(lshape(), r);
    for (const auto& c : t.components) {
      const double len = length(c);
      for (int i = 0; i < 100; ++i) {
        const Point2 x = point_at(c, len * (i + 0.5) / 100.0);
        CHECK(std::abs(distance_to_boundary(x, lshape()) - r) < 1e-8);
        CHECK(distance_to(c, x) < 1e-12);
      }
    }
  }
}

TEST_CASE("arc count equals reflex count on random polygons") {
  std::mt19937_64 rng(3);
  int built = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon p = validate_polygon(oracle::random_star_polygon(rng, 4 + trial % 8, false));
    const double r = 0.3 * compute_rP(p);
    EquivalentTable t;
    try {
      t = build_equivalent_table(p, r);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ErosionInvalid);
      continue;
    }
    ++built;
    CHECK(t.arc_count() == reflex_count(p));
    const auto res = validate_table(t);
    CHECK(res.closure_gap < p.tolerance());
    CHECK(res.tangency < 1e-8);
  }
  CHECK(built > 150);
}

TEST_CASE("convex polygons erode without arcs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Polygon p = validate_polygon(oracle::random_star_polygon(rng, 5 + trial % 6, true));
    const auto t = build_equivalent_table(p, 0.25 * compute_rP(p));
    CHECK(t.arc_count() == 0);
  }
}

TEST_CASE("table area shrinks with r and matches the erosion definition") {
  double previous = lshape().area();
  for (const double r : {0.0, 0.1, 0.2, 0.3, 0.4, 0.49}) {
    const auto t = build_equivalent_table(lshape(), r);
    const double exact = chain_area(t);
    double se = 0.0;
    const double mc = oracle::mc_erosion_area(lshape(), r, 200'000, 77, &se);
    CHECK(std::abs(exact - mc) < 4 * se + 1e-12);
    if (r > 0.0) CHECK(exact < previous);
    previous = exact;
  }
}

TEST_CASE("radius guards") {
  CHECK(build_error(lshape(), 0.6) == ErrorCode::RadiusTooLarge);
  CHECK(build_error(lshape(), 0.5) == ErrorCode::RadiusTooLarge);
  CHECK(build_error(lshape(), -0.1) == ErrorCode::RadiusTooLarge);
  // The r_P bound allows r up to half the smallest height, beyond the
  // inradius of an equilateral triangle; the erosion is then empty.
  const Polygon tri =
      validate_polygon({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  const double inradius = 1.0 / (2.0 * std::sqrt(3.0));
  CHECK(compute_rP(tri) > inradius);
  CHECK_NOTHROW((void)build_equivalent_table(tri, 0.9 * inradius));
  CHECK(build_error(tri, 0.5 * (inradius + compute_rP(tri))) == ErrorCode::ErosionInvalid);
}

TEST_CASE("flatten_arcs") {
  SUBCASE("L-polygon: chord angles are (pi + theta)/2") {
    const auto t = build_equivalent_table(lshape(), 0.2);
    const Polygon flat = flatten_arcs(t);
    CHECK(flat.size() == 7);
    const auto angles = interior_angles(flat);
    int chord_corners = 0;
    for (const auto& a : angles) {
      const Point2 v = flat[a.vertex_index];
      const bool on_chord = (std::abs(v.x - 1.0) < 1e-12 && std::abs(v.y - 0.8) < 1e-12) ||
                            (std::abs(v.x - 0.8) < 1e-12 && std::abs(v.y - 1.0) < 1e-12);
      if (on_chord) {
        ++chord_corners;
        CHECK(a.theta == doctest::Approx((kPi + 1.5 * kPi) / 2).epsilon(1e-12));
      }
    }
    CHECK(chord_corners == 2);
    CHECK(rationality_report(flat).is_rational_within_tol);
  }
  SUBCASE("no arcs: the wall polygon itself") {
    const auto t = build_equivalent_table(square(), 0.0);
    const Polygon flat = flatten_arcs(t);
    CHECK(std::equal(flat.vertices().begin(), flat.vertices().end(), square().vertices().begin()));
  }
  SUBCASE("rational source stays rational") {
    const Polygon step = validate_polygon({{0, 0}, {3, 0}, {3, 1}, {2, 1}, {2, 2}, {1, 2}, {1, 3}, {0, 3}});
    REQUIRE(rationality_report(step).is_rational_within_tol);
    const auto t = build_equivalent_table(step, 0.1);
    CHECK(t.arc_count() == 2);
    CHECK(rationality_report(flatten_arcs(t)).is_rational_within_tol);
  }
}
