#include "pbill/geometry.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

namespace pbill {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::DegenerateArea: return "DegenerateArea";
    case ErrorCode::DuplicateVertices: return "DuplicateVertices";
    case ErrorCode::CollinearRun: return "CollinearRun";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::KTooSmall: return "KTooSmall";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::ErosionInvalid: return "ErosionInvalid";
    case ErrorCode::NotIncoming: return "NotIncoming";
    case ErrorCode::NoCollision: return "NoCollision";
    case ErrorCode::VertexAmbiguity: return "VertexAmbiguity";
    case ErrorCode::NoArcs: return "NoArcs";
    case ErrorCode::NotPolygonalMode: return "NotPolygonalMode";
    case ErrorCode::GrazingExcluded: return "GrazingExcluded";
    case ErrorCode::NoArcHits: return "NoArcHits";
    case ErrorCode::ExcludedTrajectory: return "ExcludedTrajectory";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

UnitDir UnitDir::from(Point2 v) {
  const double len = norm(v);
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw std::invalid_argument("UnitDir::from: zero or non-finite vector");
  }
  return UnitDir(v.x / len, v.y / len);
}

double Polygon::area() const { return signed_area(vertices_); }

double Polygon::perimeter() const {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) total += distance(edge_start(i), edge_end(i));
  return total;
}

double signed_area(std::span<const Point2> pts) {
  double twice = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * twice;
}

BoundingBox bounding_box(std::span<const Point2> pts) {
  BoundingBox box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
                  {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const auto& p : pts) {
    box.lo.x = std::min(box.lo.x, p.x);
    box.lo.y = std::min(box.lo.y, p.y);
    box.hi.x = std::max(box.hi.x, p.x);
    box.hi.y = std::max(box.hi.y, p.y);
  }
  return box;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d, double eps) {
  const double lab = norm(b - a);
  const double lcd = norm(d - c);
  if (lab == 0.0 || lcd == 0.0) {
    return std::min({point_segment_distance(a, c, d), point_segment_distance(c, a, b)}) <= eps;
  }
  // Signed distances of each segment's endpoints from the other's supporting line.
  const double dc = cross(b - a, c - a) / lab;
  const double dd = cross(b - a, d - a) / lab;
  const double da = cross(d - c, a - c) / lcd;
  const double db = cross(d - c, b - c) / lcd;
  if ((dc > eps && dd > eps) || (dc < -eps && dd < -eps)) return false;
  if ((da > eps && db > eps) || (da < -eps && db < -eps)) return false;

  const bool collinear = std::abs(dc) <= eps && std::abs(dd) <= eps;
  if (!collinear) return true;
  const Point2 u = (1.0 / lab) * (b - a);
  double s0 = dot(c - a, u);
  double s1 = dot(d - a, u);
  if (s0 > s1) std::swap(s0, s1);
  return s1 >= -eps && s0 <= lab + eps;
}

bool point_in_polygon(Point2 p, const Polygon& poly) {
  bool inside = false;
  const auto verts = poly.vertices();
  const std::size_t n = verts.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = verts[i];
    const Point2 b = verts[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double distance_to_boundary(Point2 p, const Polygon& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, point_segment_distance(p, poly.edge_start(i), poly.edge_end(i)));
  }
  return best;
}

bool strictly_inside(Point2 p, const Polygon& poly, double margin) {
  return point_in_polygon(p, poly) && distance_to_boundary(p, poly) > margin;
}

Polygon validate_polygon(std::span<const Point2> points) {
  const std::size_t n = points.size();
  if (n < 3) {
    throw Error(ErrorCode::DegenerateArea, "a polygon needs at least 3 vertices, got " +
                                               std::to_string(n));
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::NonFinite, "vertex coordinates must be finite");
    }
  }

  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) diam = std::max(diam, distance(points[i], points[j]));
  }
  if (diam == 0.0) throw Error(ErrorCode::DegenerateArea, "all vertices coincide");
  const double tol = kEpsGeom * diam;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(points[i], points[j]) <= tol) {
        throw Error(ErrorCode::DuplicateVertices,
                    "vertices " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = points[(i + n - 1) % n];
    const Point2 b = points[i];
    const Point2 c = points[(i + 1) % n];
    // Distance of b from the line through its neighbours.
    if (std::abs(cross(c - a, b - a)) <= tol * norm(c - a)) {
      throw Error(ErrorCode::CollinearRun,
                  "vertex " + std::to_string(i) + " is collinear with its neighbours");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n], tol)) {
        throw Error(ErrorCode::SelfIntersecting,
                    "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      }
    }
  }

  const double area = signed_area(points);
  if (std::abs(area) <= tol * diam) {
    throw Error(ErrorCode::DegenerateArea, "polygon area is zero within tolerance");
  }

  Polygon poly;
  poly.diameter_ = diam;
  poly.vertices_.assign(points.begin(), points.end());
  if (area < 0.0) {
    // Keep vertex 0 in place, reverse the rest.
    std::reverse(poly.vertices_.begin() + 1, poly.vertices_.end());
  }
  return poly;
}

std::vector<InteriorAngle> interior_angles(const Polygon& p) {
  std::vector<InteriorAngle> out;
  out.reserve(p.size());
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e_in = p.vertex(i) - p.vertex(i + n - 1);
    const Point2 e_out = p.vertex(i + 1) - p.vertex(i);
    const double turn = std::atan2(cross(e_in, e_out), dot(e_in, e_out));
    const double theta = kPi - turn;
    out.push_back({i, theta, theta > kPi});
  }
  return out;
}

std::size_t reflex_count(const Polygon& p) {
  const auto angles = interior_angles(p);
  return static_cast<std::size_t>(
      std::count_if(angles.begin(), angles.end(), [](const InteriorAngle& a) { return a.is_reflex; }));
}

Rational best_rational(double x, std::int64_t q_max) {
  if (q_max < 1) throw std::invalid_argument("best_rational: q_max must be >= 1");
  // Convergents h_{k-2}/k_{k-2} and h_{k-1}/k_{k-1}.
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(frac);
    if (a_real > 1e15) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > q_max) {
      // Largest admissible semiconvergent; keep it only when strictly closer.
      const std::int64_t t = (q_max - q0) / q1;
      const std::int64_t ps = t * p1 + p0;
      const std::int64_t qs = t * q1 + q0;
      const double err_conv = std::abs(x - static_cast<double>(p1) / static_cast<double>(q1));
      const double err_semi = std::abs(x - static_cast<double>(ps) / static_cast<double>(qs));
      if (t > 0 && err_semi < err_conv) return {ps, qs};
      return {p1, q1};
    }
    const std::int64_t p2 = a * p1 + p0;
    p0 = p1; q0 = q1;
    p1 = p2; q1 = q2;
    const double rem = frac - a_real;
    if (rem <= 0.0 || static_cast<double>(p1) / static_cast<double>(q1) == x) break;
    frac = 1.0 / rem;
  }
  return {p1, q1};
}

RationalityReport rationality_report(const Polygon& p, double tol_rat, std::int64_t q_max) {
  RationalityReport report;
  report.is_rational_within_tol = true;
  for (const auto& angle : interior_angles(p)) {
    const double x = angle.theta / kPi;
    const Rational r = best_rational(x, q_max);
    AngleRationality entry;
    entry.vertex_index = angle.vertex_index;
    entry.p = r.p;
    entry.q = r.q;
    entry.residual = std::abs(x - static_cast<double>(r.p) / static_cast<double>(r.q));
    entry.is_rational = entry.residual < tol_rat;
    report.is_rational_within_tol = report.is_rational_within_tol && entry.is_rational;
    report.angles.push_back(entry);
  }
  return report;
}

MetricEstimate polygon_metric_d(const Polygon& p, const Polygon& q, std::int64_t samples,
                                std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("polygon_metric_d: samples must be >= 1");
  const BoundingBox bp = bounding_box(p.vertices());
  const BoundingBox bq = bounding_box(q.vertices());
  const BoundingBox box{{std::min(bp.lo.x, bq.lo.x), std::min(bp.lo.y, bq.lo.y)},
                        {std::max(bp.hi.x, bq.hi.x), std::max(bp.hi.y, bq.hi.y)}};

  std::mt19937_64 rng(seed);
  const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const Point2 x{box.lo.x + uniform() * box.width(), box.lo.y + uniform() * box.height()};
    if (point_in_polygon(x, p) != point_in_polygon(x, q)) ++hits;
  }
  const double n = static_cast<double>(samples);
  const double f = static_cast<double>(hits) / n;
  return {box.area() * f, box.area() * std::sqrt(f * (1.0 - f) / n), samples};
}

Polygon reflexify(const Polygon& p, std::size_t edge_index, int k) {
  const std::size_t n = p.size();
  if (edge_index >= n) {
    throw Error(ErrorCode::InvalidEdge,
                "edge " + std::to_string(edge_index) + " out of range for n=" + std::to_string(n));
  }
  if (k < 1) throw Error(ErrorCode::KTooSmall, "k must be >= 1");

  const Point2 a = p.edge_start(edge_index);
  const Point2 b = p.edge_end(edge_index);
  const Point2 mid = 0.5 * (a + b);
  const double half_width = 0.5 * distance(a, b);
  const Point2 inward = perp(UnitDir::from(b - a).vec());
  // Base angles of the removed isosceles triangle are pi/(2k), so the apex angle
  // seen from inside the new polygon is pi + pi/k.
  const double height = half_width * std::tan(kPi / (2.0 * k));
  const Point2 apex = mid + height * inward;

  if (!std::isfinite(height) || !strictly_inside(apex, p, p.tolerance())) {
    throw Error(ErrorCode::KTooSmall,
                "k=" + std::to_string(k) + " puts the new vertex outside the polygon");
  }

  std::vector<Point2> verts(p.vertices().begin(), p.vertices().end());
  verts.insert(verts.begin() + static_cast<std::ptrdiff_t>(edge_index) + 1, apex);
  try {
    return validate_polygon(verts);
  } catch (const Error& e) {
    throw Error(ErrorCode::KTooSmall, "k=" + std::to_string(k) + " yields an invalid polygon (" +
                                          e.what() + ")");
  }
}

int reflexify_min_k(const Polygon& p, std::size_t edge_index, int k_cap) {
  const auto ok = [&](int k) {
    try {
      (void)reflexify(p, edge_index, k);
      return true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidEdge) throw;
      return false;
    }
  };
  if (ok(1)) return 1;
  // The removed triangles are nested in k, so admissibility is monotone.
  int lo = 1;
  int hi = 2;
  while (!ok(hi)) {
    lo = hi;
    if (hi >= k_cap) throw Error(ErrorCode::KTooSmall, "no admissible k up to the cap");
    hi = std::min(2 * hi, k_cap);
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

Polygon canonical_embedding(const Polygon& p) {
  const Point2 origin = p[0];
  const Point2 last = p[p.size() - 1] - origin;
  const double c = last.x / norm(last);
  const double s = last.y / norm(last);
  std::vector<Point2> out;
  out.reserve(p.size());
  for (const auto& v : p.vertices()) {
    const Point2 d = v - origin;
    out.push_back({c * d.x + s * d.y, -s * d.x + c * d.y});
  }
  return validate_polygon(out);
}

}  // namespace pbill
