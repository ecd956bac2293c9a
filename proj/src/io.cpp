#include "pbill/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pbill {

using nlohmann::json;

namespace {

json point_json(Point2 p) { return json::array({p.x, p.y}); }

struct SvgFrame {
  BoundingBox box;

  // SVG's y axis points down; flip so the picture keeps the math orientation.
  std::string xy(Point2 p) const { return format_double(p.x) + " " + format_double(-p.y); }

  std::string header() const {
    const double margin = 0.05 * std::max(box.width(), box.height());
    const double x0 = box.lo.x - margin;
    const double y0 = -box.hi.y - margin;
    const double w = box.width() + 2.0 * margin;
    const double h = box.height() + 2.0 * margin;
    const double stroke = 0.004 * std::max(w, h);
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(x0) << ' '
      << format_double(y0) << ' ' << format_double(w) << ' ' << format_double(h)
      << "\" stroke-width=\"" << format_double(stroke) << "\" fill=\"none\">\n";
    return s.str();
  }
};

BoundingBox grow(BoundingBox b, Point2 p) {
  b.lo.x = std::min(b.lo.x, p.x);
  b.lo.y = std::min(b.lo.y, p.y);
  b.hi.x = std::max(b.hi.x, p.x);
  b.hi.y = std::max(b.hi.y, p.y);
  return b;
}

std::string polygon_path(const SvgFrame& f, std::span<const Point2> pts) {
  std::string d = "M " + f.xy(pts[0]);
  for (std::size_t i = 1; i < pts.size(); ++i) d += " L " + f.xy(pts[i]);
  return d + " Z";
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Polygon polygon_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array()) {
    throw Error(ErrorCode::ParseError, "expected an object with a \"vertices\" array");
  }
  std::vector<Point2> pts;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw Error(ErrorCode::ParseError, "each vertex must be a [x, y] pair of numbers");
    }
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return validate_polygon(pts);
}

Polygon load_polygon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return polygon_from_json(doc);
}

json polygon_to_json(const Polygon& p) {
  json verts = json::array();
  for (const auto& v : p.vertices()) verts.push_back(point_json(v));
  return json{{"vertices", verts}};
}

json table_to_json(const EquivalentTable& t) {
  json out = json::array();
  for (const auto& c : t.components) {
    if (const auto* w = std::get_if<Wall>(&c)) {
      out.push_back({{"type", "wall"},
                     {"a", point_json(w->a)},
                     {"b", point_json(w->b)},
                     {"inward_normal", json::array({w->inward_normal.dx(), w->inward_normal.dy()})},
                     {"source_edge", w->source_edge}});
    } else {
      const auto& arc = std::get<DispersingArc>(c);
      out.push_back({{"type", "arc"},
                     {"center", point_json(arc.center)},
                     {"radius", arc.radius},
                     {"angle_start", arc.angle_start},
                     {"angle_end", arc.angle_end},
                     {"start", point_json(chain_start(c))},
                     {"end", point_json(chain_end(c))},
                     {"source_vertex", arc.source_vertex}});
    }
  }
  return out;
}

json rationality_to_json(const RationalityReport& r) {
  json angles = json::array();
  for (const auto& a : r.angles) {
    angles.push_back({{"vertex", a.vertex_index},
                      {"p", a.p},
                      {"q", a.q},
                      {"residual", a.residual},
                      {"rational", a.is_rational}});
  }
  return json{{"rational", r.is_rational_within_tol}, {"angles", angles}};
}

json report_to_json(const HyperbolicityReport& r) {
  return json{{"lambda_mean", r.lambda_mean},
              {"lambda_stderr", r.lambda_stderr},
              {"lambda_ci99", json::array({r.lambda_ci99_low, r.lambda_ci99_high})},
              {"arc_hit_fraction", r.arc_hit_fraction},
              {"first_arc_hit_mean", r.first_arc_hit_mean},
              {"ss_growth_rate", r.ss_growth_rate},
              {"entropy_hat", r.entropy_hat},
              {"positive_lambda_fraction", r.positive_lambda_fraction},
              {"arc_revisit_fraction", r.arc_revisit_fraction},
              {"n_total", r.n_total},
              {"n_included", r.n_included},
              {"n_excluded_grazing", r.n_excluded_grazing},
              {"n_excluded_vertex", r.n_excluded_vertex}};
}

void write_events_csv_header(std::ostream& out) { out << kEventsCsvHeader << '\n'; }

void write_events_csv(std::ostream& out, std::size_t traj_id, const TrajectoryRecord& rec) {
  std::string line;
  const std::string id = std::to_string(traj_id);
  for (const auto& ev : rec.events) {
    line.clear();
    line += id;
    line += ',';
    line += std::to_string(ev.index);
    for (const double v : {ev.t, ev.point.x, ev.point.y}) {
      line += ',';
      line += format_double(v);
    }
    line += ',';
    line += std::to_string(ev.component_id);
    line += ',';
    line += format_double(ev.kappa);
    line += ',';
    line += format_double(ev.phi);
    line += ev.grazing ? ",1\n" : ",0\n";
    out << line;
  }
}

std::string table_svg(const EquivalentTable& t, const TrajectoryRecord* trajectory,
                      std::size_t max_segments) {
  SvgFrame f{bounding_box(t.source.vertices())};
  std::ostringstream s;
  s << f.header();
  s << "<path d=\"" << polygon_path(f, t.source.vertices())
    << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"0.02\"/>\n";
  for (const auto& c : t.components) {
    if (const auto* w = std::get_if<Wall>(&c)) {
      s << "<path d=\"M " << f.xy(w->a) << " L " << f.xy(w->b) << "\" stroke=\"black\"/>\n";
    } else {
      const auto& arc = std::get<DispersingArc>(c);
      // Clockwise in table coordinates is counterclockwise on screen: sweep 0.
      s << "<path d=\"M " << f.xy(chain_start(c)) << " A " << format_double(arc.radius) << ' '
        << format_double(arc.radius) << " 0 0 0 " << f.xy(chain_end(c))
        << "\" stroke=\"red\"/>\n";
    }
  }
  if (trajectory != nullptr) {
    s << "<polyline stroke=\"#1f77b4\" points=\"" << format_double(trajectory->initial.point.x)
      << ',' << format_double(-trajectory->initial.point.y);
    std::size_t count = 0;
    for (const auto& ev : trajectory->events) {
      if (count++ >= max_segments) break;
      s << ' ' << format_double(ev.point.x) << ',' << format_double(-ev.point.y);
    }
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string unfolding_svg(const Polygon& p, const UnfoldingRecord& u) {
  BoundingBox box = bounding_box(p.vertices());
  std::vector<std::vector<Point2>> copies;
  for (const auto& m : u.copies) {
    std::vector<Point2> img;
    for (const auto& v : p.vertices()) {
      img.push_back(m.apply(v));
      box = grow(box, img.back());
    }
    copies.push_back(std::move(img));
  }
  SvgFrame f{box};
  std::ostringstream s;
  s << f.header();
  for (std::size_t i = 0; i < copies.size(); ++i) {
    s << "<path d=\"" << polygon_path(f, copies[i]) << "\" stroke=\""
      << (i == 0 ? "black" : "#888888") << "\"/>\n";
  }
  if (!u.points.empty()) {
    s << "<path d=\"M " << f.xy(u.points.front()) << " L " << f.xy(u.points.back())
      << "\" stroke=\"red\"/>\n";
    for (const auto& x : u.points) {
      s << "<circle cx=\"" << format_double(x.x) << "\" cy=\"" << format_double(-x.y)
        << "\" r=\"" << format_double(0.01 * std::max(box.width(), box.height()))
        << "\" fill=\"red\" stroke=\"none\"/>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace pbill
