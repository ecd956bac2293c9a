#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "pbill/analysis.hpp"

namespace pbill {

/// {"vertices": [[x, y], ...]} in either orientation. Throws ParseError for
/// malformed documents and the geometry error codes for invalid polygons.
Polygon polygon_from_json(const nlohmann::json& doc);
Polygon load_polygon(const std::filesystem::path& path);
nlohmann::json polygon_to_json(const Polygon& p);

/// Component array, see README for the field layout.
nlohmann::json table_to_json(const EquivalentTable& t);
nlohmann::json rationality_to_json(const RationalityReport& r);
nlohmann::json report_to_json(const HyperbolicityReport& r);

inline constexpr const char* kEventsCsvHeader = "traj_id,i,t,x,y,component_id,kappa,phi,grazing";

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_events_csv_header(std::ostream& out);
void write_events_csv(std::ostream& out, std::size_t traj_id, const TrajectoryRecord& rec);

/// Walls in black, arcs in red as SVG arc commands, optional trajectory polyline.
std::string table_svg(const EquivalentTable& t, const TrajectoryRecord* trajectory = nullptr,
                      std::size_t max_segments = 200);
/// Reflected polygon copies plus the straight unfolded orbit.
std::string unfolding_svg(const Polygon& p, const UnfoldingRecord& u);

}  // namespace pbill
