#pragma once

#include <limits>
#include <ostream>
#include <set>
#include <string>

#include <json.hpp>

#include "pbill/analysis.hpp"

namespace pbill {

/// Batch run description, read from JSON. Every field can be overridden by a
/// same-named command-line flag.
struct RunConfig {
  std::string polygon_path;
  double radius = 0.0;
  std::size_t n_trajectories = 1000;
  std::size_t max_bounces = 10000;
  double max_time = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;
  SamplingMode mode = SamplingMode::FullMeasure;
  std::set<std::string> outputs{"summary"};
};

inline const std::set<std::string> kKnownOutputs{"summary", "events", "svg", "unfolding_svg"};

SamplingMode parse_mode(const std::string& s);

/// Throws ParseError on unknown or ill-typed fields.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& cfg);
/// Range checks; throws ParseError.
void check_config(const RunConfig& cfg);

struct RunArtifacts {
  /// Receives events.csv when "events" is requested.
  std::ostream* events = nullptr;
  std::string table_svg;
  std::string unfolding_svg;
};

/// Builds the table, runs the ensemble and returns summary.json. Everything
/// outside the "env" key is independent of `threads`.
nlohmann::json run_simulation(const RunConfig& cfg, const Polygon& polygon, unsigned threads,
                              RunArtifacts& artifacts);

/// Copy of `summary` without the "env" block.
nlohmann::json deterministic_part(const nlohmann::json& summary);

}  // namespace pbill
