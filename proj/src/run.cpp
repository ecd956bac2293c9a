#include "pbill/run.hpp"

#include <chrono>
#include <thread>
#include <unistd.h>

#include "pbill/io.hpp"

namespace pbill {

using nlohmann::json;

namespace {

constexpr std::size_t kSvgBounces = 200;
constexpr std::size_t kUnfoldBounces = 20;

template <typename T>
T field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config field \"") + key + "\": " + e.what());
  }
}

}  // namespace

SamplingMode parse_mode(const std::string& s) {
  if (s == "full_measure") return SamplingMode::FullMeasure;
  if (s == "arc_start") return SamplingMode::ArcStart;
  throw Error(ErrorCode::ParseError, "mode must be full_measure or arc_start, got " + s);
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  static const std::set<std::string> known{"polygon_path", "radius",   "n_trajectories",
                                           "max_bounces",  "max_time", "seed",
                                           "mode",         "outputs"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::ParseError, "unknown config field " + key);
  }
  RunConfig cfg;
  cfg.polygon_path = field<std::string>(doc, "polygon_path", cfg.polygon_path);
  cfg.radius = field<double>(doc, "radius", cfg.radius);
  cfg.n_trajectories = field<std::size_t>(doc, "n_trajectories", cfg.n_trajectories);
  cfg.max_bounces = field<std::size_t>(doc, "max_bounces", cfg.max_bounces);
  if (doc.contains("max_time") && !doc["max_time"].is_null()) {
    cfg.max_time = field<double>(doc, "max_time", cfg.max_time);
  }
  cfg.seed = field<std::uint64_t>(doc, "seed", cfg.seed);
  cfg.mode = parse_mode(field<std::string>(doc, "mode", to_string(cfg.mode)));
  if (doc.contains("outputs")) {
    const auto list = field<std::vector<std::string>>(doc, "outputs", {});
    cfg.outputs = {list.begin(), list.end()};
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  return json{{"polygon_path", cfg.polygon_path},
              {"radius", cfg.radius},
              {"n_trajectories", cfg.n_trajectories},
              {"max_bounces", cfg.max_bounces},
              {"max_time", std::isfinite(cfg.max_time) ? json(cfg.max_time) : json(nullptr)},
              {"seed", cfg.seed},
              {"mode", to_string(cfg.mode)},
              {"outputs", cfg.outputs}};
}

void check_config(const RunConfig& cfg) {
  if (cfg.polygon_path.empty()) throw Error(ErrorCode::ParseError, "polygon_path is required");
  if (!(cfg.radius >= 0.0)) throw Error(ErrorCode::ParseError, "radius must be >= 0");
  if (cfg.n_trajectories < 1) throw Error(ErrorCode::ParseError, "n_trajectories must be >= 1");
  if (cfg.max_bounces < 1) throw Error(ErrorCode::ParseError, "max_bounces must be >= 1");
  if (!(cfg.max_time > 0.0)) throw Error(ErrorCode::ParseError, "max_time must be > 0");
  for (const auto& o : cfg.outputs) {
    if (!kKnownOutputs.contains(o)) throw Error(ErrorCode::ParseError, "unknown output " + o);
  }
  if (cfg.outputs.contains("unfolding_svg") && cfg.radius != 0.0) {
    throw Error(ErrorCode::ParseError, "unfolding_svg requires radius 0");
  }
}

json run_simulation(const RunConfig& cfg, const Polygon& polygon, unsigned threads,
                    RunArtifacts& artifacts) {
  check_config(cfg);
  const auto started = std::chrono::steady_clock::now();
  const EquivalentTable table = build_equivalent_table(polygon, cfg.radius);

  EnsembleConfig ens;
  ens.n_trajectories = cfg.n_trajectories;
  ens.max_bounces = cfg.max_bounces;
  ens.max_time = cfg.max_time;
  ens.seed = cfg.seed;
  ens.mode = cfg.mode;
  ens.threads = threads;

  const bool want_events = cfg.outputs.contains("events") && artifacts.events != nullptr;
  const bool want_first = cfg.outputs.contains("svg") || cfg.outputs.contains("unfolding_svg");
  TrajectoryRecord first;
  if (want_events) write_events_csv_header(*artifacts.events);
  const TrajectorySink sink = [&](std::size_t i, const TrajectoryRecord& rec) {
    if (want_events) write_events_csv(*artifacts.events, i, rec);
    if (want_first && i == 0) first = rec;
  };
  const HyperbolicityReport report = ensemble_report(table, ens, sink);

  if (cfg.outputs.contains("svg")) artifacts.table_svg = table_svg(table, &first, kSvgBounces);
  if (cfg.outputs.contains("unfolding_svg")) {
    TrajectoryRecord head = first;
    if (head.events.size() > kUnfoldBounces) head.events.resize(kUnfoldBounces);
    artifacts.unfolding_svg = unfolding_svg(polygon, unfold(polygon, head));
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  char host[256] = {};
  if (gethostname(host, sizeof(host) - 1) != 0) host[0] = '\0';

  return json{{"config", config_to_json(cfg)},
              {"r_P", compute_rP(polygon)},
              {"reflex_count", reflex_count(polygon)},
              {"arc_count", table.arc_count()},
              {"rationality", rationality_to_json(rationality_report(polygon))},
              {"report", report_to_json(report)},
              {"env",
               {{"wall_clock_seconds", elapsed},
                {"threads", threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads},
                {"hostname", std::string(host)}}}};
}

json deterministic_part(const json& summary) {
  json out = summary;
  out.erase("env");
  return out;
}

}  // namespace pbill
