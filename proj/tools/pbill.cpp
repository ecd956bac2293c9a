// Command-line front end: inspect polygons, run ensembles, perturb edges.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pbill/io.hpp"
#include "pbill/run.hpp"

namespace fs = std::filesystem;
using namespace pbill;

namespace {

enum Exit : int { kOk = 0, kInternal = 1, kParse = 2, kInvalidPolygon = 3, kRadius = 4, kIo = 5 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::KTooSmall:
    case ErrorCode::InvalidEdge:
      return kParse;
    case ErrorCode::SelfIntersecting:
    case ErrorCode::DegenerateArea:
    case ErrorCode::DuplicateVertices:
    case ErrorCode::CollinearRun:
    case ErrorCode::NonFinite:
      return kInvalidPolygon;
    case ErrorCode::RadiusTooLarge:
    case ErrorCode::ErosionInvalid:
      return kRadius;
    case ErrorCode::IoError:
      return kIo;
    default:
      return kInternal;
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

int cmd_inspect(const std::string& path) {
  const Polygon p = load_polygon(path);
  const auto angles = interior_angles(p);
  const auto rat = rationality_report(p);
  std::cout << "vertices: " << p.size() << '\n';
  std::cout << "area: " << format_double(p.area()) << '\n';
  std::string reflex;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const auto& a = angles[i];
    const auto& r = rat.angles[i];
    std::cout << "angle " << i << ": " << format_double(a.theta) << " rad ~ " << r.p << '/' << r.q
              << " pi (residual " << format_double(r.residual) << ")"
              << (a.is_reflex ? " reflex" : "") << '\n';
    if (a.is_reflex) reflex += (reflex.empty() ? "" : " ") + std::to_string(i);
  }
  std::cout << "reflex_count: " << reflex_count(p) << '\n';
  std::cout << "reflex_vertices: " << (reflex.empty() ? "none" : reflex) << '\n';
  std::cout << "rational: " << (rat.is_rational_within_tol ? "yes" : "no") << '\n';
  std::cout << "r_P: " << format_double(compute_rP(p)) << '\n';
  return kOk;
}

struct SimulateArgs {
  std::string config;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::optional<std::string> polygon_path;
  std::optional<double> radius;
  std::optional<std::size_t> n_trajectories;
  std::optional<std::size_t> max_bounces;
  std::optional<double> max_time;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::vector<std::string>> outputs;
};

int cmd_simulate(const SimulateArgs& args) {
  std::ifstream in(args.config);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + args.config);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, args.config + ": " + e.what());
  }
  RunConfig cfg = config_from_json(doc);
  if (!cfg.polygon_path.empty() && fs::path(cfg.polygon_path).is_relative()) {
    cfg.polygon_path = (fs::path(args.config).parent_path() / cfg.polygon_path).string();
  }
  if (args.polygon_path) cfg.polygon_path = *args.polygon_path;
  if (args.radius) cfg.radius = *args.radius;
  if (args.n_trajectories) cfg.n_trajectories = *args.n_trajectories;
  if (args.max_bounces) cfg.max_bounces = *args.max_bounces;
  if (args.max_time) cfg.max_time = *args.max_time;
  if (args.seed) cfg.seed = *args.seed;
  if (args.mode) cfg.mode = parse_mode(*args.mode);
  if (args.outputs) cfg.outputs = {args.outputs->begin(), args.outputs->end()};
  check_config(cfg);

  const Polygon polygon = load_polygon(cfg.polygon_path);
  const fs::path out_dir(args.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string());

  RunArtifacts artifacts;
  std::ofstream events;
  if (cfg.outputs.contains("events")) {
    events.open(out_dir / "events.csv", std::ios::binary);
    if (!events) throw Error(ErrorCode::IoError, "cannot write events.csv");
    artifacts.events = &events;
  }
  const auto summary = run_simulation(cfg, polygon, args.threads, artifacts);
  if (events.is_open()) {
    events.close();
    if (!events) throw Error(ErrorCode::IoError, "failed writing events.csv");
  }
  if (cfg.outputs.contains("summary")) write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  if (cfg.outputs.contains("svg")) write_file(out_dir / "table.svg", artifacts.table_svg);
  if (cfg.outputs.contains("unfolding_svg")) {
    write_file(out_dir / "unfolding.svg", artifacts.unfolding_svg);
  }
  return kOk;
}

int cmd_reflexify(const std::string& path, std::size_t edge, int k, const std::string& out) {
  const Polygon p = load_polygon(path);
  const Polygon q = reflexify(p, edge, k);
  write_file(out, polygon_to_json(q).dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-disc billiards in polygons: erosion, simulation and hyperbolicity estimates"};
  app.require_subcommand(1);

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Angles, rationality and r_P of a polygon");
  inspect->add_option("polygon", inspect_path, "Polygon JSON file")->required();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run an ensemble from a JSON config");
  simulate->add_option("--config", sim.config, "Run configuration JSON")->required();
  simulate->add_option("--out", sim.out_dir, "Output directory");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = hardware)");
  simulate->add_option("--polygon_path", sim.polygon_path);
  simulate->add_option("--radius", sim.radius);
  simulate->add_option("--n_trajectories", sim.n_trajectories);
  simulate->add_option("--max_bounces", sim.max_bounces);
  simulate->add_option("--max_time", sim.max_time);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--mode", sim.mode, "full_measure | arc_start");
  simulate->add_option("--outputs", sim.outputs, "summary events svg unfolding_svg");

  std::string reflex_path;
  std::string reflex_out;
  std::size_t edge = 0;
  int k = 0;
  auto* reflex = app.add_subcommand("reflexify", "Replace an edge by a reflex angle pi + pi/k");
  reflex->add_option("polygon", reflex_path, "Polygon JSON file")->required();
  reflex->add_option("--edge", edge)->required();
  reflex->add_option("--k", k)->required();
  reflex->add_option("--out", reflex_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*inspect) return cmd_inspect(inspect_path);
    if (*simulate) return cmd_simulate(sim);
    if (*reflex) return cmd_reflexify(reflex_path, edge, k, reflex_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
