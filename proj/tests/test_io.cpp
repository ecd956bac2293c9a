#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "pbill/io.hpp"
#include "pbill/run.hpp"

using namespace pbill;
using nlohmann::json;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("polygon JSON") {
  const Polygon l = polygon_from_json(json::parse(R"({"vertices": [[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]})"));
  CHECK(l.size() == 6);
  CHECK(polygon_from_json(polygon_to_json(l)).area() == doctest::Approx(3.0));

  CHECK(code_of([] { (void)polygon_from_json(json::parse("[1, 2]")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)polygon_from_json(json::parse(R"({"vertices": [[0,0],[1]]})")); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { (void)polygon_from_json(json::parse(R"({"vertices": [[0,0],[1,"a"],[0,1]]})")); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { (void)polygon_from_json(json::parse(R"({"vertices": [[0,0],[1,1],[1,0],[0,1]]})")); }) ==
        ErrorCode::SelfIntersecting);
  CHECK(code_of([] { (void)load_polygon("/nonexistent/poly.json"); }) == ErrorCode::IoError);
}

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.0) == "0");
  for (const double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 3.141592653589793}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("events.csv") {
  const auto t = build_equivalent_table(validate_polygon(oracle::kSquare), 0.1);
  const auto rec = simulate(t, make_state(t, 0, {0.5, 0.1}, 0.0), 2);
  std::ostringstream out;
  write_events_csv_header(out);
  write_events_csv(out, 7, rec);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "traj_id,i,t,x,y,component_id,kappa,phi,grazing");
  std::getline(in, line);
  CHECK(line == "7,1,0.8,0.5,0.9,2,0,0,0");
  std::getline(in, line);
  CHECK(line.starts_with("7,2,1.6"));
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("table JSON") {
  const auto t = build_equivalent_table(validate_polygon(oracle::kLShape), 0.2);
  const json j = table_to_json(t);
  REQUIRE(j.is_array());
  CHECK(j.size() == 7);
  int arcs = 0;
  for (const auto& c : j) {
    if (c["type"] == "arc") {
      ++arcs;
      CHECK(c["radius"] == 0.2);
      CHECK(c["source_vertex"] == 3);
      CHECK(c["center"][0] == 1.0);
    } else {
      CHECK(c["type"] == "wall");
      CHECK(c.contains("inward_normal"));
    }
  }
  CHECK(arcs == 1);
}

TEST_CASE("report JSON uses the stable field names") {
  HyperbolicityReport r;
  r.n_total = 3;
  const json j = report_to_json(r);
  for (const char* key : {"lambda_mean", "lambda_stderr", "arc_hit_fraction", "first_arc_hit_mean",
                          "ss_growth_rate", "entropy_hat", "n_total", "n_excluded_grazing",
                          "n_excluded_vertex"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["n_total"] == 3);
}

TEST_CASE("run config") {
  const json doc = json::parse(R"({"polygon_path": "l.json", "radius": 0.2, "n_trajectories": 10,
                                    "max_bounces": 100, "max_time": null, "seed": 9,
                                    "mode": "arc_start", "outputs": ["summary", "events"]})");
  const RunConfig cfg = config_from_json(doc);
  CHECK(cfg.radius == 0.2);
  CHECK(cfg.n_trajectories == 10);
  CHECK(std::isinf(cfg.max_time));
  CHECK(cfg.mode == SamplingMode::ArcStart);
  CHECK(cfg.outputs == std::set<std::string>{"summary", "events"});
  CHECK_NOTHROW(check_config(cfg));
  CHECK(config_from_json(config_to_json(cfg)).seed == 9);

  CHECK(code_of([] { (void)config_from_json(json::parse(R"({"radius": "big"})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)config_from_json(json::parse(R"({"colour": 1})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_mode("sometimes"); }) == ErrorCode::ParseError);

  RunConfig bad = cfg;
  bad.n_trajectories = 0;
  CHECK(code_of([&] { check_config(bad); }) == ErrorCode::ParseError);
  bad = cfg;
  bad.outputs = {"movie"};
  CHECK(code_of([&] { check_config(bad); }) == ErrorCode::ParseError);
  bad = cfg;
  bad.outputs = {"unfolding_svg"};
  CHECK(code_of([&] { check_config(bad); }) == ErrorCode::ParseError);
  bad.radius = 0.0;
  CHECK_NOTHROW(check_config(bad));
}

TEST_CASE("run_simulation") {
  const Polygon l = validate_polygon(oracle::kLShape);
  RunConfig cfg;
  cfg.polygon_path = "l.json";
  cfg.radius = 0.2;
  cfg.n_trajectories = 20;
  cfg.max_bounces = 300;
  cfg.outputs = {"summary", "events", "svg"};

  std::ostringstream ev1, ev4;
  RunArtifacts a1, a4;
  a1.events = &ev1;
  a4.events = &ev4;
  const json s1 = run_simulation(cfg, l, 1, a1);
  const json s4 = run_simulation(cfg, l, 4, a4);
  CHECK(deterministic_part(s1) == deterministic_part(s4));
  CHECK(deterministic_part(s1).dump() == deterministic_part(s4).dump());
  CHECK(ev1.str() == ev4.str());
  CHECK(s1.contains("env"));
  CHECK_FALSE(deterministic_part(s1).contains("env"));
  CHECK(s1["r_P"] == 0.5);
  CHECK(s1["reflex_count"] == 1);
  CHECK(s1["arc_count"] == 1);
  CHECK(s1["report"]["n_total"] == 20);

  SUBCASE("table SVG") {
    const std::string& svg = a1.table_svg;
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("stroke=\"red\"") != std::string::npos);
    CHECK(svg.find(" A ") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("viewBox") != std::string::npos);
  }
  SUBCASE("unfolding SVG for the bare polygon") {
    cfg.radius = 0.0;
    cfg.outputs = {"unfolding_svg"};
    RunArtifacts a;
    (void)run_simulation(cfg, l, 1, a);
    CHECK(a.unfolding_svg.starts_with("<svg"));
    CHECK(a.unfolding_svg.find("stroke=\"red\"") != std::string::npos);
    CHECK(a.unfolding_svg.find("<circle") != std::string::npos);
  }
  SUBCASE("radius at r_P is refused") {
    cfg.radius = 0.5;
    RunArtifacts a;
    CHECK(code_of([&] { (void)run_simulation(cfg, l, 1, a); }) == ErrorCode::RadiusTooLarge);
  }
}
