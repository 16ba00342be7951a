// intellimove command-line tool: gen, build, plan, bench, render, validate.
//
// Exit codes: 0 success, 1 planning failure, 2 invalid input,
// 3 internal inconsistency.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "intellimove/bench.hpp"
#include "intellimove/http_oracle.hpp"
#include "intellimove/intellimove.hpp"

namespace im = intellimove;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPlanFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInconsistent = 3;

struct OracleFlags {
  std::string kind = "mock";
  std::string table;
};

std::unique_ptr<im::GoalOracle> make_oracle(const OracleFlags& f) {
  if (f.kind == "none") return nullptr;
  if (f.kind == "http") return std::make_unique<im::HttpOracle>(im::HttpOracleConfig::from_env());
  if (f.kind != "mock") throw im::ConfigError("--oracle must be mock, http or none");
  const std::string text = f.table.empty() ? im::default_cooccurrence_text() : im::detail::read_file(f.table);
  return std::make_unique<im::MockOracle>(im::parse_cooccurrence_table(text, f.table.empty() ? "table" : f.table));
}

im::PlanStart parse_start(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return s;
  return im::MetricPoint{im::detail::parse_double(s.substr(0, comma), "start x"),
                         im::detail::parse_double(s.substr(comma + 1), "start y")};
}

void print_path(const im::SemanticPath& p) {
  std::string line;
  for (const auto& n : p.nodes) line += (line.empty() ? "" : " -> ") + n;
  std::printf("mode: %s\npath: %s\ncost: %s\n", im::to_string(p.mode), line.c_str(),
              im::detail::fixed(p.graph_cost, 6).c_str());
  if (!p.waypoints.empty())
    std::printf("metric_cost: %s\nwaypoints: %zu\n", im::detail::fixed(p.metric_cost, 6).c_str(), p.waypoints.size());
}

nlohmann::json path_json(const im::PlanOutcome& out) {
  nlohmann::json j{{"mode", im::to_string(out.mode)}, {"ok", out.ok()}};
  if (out.ok()) {
    j["nodes"] = out.result->nodes;
    j["cost"] = out.result->graph_cost;
    if (!out.result->waypoints.empty()) j["metric_cost"] = out.result->metric_cost;
  } else {
    j["reason"] = im::to_string(out.failure_reason);
    j["message"] = out.message;
  }
  return j;
}

nlohmann::json ground_truth_json(const im::GroundTruth& t) {
  auto rect = [](const im::CellRect& r) { return nlohmann::json{r.c0, r.r0, r.c1, r.r1}; };
  nlohmann::json rooms = nlohmann::json::array(), doors = nlohmann::json::array();
  for (const auto& r : t.rooms) rooms.push_back({{"id", r.id}, {"category", r.category}, {"interior", rect(r.interior)}});
  for (const auto& d : t.doors) doors.push_back({{"a", d.room_a}, {"b", d.room_b}, {"opening", rect(d.opening)}});
  return {{"rooms", rooms}, {"doors", doors}, {"wall_cells", t.wall_cells}};
}

void print_bench_table(const im::BenchReport& r) {
  std::printf("%-14s %7s %9s %7s %8s\n", "mode", "trials", "successes", "paths", "rate");
  for (const auto& [mode, s] : r.per_mode) {
    const auto rate = r.success_rate(mode);
    std::printf("%-14s %7d %9d %7d %8s\n", im::to_string(mode), s.trials, s.successes, s.path_generated,
                rate ? im::detail::fixed(*rate, 3).c_str() : "-");
  }
  if (!r.wall_times_ms.empty())
    std::printf("wall time ms: mean %s  p50 %s  max %s\n", im::detail::fixed(r.mean_ms(), 3).c_str(),
                im::detail::fixed(r.p50_ms(), 3).c_str(), im::detail::fixed(r.max_ms(), 3).c_str());
  std::printf("hardware: %s\n", r.hardware.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IntelliMap semantic maps and the IntelliMove planner"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic office map with ground truth");
  std::string gen_spec, gen_out, gen_layout;
  std::uint64_t gen_seed = 0;
  int gen_rooms = 0;
  gen->add_option("--spec", gen_spec, "Environment spec file (key: value)")->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "Override the seed from --spec");
  gen->add_option("--rooms", gen_rooms, "Override the number of rooms");
  gen->add_option("--layout", gen_layout, "spine or suite");
  gen->add_option("--out", gen_out, "Output map directory")->required();

  // build
  auto* build = app.add_subcommand("build", "Build a semantic map from a costmap and object observations");
  std::string b_costmap, b_meta, b_objects, b_rules, b_out, b_name = "map", b_created;
  im::SegmentationParams b_seg;
  build->add_option("--costmap", b_costmap, "Costmap PGM")->required()->check(CLI::ExistingFile);
  build->add_option("--meta", b_meta, "Costmap metadata")->required()->check(CLI::ExistingFile);
  build->add_option("--objects", b_objects, "objects.json")->check(CLI::ExistingFile);
  build->add_option("--rules", b_rules, "Category rules file")->check(CLI::ExistingFile);
  build->add_option("--door-width", b_seg.door_width_max, "Widest opening treated as a door (m)");
  build->add_option("--min-room-area", b_seg.min_room_area, "Smallest room (m^2)");
  build->add_option("--name", b_name, "Map name");
  build->add_option("--created", b_created, "Creation timestamp stored in the map");
  build->add_option("--out", b_out, "Output map directory")->required();

  // plan, bench and render share map and planner flags
  std::string map_dir, start, goal, out_path, waypoints_path;
  OracleFlags oracle_flags;
  bool allow_inscribed = false, refine = false, as_json = false, no_timing = false;
  int trials = 50;
  std::uint64_t seed = 1;
  std::string bench_mode = "targeted";
  auto add_planner_flags = [&](CLI::App* sub) {
    sub->add_option("--map", map_dir, "Map directory")->required();
    sub->add_option("--oracle", oracle_flags.kind, "Discovery oracle: mock, http or none")
        ->check(CLI::IsMember({"mock", "http", "none"}));
    sub->add_option("--table", oracle_flags.table, "Co-occurrence table for the mock oracle")->check(CLI::ExistingFile);
    sub->add_flag("--allow-inscribed", allow_inscribed, "Let metric paths cross inscribed cells");
    sub->add_flag("--refine", refine, "Refine the semantic path to grid waypoints");
  };

  auto* planc = app.add_subcommand("plan", "Plan a semantic path to a goal");
  add_planner_flags(planc);
  planc->add_option("--start", start, "Start room/object id or x,y")->required();
  planc->add_option("--goal", goal, "Goal text: node id, room category or object class")->required();
  planc->add_option("--waypoints", waypoints_path, "Write refined waypoints (x y per line)");
  planc->add_flag("--json", as_json, "Print the outcome as JSON");

  auto* benchc = app.add_subcommand("bench", "Run random planning trials over a map");
  add_planner_flags(benchc);
  benchc->add_option("--trials", trials, "Number of trials")->check(CLI::NonNegativeNumber);
  benchc->add_option("--seed", seed, "Trial sampling seed");
  benchc->add_option("--mode", bench_mode, "targeted, multi, discovery or mixed");
  benchc->add_option("--out", out_path, "Write the JSON report here");
  benchc->add_flag("--no-timing", no_timing, "Leave wall times out of the JSON report");

  auto* render = app.add_subcommand("render", "Render a map (and optionally a plan) to SVG");
  add_planner_flags(render);
  render->add_option("--start", start, "Start for an overlaid plan");
  render->add_option("--goal", goal, "Goal for an overlaid plan");
  render->add_option("--out", out_path, "SVG file (stdout when omitted)");

  auto* validate = app.add_subcommand("validate", "Check a map's invariants");
  validate->add_option("--map", map_dir, "Map directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*gen) {
      im::EnvSpec spec = gen_spec.empty() ? im::EnvSpec{} : im::parse_env_spec(im::detail::read_file(gen_spec), gen_spec);
      if (gen->count("--seed")) spec.seed = gen_seed;
      if (gen->count("--rooms")) spec.n_rooms = gen_rooms;
      if (gen->count("--layout")) spec.layout = gen_layout;
      im::validate_env_spec(spec);
      const auto env = im::generate(spec);
      std::vector<im::ObjectObservation> obs;
      for (const auto& o : env.truth.objects) obs.push_back({o.id, o.class_label, o.position});
      im::BuildOptions opt;
      opt.name = "gen-seed-" + std::to_string(spec.seed);
      const auto m = im::build_semantic_map(env.costmap, obs, opt);
      im::save_map(m, gen_out);
      im::detail::write_file((fs::path(gen_out) / "objects.json").string(), im::observations_json(obs));
      im::detail::write_file((fs::path(gen_out) / "ground_truth.json").string(),
                             ground_truth_json(env.truth).dump(2) + "\n");
      std::printf("generated %zu rooms, %zu objects, %dx%d cells -> %s\n", m.graph.rooms.size(),
                  m.graph.objects.size(), m.costmap.width(), m.costmap.height(), gen_out.c_str());
      return kExitOk;
    }

    if (*build) {
      const auto grid = im::load_costmap(b_costmap, b_meta);
      std::vector<im::ObjectObservation> obs;
      if (!b_objects.empty()) obs = im::parse_observations(im::detail::read_file(b_objects), b_objects);
      im::BuildOptions opt;
      opt.segmentation = b_seg;
      if (!b_rules.empty()) opt.rules = im::parse_category_rules(im::detail::read_file(b_rules), b_rules);
      opt.name = b_name;
      opt.created = b_created;
      const auto m = im::build_semantic_map(grid, obs, opt);
      im::save_map(m, b_out);
      std::printf("built %zu rooms, %zu room edges, %zu objects -> %s\n", m.graph.rooms.size(),
                  m.graph.room_edges.size(), m.graph.objects.size(), b_out.c_str());
      return kExitOk;
    }

    if (*validate) {
      const auto m = im::load_map_unchecked(map_dir);
      const auto violations = im::validate_map(m);
      for (const auto& v : violations) std::printf("%s: %s\n", v.subject.c_str(), v.rule.c_str());
      if (violations.empty()) {
        std::printf("ok: %zu rooms, %zu objects\n", m.graph.rooms.size(), m.graph.objects.size());
        return kExitOk;
      }
      return kExitInconsistent;
    }

    const auto m = im::load_map(map_dir);
    const auto oracle = make_oracle(oracle_flags);
    im::PlanOptions popt;
    popt.allow_inscribed = allow_inscribed;
    popt.refine_metric = refine;

    if (*planc) {
      popt.refine_metric = refine || !waypoints_path.empty();
      const auto out = im::plan(m, im::make_request(m, parse_start(start), goal, popt), oracle.get());
      if (as_json) {
        std::printf("%s\n", path_json(out).dump(2).c_str());
      } else if (out.ok()) {
        print_path(*out.result);
      } else {
        std::printf("mode: %s\nfailed: %s\n%s\n", im::to_string(out.mode), im::to_string(out.failure_reason),
                    out.message.c_str());
      }
      if (!out.ok()) return kExitPlanFailed;
      if (!waypoints_path.empty()) {
        std::string text;
        for (const auto& w : out.result->waypoints) text += im::detail::fixed(w.x, 4) + " " + im::detail::fixed(w.y, 4) + "\n";
        im::detail::write_file(waypoints_path, text);
      }
      return kExitOk;
    }

    if (*benchc) {
      im::BenchOptions bopt;
      bopt.trials = trials;
      bopt.seed = seed;
      bopt.mode = im::parse_bench_mode(bench_mode);
      bopt.plan = popt;
      bopt.oracle = oracle.get();
      const auto report = im::run_bench(m, bopt);
      const auto j = im::bench_report_json(report, !no_timing);
      if (!out_path.empty()) im::detail::write_file(out_path, j.dump(2) + "\n");
      std::printf("%s\n", j.dump(2).c_str());
      print_bench_table(report);
      return kExitOk;
    }

    if (*render) {
      std::optional<im::PlanOutcome> out;
      if (!start.empty() || !goal.empty()) {
        if (start.empty() || goal.empty()) throw im::ConfigError("render needs both --start and --goal to draw a plan");
        out = im::plan(m, im::make_request(m, parse_start(start), goal, popt), oracle.get());
        if (!out->ok()) {
          std::fprintf(stderr, "plan failed: %s: %s\n", im::to_string(out->failure_reason), out->message.c_str());
          return kExitPlanFailed;
        }
      }
      const auto svg = im::render_svg(m, out ? &*out->result : nullptr);
      if (out_path.empty()) std::fwrite(svg.data(), 1, svg.size(), stdout);
      else im::detail::write_file(out_path, svg);
      return kExitOk;
    }
  } catch (const im::ConsistencyError& e) {
    std::fprintf(stderr, "inconsistent: %s\n", e.what());
    return kExitInconsistent;
  } catch (const im::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitOk;
}
