// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstring>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.hpp"

using namespace intellimove;
using namespace intellimove::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %02d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
}

SemanticMap generated_map(const EnvSpec& spec, std::string name = "map") {
  const auto env = generate(spec);
  BuildOptions opt;
  opt.name = std::move(name);
  opt.created = "2024-01-01T00:00:00Z";
  return build_semantic_map(env.costmap, observations_of(env.truth), opt);
}

// ---------------------------------------------------------------------------

Verdict graph_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  int mismatches = 0, compared = 0;
  for (int i = 0; i < 500; ++i) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto g = random_room_graph(rng, n, 0.35);
    const auto m = graph_only_map(g);
    const auto& from = g.rooms[rng() % g.rooms.size()].id;
    const auto& to = g.rooms[rng() % g.rooms.size()].id;
    const auto out = plan(m, make_request(m, from, to), nullptr);
    const auto expect = enumerate_min_cost(g, from, to);
    ++compared;
    if (!out.ok() || !expect || out.result->graph_cost != *expect) ++mismatches;
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << compared << " graphs, " << mismatches << " mismatches, " << detail::fixed(secs, 2) << " s";
  return {mismatches == 0 && secs < 30.0, os.str()};
}

Verdict grid_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2002);
  int mismatches = 0, reachable = 0, unreachable = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = random_grid(rng, 20, 20, 0.2, 0.05);
    std::vector<GridIndex> free_cells;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (is_free(g.cells()[k])) free_cells.push_back(g.unflat(k));
    const auto a = free_cells[rng() % free_cells.size()];
    const auto b = free_cells[rng() % free_cells.size()];
    const auto expect = brute_force_grid_cost(g, a, b);
    try {
      const auto p = grid_shortest_path(g, a, b);
      ++reachable;
      const ExactPair got{p.exact.straight, p.exact.diagonal};
      const double expect_m = g.resolution() *
                              (static_cast<double>(expect ? expect->s : -1) + std::sqrt(2.0) * static_cast<double>(expect ? expect->d : 0)) /
                              256.0;
      if (!expect || !(got == *expect) || p.cost != expect_m) ++mismatches;
    } catch (const UnreachableError&) {
      ++unreachable;
      if (expect) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "100 grids (" << reachable << " reachable, " << unreachable << " unreachable), " << mismatches
     << " mismatches, " << detail::fixed(secs, 2) << " s";
  return {mismatches == 0 && secs < 30.0, os.str()};
}

Verdict mode_dispatch() {
  std::mt19937_64 rng(3003);
  int cases = 0, wrong = 0;
  MockOracle oracle(parse_cooccurrence_table(default_cooccurrence_text()));
  for (int i = 0; i < 100; ++i) {
    auto g = random_room_graph(rng, 3 + static_cast<int>(rng() % 6));
    // exactly three desks and one lamp; "unicorn" is absent
    for (int k = 1; k <= 3; ++k) add_object(g, {"desk_" + std::to_string(k), "desk", {}, g.rooms[rng() % g.rooms.size()].id});
    add_object(g, {"lamp_1", "lamp", {}, g.rooms[rng() % g.rooms.size()].id});
    const auto m = graph_only_map(g);
    const std::string start = g.rooms.front().id;
    const std::pair<const char*, PlanMode> expect[] = {
        {"unicorn", PlanMode::Discovery}, {"lamp", PlanMode::Targeted}, {"desk", PlanMode::MultiTarget}};
    for (const auto& [goal, mode] : expect) {
      ++cases;
      const auto out = plan(m, make_request(m, start, goal), &oracle);
      if (!out.ok() || out.mode != mode || out.result->mode != mode) ++wrong;
    }
  }
  return {wrong == 0, std::to_string(cases) + " cases (|goal_state| 0/1/3), " + std::to_string(wrong) + " wrong"};
}

Verdict multi_target_minimality() {
  std::mt19937_64 rng(4004);
  int wrong = 0;
  for (int i = 0; i < 200; ++i) {
    auto g = random_room_graph(rng, 3 + static_cast<int>(rng() % 8), 0.3);
    const int k = 2 + static_cast<int>(rng() % 4);
    for (int j = 1; j <= k; ++j) add_object(g, {"cup_" + std::to_string(j), "cup", {}, g.rooms[rng() % g.rooms.size()].id});
    const auto m = graph_only_map(g);
    const auto& start = g.rooms[rng() % g.rooms.size()].id;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : g.objects) best = std::min(best, *enumerate_min_cost(g, start, o.room_id));
    const auto out = plan(m, make_request(m, start, "cup"), nullptr);
    if (!out.ok() || out.mode != PlanMode::MultiTarget || out.result->graph_cost != best) ++wrong;
  }
  return {wrong == 0, "200 maps with 2-5 candidates, " + std::to_string(wrong) + " not minimal"};
}

Verdict runtime() {
  auto spec = office_spec(1, 10);
  spec.objects_min = 5;
  spec.objects_max = 8;
  const auto m = generated_map(spec);
  BenchOptions opt;
  opt.trials = 50;
  const auto r = run_bench(m, opt);
  std::ostringstream os;
  os << m.graph.rooms.size() << " rooms, " << m.graph.objects.size() << " objects; mean "
     << detail::fixed(r.mean_ms(), 4) << " ms, max " << detail::fixed(r.max_ms(), 4) << " ms (" << r.hardware << ")";
  const bool big_enough = m.graph.rooms.size() >= 10 && m.graph.objects.size() >= 50;
  return {big_enough && r.mean_ms() <= 7.0 && r.max_ms() <= 10.0, os.str()};
}

Verdict known_target_success() {
  int maps = 0, perfect = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto m = generated_map(office_spec(seed, 4 + static_cast<int>(seed % 5)));
    BenchOptions opt;
    opt.trials = 50;
    opt.seed = seed;
    const auto r = run_bench(m, opt);
    ++maps;
    if (r.success_rate(PlanMode::Targeted) == 1.0) ++perfect;
  }
  return {perfect == maps, std::to_string(perfect) + "/" + std::to_string(maps) + " maps at success_rate 1.0 (50 trials each)"};
}

Verdict discovery_equivalence() {
  int trials = 0, targeted_ok = 0, truth_ok = 0, adv_ok = 0, adv_paths = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = generated_map(office_spec(seed, 6));
    TruthOracle truth(m.graph);
    AdversarialOracle adversary(m.graph);
    BenchOptions opt;
    opt.trials = 20;
    opt.seed = seed;
    for (const auto& t : sample_trials(m.graph, opt)) {
      ++trials;
      const auto* goal = find_object(m.graph, t.goal);
      const auto targeted = plan(m, make_request(m, t.start_room, t.goal), nullptr);
      if (trial_succeeded(m, t, targeted)) ++targeted_ok;

      // same (start, goal) pair, goal class removed from the map
      BenchTrial d{PlanMode::Discovery, t.start_room, goal->class_label, goal->class_label};
      const auto hidden = without_class(m, d.hidden_class);
      const auto with_truth = plan(hidden, make_request(hidden, d.start_room, d.goal), &truth);
      if (with_truth.mode == PlanMode::Discovery && trial_succeeded(m, d, with_truth)) ++truth_ok;
      const auto with_adv = plan(hidden, make_request(hidden, d.start_room, d.goal), &adversary);
      if (with_adv.ok() && with_adv.mode == PlanMode::Discovery) ++adv_paths;
      if (trial_succeeded(m, d, with_adv)) ++adv_ok;
    }
  }
  std::ostringstream os;
  os << trials << " pairs: targeted " << targeted_ok << ", truth-oracle discovery " << truth_ok
     << ", adversarial successes " << adv_ok << " with " << adv_paths << " paths generated";
  return {truth_ok == targeted_ok && adv_ok == 0 && adv_paths == trials, os.str()};
}

Verdict reconstruction() {
  int ok = 0;
  double worst_iou = 1.0;
  std::string failures_seen;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto spec = office_spec(seed, 2 + static_cast<int>(seed % 9));
    if (seed % 4 == 0) spec.layout = "suite";
    const auto env = generate(spec);
    const auto m = build_semantic_map(env.costmap, observations_of(env.truth));
    const auto res = compare_to_truth(m, env);
    if (res.ok(0.8)) {
      ++ok;
      worst_iou = std::min(worst_iou, res.min_iou);
    } else {
      failures_seen += " seed " + std::to_string(seed) + " (" + res.detail + ")";
    }
  }
  std::ostringstream os;
  os << ok << "/100 seeds isomorphic with IoU >= 0.8; worst matched IoU " << detail::fixed(worst_iou, 3) << failures_seen;
  return {ok >= 95, os.str()};
}

Verdict round_trip() {
  TempDir dir("acceptance-rt");
  int equal = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto spec = office_spec(seed, 2 + static_cast<int>(seed % 4));
    spec.room_size_max = 4.0;
    if (seed % 3 == 0) spec.layout = "suite";
    const auto m = generated_map(spec, "rt-" + std::to_string(seed));
    const std::string path = dir / std::to_string(seed);
    save_map(m, path);
    const auto back = load_map(path);
    bool same = back == m;
    for (std::size_t i = 0; same && i < m.graph.room_edges.size(); ++i)
      same = std::memcmp(&back.graph.room_edges[i].weight, &m.graph.room_edges[i].weight, sizeof(double)) == 0;
    if (same) ++equal;
  }
  return {equal == 100, std::to_string(equal) + "/100 maps equal after save/load (rasters and weights bit-exact)"};
}

Verdict determinism() {
  struct Run {
    std::vector<std::vector<std::string>> plans;
    std::string svg;
    std::string report;
  };
  auto once = [] {
    Run r;
    const auto m = generated_map(office_spec(77, 6));
    MockOracle oracle(parse_cooccurrence_table(default_cooccurrence_text()));
    for (const char* goal : {"desk", "fridge_1", "coffee_machine", "kitchen", "stapler"}) {
      const auto out = plan(m, make_request(m, m.graph.rooms.front().id, goal, {false, true, false}), &oracle);
      r.plans.push_back(out.ok() ? out.result->nodes : std::vector<std::string>{"<failed>"});
      if (r.svg.empty() && out.ok()) r.svg = render_svg(m, &*out.result);
    }
    BenchOptions opt;
    opt.trials = 60;
    opt.seed = 9;
    opt.mode = BenchMode::Mixed;
    opt.oracle = &oracle;
    const auto rep = run_bench(m, opt);
    r.report = bench_report_json(rep, false).dump();
    for (const auto& p : rep.paths)
      for (const auto& n : p) r.report += " " + n;
    return r;
  };
  const auto a = once(), b = once();
  const bool same_plans = a.plans == b.plans, same_svg = a.svg == b.svg && !a.svg.empty(), same_report = a.report == b.report;
  std::ostringstream os;
  os << "plans " << (same_plans ? "identical" : "differ") << ", SVG " << (same_svg ? "identical" : "differ") << " ("
     << a.svg.size() << " bytes), bench report " << (same_report ? "identical" : "differs") << " modulo wall time";
  return {same_plans && same_svg && same_report, os.str()};
}

// One random corruption of a valid map. Returns the mutation name and
// whether it is a graph-only mutation (checked with validate_graph) or needs
// the cross-layer check (a dropped room edge is still a well-formed graph).
std::pair<std::string, bool> mutate(SemanticMap& m, std::mt19937_64& rng) {
  auto& g = m.graph;
  auto pick = [&](auto& v) -> auto& { return v[rng() % v.size()]; };
  switch (rng() % 13) {
    case 0: {
      auto& o = pick(g.objects);
      std::string other;
      do other = pick(g.rooms).id;
      while (other == o.room_id);
      o.room_id = other;
      return {"flip object room", true};
    }
    case 1:
      g.containment.erase(g.containment.begin() + static_cast<std::ptrdiff_t>(rng() % g.containment.size()));
      return {"drop containment", true};
    case 2:
      g.containment.push_back(pick(g.containment));
      return {"duplicate containment", true};
    case 3:
      pick(g.room_edges).room_b = "ghost_room";
      return {"dangling edge", true};
    case 4: {
      auto& e = pick(g.room_edges);
      e.room_b = e.room_a;
      return {"self-loop", true};
    }
    case 5:
      pick(g.room_edges).weight = (rng() % 2) ? -1.0 : std::numeric_limits<double>::quiet_NaN();
      return {"bad weight", true};
    case 6: {
      auto e = pick(g.room_edges);
      std::swap(e.room_a, e.room_b);
      g.room_edges.push_back(e);
      return {"duplicate edge", true};
    }
    case 7:
      g.objects[rng() % g.objects.size()].id = pick(g.rooms).id;
      return {"duplicate node id", true};
    case 8: {
      auto& r = pick(g.rooms);
      r.attributes.push_back("zz_phantom");
      return {"stale attributes", true};
    }
    case 9:
      pick(g.objects).class_label = "Fire Extinguisher";
      return {"unnormalized class", true};
    case 10: {
      auto& c = pick(g.containment);
      c.room_id = "ghost_room";
      return {"dangling containment", true};
    }
    case 11:
      pick(g.rooms).cell_count = -1;
      return {"negative cell count", true};
    default:
      g.room_edges.erase(g.room_edges.begin() + static_cast<std::ptrdiff_t>(rng() % g.room_edges.size()));
      return {"drop room edge", false};
  }
}

Verdict fuzzing() {
  std::vector<SemanticMap> bases;
  int false_positives = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    bases.push_back(generated_map(office_spec(seed, 3 + static_cast<int>(seed % 5))));
    if (!validate_graph(bases.back().graph).empty() || !validate_map(bases.back()).empty()) ++false_positives;
  }
  std::mt19937_64 rng(1111);
  int missed = 0, graph_checked = 0, map_checked = 0;
  std::string missed_kinds;
  for (int i = 0; i < 1000; ++i) {
    auto m = bases[rng() % bases.size()];
    const auto [kind, graph_only] = mutate(m, rng);
    const bool caught = graph_only ? !validate_graph(m.graph).empty() : !validate_map(m).empty();
    (graph_only ? graph_checked : map_checked)++;
    if (!caught) {
      ++missed;
      missed_kinds += " " + kind;
    }
  }
  std::ostringstream os;
  os << "1000 mutations (" << graph_checked << " via validate_graph, " << map_checked
     << " dropped edges via the cross-layer check), " << missed << " undetected; " << false_positives
     << " false positives on " << bases.size() << " clean maps" << missed_kinds;
  return {missed == 0 && false_positives == 0, os.str()};
}

}  // namespace

int main() {
  discovery_log() = [](const std::string&) {};
  report(1, "graph Dijkstra equals simple-path enumeration", graph_oracle);
  report(2, "grid Dijkstra equals brute-force relaxation", grid_oracle);
  report(3, "mode dispatch by goal-state size", mode_dispatch);
  report(4, "multi-target returns the cheapest candidate", multi_target_minimality);
  report(5, "targeted plan wall time (mean <= 7 ms, max <= 10 ms)", runtime);
  report(6, "known-target success rate is 1.0", known_target_success);
  report(7, "discovery with truthful and adversarial oracles", discovery_equivalence);
  report(8, "pipeline reconstructs generator ground truth", reconstruction);
  report(9, "save/load round trip", round_trip);
  report(10, "determinism of plans, SVG and bench report", determinism);
  report(11, "invariant fuzzing", fuzzing);
  std::printf("%d/11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
