#pragma once

// Planning benchmark: random (start, goal) trials over one frozen map,
// success rate per mode and plan wall-time statistics.

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "intellimove/envgen.hpp"
#include "intellimove/planner.hpp"
#include "intellimove/semantic_map.hpp"

namespace intellimove {

inline constexpr int kBenchReportVersion = 1;

enum class BenchMode { Targeted, MultiTarget, Discovery, Mixed };

inline BenchMode parse_bench_mode(const std::string& s) {
  if (s == "targeted") return BenchMode::Targeted;
  if (s == "multi" || s == "multi-target") return BenchMode::MultiTarget;
  if (s == "discovery") return BenchMode::Discovery;
  if (s == "mixed") return BenchMode::Mixed;
  throw ConfigError("unknown bench mode '" + s + "' (targeted|multi|discovery|mixed)");
}

struct BenchOptions {
  int trials = 50;
  std::uint64_t seed = 1;
  BenchMode mode = BenchMode::Targeted;
  PlanOptions plan;
  const GoalOracle* oracle = nullptr;
};

// One sampled trial. For discovery trials `hidden_class` is removed from the
// map before planning and the trial succeeds when the plan ends in a room
// that held that class.
struct BenchTrial {
  PlanMode kind = PlanMode::Targeted;
  std::string start_room;
  std::string goal;
  std::string hidden_class;
};

struct BenchModeStats {
  int trials = 0;
  int successes = 0;
  int path_generated = 0;

  friend bool operator==(const BenchModeStats&, const BenchModeStats&) = default;
};

struct BenchReport {
  int n_trials = 0;
  std::map<PlanMode, BenchModeStats> per_mode;
  std::vector<double> wall_times_ms;
  std::vector<std::vector<std::string>> paths;  // node sequence per trial (empty on failure)
  std::string hardware;

  double mean_ms() const {
    return wall_times_ms.empty() ? 0.0
                                 : std::accumulate(wall_times_ms.begin(), wall_times_ms.end(), 0.0) /
                                       static_cast<double>(wall_times_ms.size());
  }
  double p50_ms() const {
    if (wall_times_ms.empty()) return 0.0;
    auto v = wall_times_ms;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  double max_ms() const {
    return wall_times_ms.empty() ? 0.0 : *std::max_element(wall_times_ms.begin(), wall_times_ms.end());
  }
  std::optional<double> success_rate(PlanMode m) const {
    auto it = per_mode.find(m);
    if (it == per_mode.end() || it->second.trials == 0) return std::nullopt;
    return static_cast<double>(it->second.successes) / it->second.trials;
  }
};

inline std::string hardware_note() {
  std::string model;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      model = std::string(detail::trim(line.substr(line.find(':') + 1)));
      break;
    }
  }
  if (model.empty()) model = "unknown CPU";
  return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " hardware threads";
}

// Starts are uniform over rooms. Targeted goals are uniform over object ids,
// multi-target goals uniform over classes with two or more instances and
// discovery goals uniform over object classes (then hidden).
inline std::vector<BenchTrial> sample_trials(const SemanticGraph& g, const BenchOptions& opt) {
  std::vector<BenchTrial> out;
  if (opt.trials <= 0 || g.rooms.empty()) return out;
  detail::SplitRng rng(opt.seed);
  std::map<std::string, int> class_count;
  for (const auto& o : g.objects) ++class_count[o.class_label];
  std::vector<std::string> classes, multi_classes;
  for (const auto& [c, n] : class_count) {
    classes.push_back(c);
    if (n >= 2) multi_classes.push_back(c);
  }
  auto pick = [&](const auto& v) -> const auto& { return v[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(v.size()) - 1))]; };

  for (int i = 0; i < opt.trials; ++i) {
    PlanMode kind = PlanMode::Targeted;
    switch (opt.mode) {
      case BenchMode::Targeted: kind = PlanMode::Targeted; break;
      case BenchMode::MultiTarget: kind = PlanMode::MultiTarget; break;
      case BenchMode::Discovery: kind = PlanMode::Discovery; break;
      case BenchMode::Mixed: kind = static_cast<PlanMode>(rng.uniform(0, 2)); break;
    }
    BenchTrial t;
    t.kind = kind;
    t.start_room = pick(g.rooms).id;
    if (kind == PlanMode::MultiTarget && multi_classes.empty()) kind = t.kind = PlanMode::Targeted;
    if (g.objects.empty()) {
      t.kind = PlanMode::Targeted;
      t.goal = pick(g.rooms).id;
    } else if (kind == PlanMode::Targeted) {
      t.goal = pick(g.objects).id;
    } else if (kind == PlanMode::MultiTarget) {
      t.goal = pick(multi_classes);
    } else {
      t.goal = pick(classes);
      t.hidden_class = t.goal;
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline SemanticMap without_class(const SemanticMap& m, const std::string& cls) {
  SemanticMap copy = m;
  auto& g = copy.graph;
  std::set<std::string> removed;
  for (const auto& o : g.objects)
    if (o.class_label == cls) removed.insert(o.id);
  std::erase_if(g.objects, [&](const ObjectNode& o) { return removed.count(o.id) > 0; });
  std::erase_if(g.containment, [&](const ContainmentEdge& c) { return removed.count(c.object_id) > 0; });
  for (auto& r : g.rooms) r.attributes = derived_attributes(g, r.id);
  return copy;
}

inline bool trial_succeeded(const SemanticMap& original, const BenchTrial& t, const PlanOutcome& out) {
  if (!out.ok() || out.result->nodes.empty()) return false;
  const auto& last = out.result->nodes.back();
  switch (t.kind) {
    case PlanMode::Targeted:
      return last == t.goal;
    case PlanMode::MultiTarget: {
      const auto* o = find_object(original.graph, last);
      return o && o->class_label == t.goal;
    }
    case PlanMode::Discovery: {
      const auto* r = find_room(original.graph, last);
      return r && std::binary_search(r->attributes.begin(), r->attributes.end(), t.hidden_class);
    }
  }
  return false;
}

// Trials run sequentially so wall times are not skewed by contention. One
// untimed warm-up plan runs first.
inline BenchReport run_bench(const SemanticMap& m, const BenchOptions& opt) {
  BenchReport report;
  report.hardware = hardware_note();
  const auto trials = sample_trials(m.graph, opt);
  report.n_trials = static_cast<int>(trials.size());
  if (trials.empty()) return report;

  {
    const auto& t = trials.front();
    (void)plan(m, make_request(m, t.start_room, t.goal, opt.plan), opt.oracle);
  }
  for (const auto& t : trials) {
    PlanOutcome out;
    if (t.kind == PlanMode::Discovery) {
      const auto hidden = without_class(m, t.hidden_class);
      out = plan(hidden, make_request(hidden, t.start_room, t.goal, opt.plan), opt.oracle);
    } else {
      out = plan(m, make_request(m, t.start_room, t.goal, opt.plan), opt.oracle);
    }
    auto& stats = report.per_mode[t.kind];
    ++stats.trials;
    if (out.ok()) ++stats.path_generated;
    if (trial_succeeded(m, t, out)) ++stats.successes;
    report.wall_times_ms.push_back(out.wall_time_ms);
    report.paths.push_back(out.ok() ? out.result->nodes : std::vector<std::string>{});
  }
  return report;
}

inline nlohmann::json bench_report_json(const BenchReport& r, bool include_timing = true) {
  nlohmann::json modes = nlohmann::json::object();
  for (const auto& [mode, s] : r.per_mode) {
    nlohmann::json j{{"trials", s.trials}, {"successes", s.successes}, {"paths_generated", s.path_generated}};
    if (auto rate = r.success_rate(mode)) j["success_rate"] = *rate;
    modes[to_string(mode)] = j;
  }
  nlohmann::json out{{"version", kBenchReportVersion}, {"n_trials", r.n_trials}, {"modes", modes}, {"hardware", r.hardware}};
  if (include_timing && !r.wall_times_ms.empty())
    out["wall_time_ms"] = {{"mean", r.mean_ms()}, {"p50", r.p50_ms()}, {"max", r.max_ms()}};
  return out;
}

}  // namespace intellimove
