#pragma once

// Test-only helpers: independent oracles and fixtures. Nothing here calls
// into the code path it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "intellimove/intellimove.hpp"

namespace intellimove::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("intellimove-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Grid oracle: Bellman-Ford style relaxation to a fixed point over exact
// (straight, diagonal) integer pairs, compared via long double.
// ---------------------------------------------------------------------------

struct ExactPair {
  std::int64_t s = 0, d = 0;
  bool operator==(const ExactPair&) const = default;
};

inline bool pair_less(const ExactPair& a, const ExactPair& b) {
  // a.s + r2 a.d < b.s + r2 b.d, decided with integers only
  const long long x = a.s - b.s;
  const long long y = b.d - a.d;  // want x < sqrt(2) y
  if (x < 0 && y >= 0) return true;
  if (x >= 0 && y <= 0) return false;
  if (x >= 0) return x * x < 2 * y * y;  // y > 0
  return x * x > 2 * y * y;              // x < 0, y < 0
}

inline std::optional<ExactPair> brute_force_grid_cost(const CostmapGrid& g, GridIndex from, GridIndex to,
                                                      bool allow_inscribed = false) {
  const int W = g.width(), H = g.height();
  auto weight = [&](int c, int r) -> int {
    const int v = g.cells()[static_cast<std::size_t>(r) * W + c];
    if (v <= 252) return v;
    if (v == 253 && allow_inscribed) return 256;
    return -1;
  };
  if (weight(from.col, from.row) < 0 || weight(to.col, to.row) < 0) return std::nullopt;
  std::vector<std::optional<ExactPair>> best(static_cast<std::size_t>(W) * H);
  best[static_cast<std::size_t>(from.row) * W + from.col] = ExactPair{};
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < W; ++c) {
        const auto& cur = best[static_cast<std::size_t>(r) * W + c];
        if (!cur) continue;
        const int wu = weight(c, r);
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (!dr && !dc) continue;
            const int nc = c + dc, nr = r + dr;
            if (nc < 0 || nr < 0 || nc >= W || nr >= H) continue;
            const int wv = weight(nc, nr);
            if (wv < 0) continue;
            ExactPair cand = *cur;
            if (dr && dc) cand.d += 256 + wu + wv;
            else cand.s += 256 + wu + wv;
            auto& slot = best[static_cast<std::size_t>(nr) * W + nc];
            if (!slot || pair_less(cand, *slot)) {
              slot = cand;
              changed = true;
            }
          }
      }
  }
  return best[static_cast<std::size_t>(to.row) * W + to.col];
}

inline CostmapGrid random_grid(std::mt19937_64& rng, int w, int h, double lethal_p = 0.25, double res = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> graded(0, 252);
  std::vector<Cost> cells(static_cast<std::size_t>(w) * h);
  for (auto& c : cells) {
    const double x = u(rng);
    if (x < lethal_p) c = cost::kLethal;
    else if (x < lethal_p + 0.03) c = cost::kUnknown;
    else if (x < lethal_p + 0.06) c = cost::kInscribed;
    else if (x < 0.7) c = cost::kFree;
    else c = static_cast<Cost>(graded(rng));
  }
  return CostmapGrid(w, h, res, 0.0, 0.0, std::move(cells));
}

// ---------------------------------------------------------------------------
// Graph oracle: enumerate every simple path between two rooms.
// ---------------------------------------------------------------------------

inline std::optional<double> enumerate_min_cost(const SemanticGraph& g, const std::string& from, const std::string& to) {
  std::map<std::string, std::vector<std::pair<std::string, double>>> adj;
  for (const auto& e : g.room_edges) {
    adj[e.room_a].emplace_back(e.room_b, e.weight);
    adj[e.room_b].emplace_back(e.room_a, e.weight);
  }
  std::optional<double> best;
  std::set<std::string> on_path{from};
  std::function<void(const std::string&, double)> walk = [&](const std::string& u, double acc) {
    if (u == to) {
      if (!best || acc < *best) best = acc;
      return;
    }
    for (const auto& [v, w] : adj[u]) {
      if (on_path.count(v)) continue;
      on_path.insert(v);
      walk(v, acc + w);  // summed left to right like any path walk
      on_path.erase(v);
    }
  };
  walk(from, 0.0);
  return best;
}

// Random connected room graph: spanning tree plus extra edges.
inline SemanticGraph random_room_graph(std::mt19937_64& rng, int n_rooms, double extra_edge_p = 0.3) {
  SemanticGraph g;
  std::uniform_real_distribution<double> w(0.1, 10.0), u(0.0, 1.0);
  for (int i = 0; i < n_rooms; ++i) add_room(g, {"room_" + std::to_string(i), "office", {}, 1, {}});
  for (int i = 1; i < n_rooms; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    add_room_edge(g, {"room_" + std::to_string(parent(rng)), "room_" + std::to_string(i), w(rng), {}});
  }
  for (int i = 0; i < n_rooms; ++i)
    for (int j = i + 1; j < n_rooms; ++j) {
      if (u(rng) >= extra_edge_p) continue;
      if (find_room_edge(g, "room_" + std::to_string(i), "room_" + std::to_string(j))) continue;
      add_room_edge(g, {"room_" + std::to_string(i), "room_" + std::to_string(j), w(rng), {}});
    }
  return g;
}

// Wraps a bare graph into a SemanticMap for planner calls that never touch
// the metric layers.
inline SemanticMap graph_only_map(SemanticGraph g) {
  SemanticMap m;
  m.costmap = CostmapGrid(1, 1, 1.0, 0.0, 0.0, {cost::kLethal});
  m.raster = {1, 1, {0}};
  m.graph = std::move(g);
  return m;
}

// ---------------------------------------------------------------------------
// Oracles for discovery
// ---------------------------------------------------------------------------

// Always names a room that actually contains the goal class.
class TruthOracle final : public GoalOracle {
 public:
  explicit TruthOracle(SemanticGraph truth) : truth_(std::move(truth)) {}
  DiscoveryResponse query(const std::vector<RoomContext>& contexts, const GoalQuery& goal) const override {
    DiscoveryResponse r;
    for (const auto& c : contexts) {
      const auto* room = find_room(truth_, c.room_id);
      if (room && std::binary_search(room->attributes.begin(), room->attributes.end(), goal.text))
        r.ranked_rooms.push_back({c.room_id, 1.0});
    }
    for (const auto& c : contexts)
      if (std::none_of(r.ranked_rooms.begin(), r.ranked_rooms.end(), [&](const auto& x) { return x.room_id == c.room_id; }))
        r.ranked_rooms.push_back({c.room_id, 0.0});
    r.rationale = "ground truth";
    return r;
  }
  std::string name() const override { return "truth"; }

 private:
  SemanticGraph truth_;
};

// Always names a room that does not contain the goal class.
class AdversarialOracle final : public GoalOracle {
 public:
  explicit AdversarialOracle(SemanticGraph truth) : truth_(std::move(truth)) {}
  DiscoveryResponse query(const std::vector<RoomContext>& contexts, const GoalQuery& goal) const override {
    DiscoveryResponse r;
    for (const auto& c : contexts) {
      const auto* room = find_room(truth_, c.room_id);
      if (room && !std::binary_search(room->attributes.begin(), room->attributes.end(), goal.text))
        r.ranked_rooms.push_back({c.room_id, 1.0});
    }
    r.rationale = "adversarial";
    return r;
  }
  std::string name() const override { return "adversarial"; }

 private:
  SemanticGraph truth_;
};

// Fixed answer regardless of input.
class FixedOracle final : public GoalOracle {
 public:
  explicit FixedOracle(DiscoveryResponse r) : r_(std::move(r)) {}
  DiscoveryResponse query(const std::vector<RoomContext>&, const GoalQuery&) const override { return r_; }
  std::string name() const override { return "fixed"; }

 private:
  DiscoveryResponse r_;
};

// ---------------------------------------------------------------------------
// Pipeline reconstruction against generator ground truth
// ---------------------------------------------------------------------------

inline std::vector<ObjectObservation> observations_of(const GroundTruth& t) {
  std::vector<ObjectObservation> out;
  for (const auto& o : t.objects) out.push_back({o.id, o.class_label, o.position});
  return out;
}

struct ReconstructionResult {
  bool room_count = false;
  bool bijection = false;
  bool adjacency = false;
  bool categories = false;
  double min_iou = 0.0;
  std::string detail;

  bool isomorphic() const { return room_count && bijection && adjacency && categories; }
  bool ok(double iou_min = 0.8) const { return isomorphic() && min_iou >= iou_min; }
};

inline ReconstructionResult compare_to_truth(const SemanticMap& m, const GeneratedEnvironment& env) {
  ReconstructionResult res;
  const auto& gt = env.truth;
  const auto& raster = m.raster;
  res.room_count = m.graph.rooms.size() == gt.rooms.size();

  // Each ground-truth room maps to the segment covering most of its cells.
  std::map<std::string, std::uint16_t> match;
  std::set<std::uint16_t> used;
  bool bijection = true;
  double min_iou = 1.0;
  std::map<std::uint16_t, std::int64_t> seg_size;
  for (auto l : raster.labels)
    if (l) ++seg_size[l];
  for (const auto& room : gt.rooms) {
    std::map<std::uint16_t, std::int64_t> votes;
    for (int r = room.interior.r0; r < room.interior.r1; ++r)
      for (int c = room.interior.c0; c < room.interior.c1; ++c) ++votes[raster.at({c, r})];
    std::uint16_t best = 0;
    std::int64_t best_n = -1;
    for (const auto& [l, n] : votes)
      if (l && n > best_n) {
        best = l;
        best_n = n;
      }
    if (best == 0 || 2 * best_n <= room.interior.area() || !used.insert(best).second) {
      bijection = false;
      res.detail += "room " + room.id + " not majority-covered by a unique segment; ";
      continue;
    }
    match[room.id] = best;
    const double inter = static_cast<double>(best_n);
    const double uni = static_cast<double>(room.interior.area() + seg_size[best]) - inter;
    min_iou = std::min(min_iou, inter / uni);
  }
  res.bijection = bijection && res.room_count;
  res.min_iou = res.bijection ? min_iou : 0.0;
  if (!res.bijection) return res;

  std::set<std::pair<std::string, std::string>> gt_edges, got_edges;
  for (const auto& d : gt.doors) gt_edges.insert(std::minmax(m.graph.rooms[match[d.room_a] - 1u].id, m.graph.rooms[match[d.room_b] - 1u].id));
  for (const auto& e : m.graph.room_edges) got_edges.insert(std::minmax(e.room_a, e.room_b));
  res.adjacency = gt_edges == got_edges;
  if (!res.adjacency) res.detail += "adjacency differs; ";

  res.categories = true;
  for (const auto& room : gt.rooms)
    if (m.graph.rooms[match[room.id] - 1u].category != room.category) {
      res.categories = false;
      res.detail += room.id + " categorized as " + m.graph.rooms[match[room.id] - 1u].category + "; ";
    }
  return res;
}

inline EnvSpec office_spec(std::uint64_t seed, int n_rooms = 6) {
  EnvSpec s;
  s.seed = seed;
  s.n_rooms = n_rooms;
  return s;
}

// Office suite in the style of the classic demo: a corridor along the
// bottom with three offices above it, left to right. office_1 holds a
// bookcase and chairs, office_2 a computer, office_3 the only desk.
inline SemanticMap fig3_style_map() {
  const double res = 0.05;
  const int wt = 3, room = 80, cw = 40, door = 16;
  const int W = wt + 3 * (room + wt);
  const int H = wt + cw + wt + room + wt;
  std::vector<Cost> cells(static_cast<std::size_t>(W) * H, cost::kLethal);
  auto carve = [&](int c0, int r0, int c1, int r1) {
    for (int r = r0; r < r1; ++r)
      for (int c = c0; c < c1; ++c) cells[static_cast<std::size_t>(r) * W + c] = cost::kFree;
  };
  carve(wt, wt, W - wt, wt + cw);  // corridor
  for (int i = 0; i < 3; ++i) {
    const int c0 = wt + i * (room + wt);
    carve(c0, wt + cw + wt, c0 + room, wt + cw + wt + room);
    carve(c0 + 32, wt + cw, c0 + 32 + door, wt + cw + wt);  // door
  }
  CostmapGrid grid(W, H, res, 0.0, 0.0, std::move(cells));
  auto in_room = [&](int i, double dx, double dy) {
    const double x0 = (wt + i * (room + wt)) * res, y0 = (wt + cw + wt) * res;
    return MetricPoint{x0 + dx, y0 + dy};
  };
  std::vector<ObjectObservation> obs = {
      {"bookcase_1", "bookcase", in_room(0, 0.5, 3.5)},
      {"chair_1", "chair", in_room(0, 2.0, 2.0)},
      {"computer_1", "computer", in_room(1, 2.0, 2.0)},
      {"desk_1", "desk", in_room(2, 2.5, 3.0)},
      {"chair_2", "chair", in_room(2, 2.5, 2.2)},
      {"fire_extinguisher_1", "fire_extinguisher", MetricPoint{1.0, 0.6}},
  };
  BuildOptions opt;
  opt.name = "fig3";
  opt.created = "2024-01-01T00:00:00Z";
  return build_semantic_map(grid, obs, opt);
}

}  // namespace intellimove::testing
