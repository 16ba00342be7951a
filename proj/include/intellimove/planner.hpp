#pragma once

// Semantic planning over the room graph. A goal resolves to a goal state
// (set of matching nodes) and the size of that set picks the mode:
//   empty     -> Discovery: an oracle names a room, plan to it
//   singleton -> Targeted: one Dijkstra
//   several   -> Multi-target: Dijkstra per candidate, keep the cheapest

#include <chrono>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "intellimove/discovery.hpp"
#include "intellimove/graph.hpp"
#include "intellimove/metric.hpp"
#include "intellimove/semantic_map.hpp"

namespace intellimove {

enum class PlanMode { Discovery, Targeted, MultiTarget };

inline const char* to_string(PlanMode m) {
  switch (m) {
    case PlanMode::Discovery: return "discovery";
    case PlanMode::Targeted: return "targeted";
    case PlanMode::MultiTarget: return "multi-target";
  }
  return "?";
}

enum class FailureReason { None, NoRoute, DiscoveryFailed, InvalidStart };

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::NoRoute: return "no-route";
    case FailureReason::DiscoveryFailed: return "discovery-failed";
    case FailureReason::InvalidStart: return "invalid-start";
  }
  return "?";
}

struct PlanOptions {
  bool allow_inscribed = false;
  bool refine_metric = false;
  // Compare candidate paths by hop count instead of accumulated weight.
  bool hop_count = false;
};

using PlanStart = std::variant<std::string, MetricPoint>;

struct PlanRequest {
  PlanStart start;
  GoalQuery goal;
  PlanOptions options;
};

struct SemanticPath {
  std::vector<std::string> nodes;
  double graph_cost = 0.0;
  std::vector<MetricPoint> waypoints;
  double metric_cost = 0.0;  // valid when waypoints is non-empty
  PlanMode mode = PlanMode::Targeted;

  friend bool operator==(const SemanticPath&, const SemanticPath&) = default;
};

struct PlanOutcome {
  std::optional<SemanticPath> result;
  FailureReason failure_reason = FailureReason::None;
  PlanMode mode = PlanMode::Targeted;  // branch taken, also on failure
  std::string message;
  double wall_time_ms = 0.0;

  bool ok() const noexcept { return result.has_value(); }
};

// ---------------------------------------------------------------------------
// Graph-level Dijkstra
// ---------------------------------------------------------------------------

// Minimum-cost room path from start_room to goal_node. An object goal is
// reached through its containing room and appended as the final node.
// Equal-cost paths are ordered by their node-id sequence (lexicographic).
// Returns nullopt when the goal room is unreachable.
inline std::optional<SemanticPath> dijkstra(const SemanticGraph& g, const std::string& start_room,
                                            const std::string& goal_node, bool hop_count = false) {
  const auto s = room_index(g, start_room);
  if (s < 0) throw ValidationError("start '" + start_room + "' is not a room node");
  std::string goal_room = goal_node;
  const ObjectNode* goal_object = nullptr;
  if (room_index(g, goal_node) < 0) {
    goal_object = find_object(g, goal_node);
    if (!goal_object) throw ValidationError("goal '" + goal_node + "' is not a node of the graph");
    goal_room = goal_object->room_id;
  }
  const auto t = room_index(g, goal_room);
  if (t < 0) throw ValidationError("goal room '" + goal_room + "' is not a room node");

  const std::size_t n = g.rooms.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& e : g.room_edges) {
    const auto a = room_index(g, e.room_a), b = room_index(g, e.room_b);
    if (a < 0 || b < 0) continue;
    const double w = hop_count ? 1.0 : e.weight;
    adj[static_cast<std::size_t>(a)].emplace_back(static_cast<std::size_t>(b), w);
    adj[static_cast<std::size_t>(b)].emplace_back(static_cast<std::size_t>(a), w);
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(n, inf);
  std::vector<std::vector<std::size_t>> path(n);
  std::vector<char> done(n, 0);
  auto lex_less = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&](std::size_t x, std::size_t y) {
      return g.rooms[x].id < g.rooms[y].id;
    });
  };
  const auto src = static_cast<std::size_t>(s);
  cost[src] = 0.0;
  path[src] = {src};

  // Dense selection: room graphs are small and this keeps the (cost, path)
  // order exact.
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] || cost[i] == inf) continue;
      if (u == n || cost[i] < cost[u] || (cost[i] == cost[u] && lex_less(path[i], path[u]))) u = i;
    }
    if (u == n) break;
    done[u] = 1;
    if (u == static_cast<std::size_t>(t)) break;
    for (const auto& [v, w] : adj[u]) {
      if (done[v]) continue;
      const double c = cost[u] + w;
      if (c < cost[v] || (c == cost[v] && [&] {
            auto cand = path[u];
            cand.push_back(v);
            return lex_less(cand, path[v]);
          }())) {
        cost[v] = c;
        path[v] = path[u];
        path[v].push_back(v);
      }
    }
  }
  const auto dst = static_cast<std::size_t>(t);
  if (cost[dst] == inf) return std::nullopt;

  SemanticPath out;
  for (auto i : path[dst]) out.nodes.push_back(g.rooms[i].id);
  if (goal_object) out.nodes.push_back(goal_object->id);
  out.graph_cost = cost[dst];
  return out;
}

// Sum of the weights of consecutive room-room steps in `nodes`.
inline double path_edge_cost(const SemanticGraph& g, const std::vector<std::string>& nodes) {
  double total = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!find_room(g, nodes[i])) break;
    bool found = false;
    for (const auto& e : g.room_edges) {
      if ((e.room_a == nodes[i - 1] && e.room_b == nodes[i]) || (e.room_b == nodes[i - 1] && e.room_a == nodes[i])) {
        total += e.weight;
        found = true;
        break;
      }
    }
    if (!found) throw ValidationError("no room edge between " + nodes[i - 1] + " and " + nodes[i]);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Metric refinement
// ---------------------------------------------------------------------------

inline const RoomEdge* find_room_edge(const SemanticGraph& g, const std::string& a, const std::string& b) {
  for (const auto& e : g.room_edges)
    if ((e.room_a == a && e.room_b == b) || (e.room_a == b && e.room_b == a)) return &e;
  return nullptr;
}

// Waypoints from the start point through the portal of every traversed room
// edge to the goal (object position, else the goal room's centroid). Each
// leg is a grid shortest path; consecutive legs share their endpoint.
inline std::vector<MetricPoint> refine_to_metric(const SemanticMap& m, SemanticPath& path,
                                                 std::optional<MetricPoint> start_point = std::nullopt,
                                                 const GridSearchOptions& opt = {}) {
  const auto& g = m.graph;
  if (path.nodes.empty()) throw ValidationError("cannot refine an empty path");
  const auto* first = find_room(g, path.nodes.front());
  if (!first) throw ValidationError("path does not start at a room node");

  struct Anchor {
    GridIndex cell;
    std::string room;  // room the leg ending here runs through
  };
  std::vector<Anchor> anchors;
  anchors.push_back({world_to_grid(m.costmap, start_point.value_or(first->centroid)), first->id});
  std::string last_room = first->id;
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    const auto& id = path.nodes[i];
    if (const auto* room = find_room(g, id)) {
      const auto* e = find_room_edge(g, last_room, id);
      if (!e) throw ValidationError("no room edge between " + last_room + " and " + id);
      anchors.push_back({e->portal, last_room});
      last_room = room->id;
    } else if (const auto* obj = find_object(g, id)) {
      anchors.push_back({world_to_grid(m.costmap, obj->position), last_room});
    } else {
      throw ValidationError("path node '" + id + "' is not in the graph");
    }
  }
  if (find_room(g, path.nodes.back())) {
    anchors.push_back({world_to_grid(m.costmap, find_room(g, path.nodes.back())->centroid), last_room});
  }

  std::vector<GridIndex> cells{anchors.front().cell};
  GridCost total{};
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    try {
      const auto leg = grid_shortest_path(m.costmap, anchors[i - 1].cell, anchors[i].cell, opt);
      cells.insert(cells.end(), leg.cells.begin() + 1, leg.cells.end());
      total = total + leg.exact;
    } catch (const UnreachableError&) {
      throw ConsistencyError("metric refinement failed inside room '" + anchors[i].room + "'");
    } catch (const ValidationError& e) {
      throw ConsistencyError("metric refinement failed inside room '" + anchors[i].room + "': " + e.what());
    }
  }
  std::vector<MetricPoint> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(grid_to_world(m.costmap, c));
  path.waypoints = out;
  path.metric_cost = total.meters(m.costmap.resolution());
  return out;
}

// ---------------------------------------------------------------------------
// Planning entry point
// ---------------------------------------------------------------------------

// Resolves a start to a room id. Empty string means invalid start.
inline std::string resolve_start(const SemanticMap& m, const PlanStart& start) {
  if (const auto* id = std::get_if<std::string>(&start)) {
    if (find_room(m.graph, *id)) return *id;
    if (const auto* o = find_object(m.graph, *id)) return o->room_id;
    return {};
  }
  try {
    const auto* room = room_at(m, std::get<MetricPoint>(start));
    return room ? room->id : std::string{};
  } catch (const BoundsError&) {
    return {};
  }
}

inline PlanOutcome plan(const SemanticMap& m, const PlanRequest& request, const GoalOracle* oracle) {
  const auto t0 = std::chrono::steady_clock::now();
  PlanOutcome out;
  auto finish = [&]() -> PlanOutcome {
    out.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
  };
  auto fail = [&](FailureReason r, std::string msg) {
    out.failure_reason = r;
    out.message = std::move(msg);
    return finish();
  };

  const auto goal_state = find_goal_state(m.graph, request.goal);
  out.mode = goal_state.nodes.empty()      ? PlanMode::Discovery
             : goal_state.nodes.size() == 1 ? PlanMode::Targeted
                                            : PlanMode::MultiTarget;

  const std::string start_room = resolve_start(m, request.start);
  if (start_room.empty()) return fail(FailureReason::InvalidStart, "start does not resolve to a room");
  const bool hop = request.options.hop_count;

  std::optional<SemanticPath> best;
  switch (out.mode) {
    case PlanMode::Discovery: {
      DiscoveryResponse response;
      try {
        response = goal_llm_response(room_contexts(m.graph), request.goal, oracle);
      } catch (const DiscoveryFailedError& e) {
        return fail(FailureReason::DiscoveryFailed, e.what());
      } catch (const ParseError& e) {
        return fail(FailureReason::DiscoveryFailed, e.what());
      }
      best = dijkstra(m.graph, start_room, response.ranked_rooms.front().room_id, hop);
      if (!best) return fail(FailureReason::NoRoute, "oracle room " + response.ranked_rooms.front().room_id + " is unreachable");
      break;
    }
    case PlanMode::Targeted:
      best = dijkstra(m.graph, start_room, goal_state.nodes.front(), hop);
      if (!best) return fail(FailureReason::NoRoute, "goal " + goal_state.nodes.front() + " is unreachable");
      break;
    case PlanMode::MultiTarget: {
      double min_cost = std::numeric_limits<double>::infinity();
      for (const auto& node : goal_state.nodes) {
        auto p = dijkstra(m.graph, start_room, node, hop);
        if (p && p->graph_cost < min_cost) {
          min_cost = p->graph_cost;
          best = std::move(p);
        }
      }
      if (!best) return fail(FailureReason::NoRoute, "no goal candidate is reachable");
      break;
    }
  }
  best->mode = out.mode;
  if (hop) best->graph_cost = path_edge_cost(m.graph, best->nodes);
  if (request.options.refine_metric) {
    std::optional<MetricPoint> sp;
    if (const auto* p = std::get_if<MetricPoint>(&request.start)) sp = *p;
    refine_to_metric(m, *best, sp, GridSearchOptions{request.options.allow_inscribed});
  }
  out.result = std::move(best);
  return finish();
}

inline PlanRequest make_request(const SemanticMap& m, PlanStart start, std::string_view goal, PlanOptions options = {}) {
  return {std::move(start), make_goal_query(m.graph, goal), options};
}

}  // namespace intellimove
