#pragma once

// The full three-layer map: costmap, room-label raster and semantic graph.
//
// Room nodes are stored in raster-label order: graph.rooms[i] owns label
// i + 1. The label is therefore never written into graph.json.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "intellimove/graph.hpp"
#include "intellimove/metric.hpp"
#include "intellimove/segmentation.hpp"

namespace intellimove {

inline constexpr int kMapFormatVersion = 1;

struct MapMeta {
  std::string name;
  std::string created;  // ISO-8601, caller supplied
  int format_version = kMapFormatVersion;

  friend bool operator==(const MapMeta&, const MapMeta&) = default;
};

struct SemanticMap {
  CostmapGrid costmap;
  RoomLabelRaster raster;
  SemanticGraph graph;
  MapMeta meta;

  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;
};

// Raster label of a room node, 0 if the id is not a room.
inline std::uint16_t room_label(const SemanticMap& m, std::string_view room_id) {
  const auto i = room_index(m.graph, room_id);
  return i < 0 ? 0 : static_cast<std::uint16_t>(i + 1);
}

inline const RoomNode* room_at(const SemanticMap& m, const MetricPoint& p) {
  const auto cell = world_to_grid(m.costmap, p);
  const auto l = m.raster.at(cell);
  if (l == 0 || l > m.graph.rooms.size()) return nullptr;
  return &m.graph.rooms[l - 1u];
}

// Graph invariants plus cross-layer consistency with the costmap and raster.
inline std::vector<Violation> validate_map(const SemanticMap& m) {
  auto out = validate_graph(m.graph);
  for (const auto& v : validate_raster(m.raster, m.costmap)) out.push_back({"raster", v});
  if (m.raster.width != m.costmap.width() || m.raster.height != m.costmap.height() ||
      m.raster.labels.size() != m.costmap.size())
    return out;

  const auto& g = m.graph;
  const auto& costmap = m.costmap;
  std::map<std::uint16_t, std::int64_t> cells;
  for (auto l : m.raster.labels)
    if (l) ++cells[l];
  if (m.raster.max_label() > g.rooms.size())
    out.push_back({"raster", "label " + std::to_string(m.raster.max_label()) + " has no room node"});

  auto label_at = [&](const MetricPoint& p) -> int {
    try {
      return m.raster.at(world_to_grid(costmap, p));
    } catch (const BoundsError&) {
      return -1;
    }
  };

  for (std::size_t i = 0; i < g.rooms.size(); ++i) {
    const auto& r = g.rooms[i];
    const auto l = static_cast<std::uint16_t>(i + 1);
    if (!cells.count(l)) {
      out.push_back({r.id, "room has no cells in the raster"});
      continue;
    }
    if (cells[l] != r.cell_count) out.push_back({r.id, "cell_count disagrees with raster"});
    if (label_at(r.centroid) != l) out.push_back({r.id, "centroid lies outside the room region"});
  }
  for (const auto& o : g.objects) {
    const auto ri = room_index(g, o.room_id);
    if (ri >= 0 && label_at(o.position) != ri + 1)
      out.push_back({o.id, "object position is not labeled with its room"});
  }

  // Room edges must match raster adjacency exactly.
  std::set<std::pair<int, int>> raster_pairs;
  for (int r = 0; r < m.raster.height; ++r) {
    for (int c = 0; c < m.raster.width; ++c) {
      const int a = m.raster.at({c, r});
      if (!a) continue;
      for (auto [dc, dr] : {std::pair{1, 0}, std::pair{0, 1}}) {
        if (c + dc >= m.raster.width || r + dr >= m.raster.height) continue;
        const int b = m.raster.at({c + dc, r + dr});
        if (b && b != a) raster_pairs.insert(std::minmax(a, b));
      }
    }
  }
  std::set<std::pair<int, int>> edge_pairs;
  for (const auto& e : g.room_edges) {
    const int a = room_label(m, e.room_a), b = room_label(m, e.room_b);
    if (!a || !b || a == b) continue;
    const auto key = std::minmax(a, b);
    edge_pairs.insert(key);
    const std::string name = "edge " + e.room_a + " -- " + e.room_b;
    if (!raster_pairs.count(key)) out.push_back({name, "rooms are not adjacent in the raster"});
    if (!costmap.in_bounds(e.portal)) {
      out.push_back({name, "portal out of bounds"});
    } else if (const int pl = m.raster.at(e.portal); pl != a && pl != b) {
      out.push_back({name, "portal cell belongs to neither room"});
    }
  }
  for (const auto& [a, b] : raster_pairs) {
    if (a > static_cast<int>(g.rooms.size()) || b > static_cast<int>(g.rooms.size())) continue;
    if (!edge_pairs.count({a, b}))
      out.push_back({g.rooms[a - 1].id + " -- " + g.rooms[b - 1].id, "adjacent rooms have no room edge"});
  }
  return out;
}

}  // namespace intellimove
