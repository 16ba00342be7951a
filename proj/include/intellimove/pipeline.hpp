#pragma once

// Costmap + object observations -> three-layer semantic map:
// segmentation, object-to-room assignment, categorization, room naming and
// weighted room adjacency.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "intellimove/graph.hpp"
#include "intellimove/metric.hpp"
#include "intellimove/segmentation.hpp"
#include "intellimove/semantic_map.hpp"

namespace intellimove {

struct ObjectObservation {
  std::string id;  // generated as <class>_<k> when empty
  std::string class_label;
  MetricPoint position;
};

struct BuildOptions {
  SegmentationParams segmentation;
  std::vector<CategoryRule> rules = default_category_rules();
  GridSearchOptions grid;
  std::string name = "map";
  std::string created;
};

inline SemanticMap build_semantic_map(const CostmapGrid& costmap, const std::vector<ObjectObservation>& observations,
                                      const BuildOptions& options = {}) {
  SemanticMap m;
  m.costmap = costmap;
  m.meta = {options.name, options.created, kMapFormatVersion};
  m.raster = segment_rooms(costmap, options.segmentation);
  const std::size_t n_rooms = m.raster.max_label();

  // Assign observations to rooms.
  struct Placed {
    ObjectNode node;
    std::uint16_t label;
  };
  std::vector<Placed> placed;
  std::map<std::string, int> class_count;
  std::vector<std::set<std::string>> attrs(n_rooms + 1);
  for (const auto& obs : observations) {
    const auto cell = world_to_grid(costmap, obs.position);
    const auto l = m.raster.at(cell);
    const std::string cls = normalize_label(obs.class_label);
    std::string id = obs.id.empty() ? cls + "_" + std::to_string(++class_count[cls]) : obs.id;
    if (l == 0)
      throw ValidationError("object '" + id + "' at (" + detail::fixed(obs.position.x) + ", " +
                            detail::fixed(obs.position.y) + ") is not inside any room");
    attrs[l].insert(cls);
    placed.push_back({{id, cls, obs.position, {}}, l});
  }

  // Categorize, then name rooms <category>_<k> in label order.
  std::vector<std::string> names(n_rooms);
  std::vector<std::string> category(n_rooms);
  std::map<std::string, int> ordinal;
  for (std::size_t l = 1; l <= n_rooms; ++l) {
    category[l - 1] = categorize_room(attrs[l], options.rules);
    names[l - 1] = category[l - 1] + "_" + std::to_string(++ordinal[category[l - 1]]);
  }

  std::vector<std::int64_t> counts(n_rooms + 1, 0);
  for (auto l : m.raster.labels) ++counts[l];
  for (std::size_t l = 1; l <= n_rooms; ++l) {
    const auto c = room_centroid_cell(m.raster, static_cast<std::uint16_t>(l));
    add_room(m.graph, {names[l - 1], category[l - 1], grid_to_world(costmap, c), counts[l], {}});
  }
  for (auto& p : placed) {
    p.node.room_id = names[p.label - 1u];
    add_object(m.graph, p.node);
  }
  for (auto& e : extract_adjacency(m.raster, costmap, names, options.grid)) add_room_edge(m.graph, std::move(e));
  return m;
}

// objects.json: [{"id": ..., "class": ..., "position": [x, y]}, ...]
inline std::vector<ObjectObservation> parse_observations(const std::string& text, const std::string& source = "objects") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source + ": " + e.what());
  }
  if (!j.is_array()) throw FormatError(source + ": expected a JSON array of objects");
  std::vector<ObjectObservation> out;
  for (const auto& o : j) {
    if (!o.is_object() || !o.contains("class") || !o["class"].is_string() || !o.contains("position") ||
        !o["position"].is_array() || o["position"].size() != 2 || !o["position"][0].is_number() ||
        !o["position"][1].is_number())
      throw FormatError(source + ": each object needs 'class' and numeric 'position': [x, y]");
    ObjectObservation obs;
    if (o.contains("id")) {
      if (!o["id"].is_string()) throw FormatError(source + ": 'id' must be a string");
      obs.id = o["id"].get<std::string>();
    }
    obs.class_label = o["class"].get<std::string>();
    obs.position = {o["position"][0].get<double>(), o["position"][1].get<double>()};
    out.push_back(std::move(obs));
  }
  return out;
}

inline std::string observations_json(const std::vector<ObjectObservation>& objects) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& o : objects)
    j.push_back({{"id", o.id}, {"class", o.class_label}, {"position", {o.position.x, o.position.y}}});
  return j.dump(2) + "\n";
}

}  // namespace intellimove
