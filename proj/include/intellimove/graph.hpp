#pragma once

// Object and room layers of the semantic map, stored as one graph: room
// nodes, object nodes, undirected weighted room-room edges and room-object
// containment edges.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "intellimove/errors.hpp"
#include "intellimove/metric.hpp"

namespace intellimove {

// Lowercase, spaces to underscores.
inline std::string normalize_label(std::string_view s) {
  auto t = detail::trim(s);
  std::string out;
  out.reserve(t.size());
  for (char c : t) out.push_back(c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

struct RoomNode {
  std::string id;
  std::string category = "uncategorized";
  MetricPoint centroid;
  std::int64_t cell_count = 0;
  std::vector<std::string> attributes;  // sorted, deduplicated object classes

  friend bool operator==(const RoomNode&, const RoomNode&) = default;
};

struct ObjectNode {
  std::string id;
  std::string class_label;
  MetricPoint position;
  std::string room_id;

  friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

struct RoomEdge {
  std::string room_a;
  std::string room_b;
  double weight = 0.0;
  GridIndex portal;

  friend bool operator==(const RoomEdge&, const RoomEdge&) = default;
};

struct ContainmentEdge {
  std::string room_id;
  std::string object_id;

  friend bool operator==(const ContainmentEdge&, const ContainmentEdge&) = default;
};

struct SemanticGraph {
  std::vector<RoomNode> rooms;
  std::vector<ObjectNode> objects;
  std::vector<RoomEdge> room_edges;
  std::vector<ContainmentEdge> containment;

  friend bool operator==(const SemanticGraph&, const SemanticGraph&) = default;
};

inline const RoomNode* find_room(const SemanticGraph& g, std::string_view id) {
  for (const auto& r : g.rooms)
    if (r.id == id) return &r;
  return nullptr;
}

inline const ObjectNode* find_object(const SemanticGraph& g, std::string_view id) {
  for (const auto& o : g.objects)
    if (o.id == id) return &o;
  return nullptr;
}

inline std::ptrdiff_t room_index(const SemanticGraph& g, std::string_view id) {
  for (std::size_t i = 0; i < g.rooms.size(); ++i)
    if (g.rooms[i].id == id) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

inline bool has_node(const SemanticGraph& g, std::string_view id) {
  return find_room(g, id) != nullptr || find_object(g, id) != nullptr;
}

inline std::vector<std::string> derived_attributes(const SemanticGraph& g, std::string_view room_id) {
  std::set<std::string> classes;
  for (const auto& o : g.objects)
    if (o.room_id == room_id) classes.insert(o.class_label);
  return {classes.begin(), classes.end()};
}

// ---------------------------------------------------------------------------
// Build-phase mutation. Each call keeps every graph invariant intact.
// ---------------------------------------------------------------------------

inline void add_room(SemanticGraph& g, RoomNode room) {
  if (room.id.empty()) throw ValidationError("room id must not be empty");
  if (has_node(g, room.id)) throw ConflictError("duplicate node id '" + room.id + "'");
  room.category = normalize_label(room.category);
  if (room.category.empty()) room.category = "uncategorized";
  room.attributes = derived_attributes(g, room.id);
  g.rooms.push_back(std::move(room));
}

inline void add_object(SemanticGraph& g, ObjectNode object) {
  if (object.id.empty()) throw ValidationError("object id must not be empty");
  if (has_node(g, object.id)) throw ConflictError("duplicate node id '" + object.id + "'");
  const auto ri = room_index(g, object.room_id);
  if (ri < 0) throw ValidationError("object '" + object.id + "' references unknown room '" + object.room_id + "'");
  object.class_label = normalize_label(object.class_label);
  if (object.class_label.empty()) throw ValidationError("object '" + object.id + "' has an empty class label");
  auto& attrs = g.rooms[static_cast<std::size_t>(ri)].attributes;
  if (auto it = std::lower_bound(attrs.begin(), attrs.end(), object.class_label);
      it == attrs.end() || *it != object.class_label)
    attrs.insert(it, object.class_label);
  g.containment.push_back({object.room_id, object.id});
  g.objects.push_back(std::move(object));
}

inline void add_room_edge(SemanticGraph& g, RoomEdge edge) {
  if (edge.room_a == edge.room_b) throw ValidationError("room edge '" + edge.room_a + "' is a self-loop");
  if (!find_room(g, edge.room_a)) throw ValidationError("room edge references unknown room '" + edge.room_a + "'");
  if (!find_room(g, edge.room_b)) throw ValidationError("room edge references unknown room '" + edge.room_b + "'");
  if (!(edge.weight >= 0.0) || !std::isfinite(edge.weight))
    throw ValidationError("room edge weight must be finite and non-negative");
  for (const auto& e : g.room_edges)
    if ((e.room_a == edge.room_a && e.room_b == edge.room_b) || (e.room_a == edge.room_b && e.room_b == edge.room_a))
      throw ConflictError("duplicate room edge " + edge.room_a + " -- " + edge.room_b);
  g.room_edges.push_back(std::move(edge));
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string subject;  // node or edge
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::vector<Violation> validate_graph(const SemanticGraph& g) {
  std::vector<Violation> out;
  std::map<std::string, int> id_count;
  std::set<std::string> room_ids;
  std::set<std::string> object_ids;
  for (const auto& r : g.rooms) {
    ++id_count[r.id];
    room_ids.insert(r.id);
  }
  for (const auto& o : g.objects) {
    ++id_count[o.id];
    object_ids.insert(o.id);
  }
  for (const auto& [id, n] : id_count)
    if (n > 1) out.push_back({id, "duplicate node id"});
  for (const auto& [id, n] : id_count)
    if (id.empty()) out.push_back({"<empty>", "empty node id"});

  std::set<std::pair<std::string, std::string>> seen_edges;
  for (const auto& e : g.room_edges) {
    const std::string name = "edge " + e.room_a + " -- " + e.room_b;
    if (!room_ids.count(e.room_a) || !room_ids.count(e.room_b)) out.push_back({name, "dangling room edge endpoint"});
    if (e.room_a == e.room_b) out.push_back({name, "self-loop"});
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) out.push_back({name, "weight must be finite and non-negative"});
    auto key = std::minmax(e.room_a, e.room_b);
    if (!seen_edges.insert({key.first, key.second}).second) out.push_back({name, "duplicate room edge"});
  }

  std::map<std::string, int> containment_count;
  for (const auto& c : g.containment) {
    const std::string name = "containment " + c.room_id + " -> " + c.object_id;
    if (!room_ids.count(c.room_id)) out.push_back({name, "dangling containment room"});
    if (!object_ids.count(c.object_id)) out.push_back({name, "dangling containment object"});
    ++containment_count[c.object_id];
    if (const auto* o = find_object(g, c.object_id); o && o->room_id != c.room_id)
      out.push_back({name, "containment disagrees with object room_id"});
  }

  for (const auto& o : g.objects) {
    if (!room_ids.count(o.room_id)) out.push_back({o.id, "object references unknown room '" + o.room_id + "'"});
    if (containment_count[o.id] != 1)
      out.push_back({o.id, "object has " + std::to_string(containment_count[o.id]) + " containment edges (need 1)"});
    if (o.class_label.empty() || o.class_label != normalize_label(o.class_label))
      out.push_back({o.id, "class label not normalized"});
  }

  for (const auto& r : g.rooms) {
    if (r.attributes != derived_attributes(g, r.id)) out.push_back({r.id, "attributes out of date"});
    if (r.cell_count < 0) out.push_back({r.id, "negative cell count"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Goal matching
// ---------------------------------------------------------------------------

enum class GoalKind { NodeId, RoomCategory, ObjectClass };

inline const char* to_string(GoalKind k) {
  switch (k) {
    case GoalKind::NodeId: return "node-id";
    case GoalKind::RoomCategory: return "room-category";
    case GoalKind::ObjectClass: return "object-class";
  }
  return "?";
}

struct GoalQuery {
  std::string text;  // normalized
  GoalKind kind = GoalKind::ObjectClass;
};

struct GoalState {
  std::vector<std::string> nodes;
};

inline const std::vector<std::string>& default_room_categories() {
  static const std::vector<std::string> v = {"office",   "corridor", "conference_room", "kitchen",
                                             "bathroom", "storage",  "living_room",     "uncategorized"};
  return v;
}

inline std::string matching_node_id(const SemanticGraph& g, std::string_view normalized) {
  for (const auto& r : g.rooms)
    if (normalize_label(r.id) == normalized) return r.id;
  for (const auto& o : g.objects)
    if (normalize_label(o.id) == normalized) return o.id;
  return {};
}

// Node id first, then a room category (the vocabulary or any category in the
// graph), otherwise an object class.
inline GoalQuery make_goal_query(const SemanticGraph& g, std::string_view text,
                                 const std::vector<std::string>& vocabulary = default_room_categories()) {
  GoalQuery q{normalize_label(text), GoalKind::ObjectClass};
  if (!matching_node_id(g, q.text).empty()) {
    q.kind = GoalKind::NodeId;
    return q;
  }
  bool category = std::find(vocabulary.begin(), vocabulary.end(), q.text) != vocabulary.end();
  for (const auto& r : g.rooms) category = category || r.category == q.text;
  if (category) q.kind = GoalKind::RoomCategory;
  return q;
}

inline GoalState find_goal_state(const SemanticGraph& g, const GoalQuery& q) {
  GoalState s;
  const std::string text = normalize_label(q.text);
  switch (q.kind) {
    case GoalKind::NodeId:
      if (auto id = matching_node_id(g, text); !id.empty()) s.nodes.push_back(id);
      break;
    case GoalKind::RoomCategory:
      for (const auto& r : g.rooms)
        if (normalize_label(r.category) == text) s.nodes.push_back(r.id);
      break;
    case GoalKind::ObjectClass:
      for (const auto& o : g.objects)
        if (normalize_label(o.class_label) == text) s.nodes.push_back(o.id);
      break;
  }
  return s;
}

}  // namespace intellimove
