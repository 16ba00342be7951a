#pragma once

// Goal discovery: rank rooms by how likely they hold a goal that is absent
// from the map. Oracles are pluggable; the co-occurrence mock is pure.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "intellimove/errors.hpp"
#include "intellimove/graph.hpp"

namespace intellimove {

struct RoomContext {
  std::string room_id;
  std::string category;
  std::vector<std::string> attributes;

  friend bool operator==(const RoomContext&, const RoomContext&) = default;
};

struct RankedRoom {
  std::string room_id;
  double confidence = 0.0;

  friend bool operator==(const RankedRoom&, const RankedRoom&) = default;
};

struct DiscoveryResponse {
  std::vector<RankedRoom> ranked_rooms;  // confidence non-increasing
  std::string rationale;

  friend bool operator==(const DiscoveryResponse&, const DiscoveryResponse&) = default;
};

inline std::vector<RoomContext> room_contexts(const SemanticGraph& g) {
  std::vector<RoomContext> out;
  out.reserve(g.rooms.size());
  for (const auto& r : g.rooms) out.push_back({r.id, r.category, r.attributes});
  return out;
}

// Warnings from the discovery path (dropped rooms, raw payloads of malformed
// responses). Replaceable for tests and for quiet CLI runs.
inline std::function<void(const std::string&)>& discovery_log() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::clog << "[discovery] " << msg << "\n";
  };
  return sink;
}

class GoalOracle {
 public:
  virtual ~GoalOracle() = default;
  virtual DiscoveryResponse query(const std::vector<RoomContext>& contexts, const GoalQuery& goal) const = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Co-occurrence table and the deterministic mock oracle
// ---------------------------------------------------------------------------

class CooccurrenceTable {
 public:
  CooccurrenceTable() = default;

  void set(const std::string& object_class, const std::string& context, double score) {
    if (!(score >= 0.0) || !std::isfinite(score))
      throw ConfigError("co-occurrence score must be finite and non-negative");
    entries_[{normalize_label(object_class), normalize_label(context)}] = score;
  }

  // `context` is either a room category or another object class.
  double affinity(const std::string& object_class, const std::string& context) const {
    auto it = entries_.find({object_class, context});
    return it == entries_.end() ? 0.0 : it->second;
  }

  const std::map<std::pair<std::string, std::string>, double>& entries() const noexcept { return entries_; }

 private:
  std::map<std::pair<std::string, std::string>, double> entries_;
};

// Lines of "object_class, room_category, score"; '#' comments allowed.
inline CooccurrenceTable parse_cooccurrence_table(const std::string& text, const std::string& source = "table") {
  CooccurrenceTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto parts = detail::split(s, ',');
    const std::string where = source + ":" + std::to_string(lineno);
    if (parts.size() != 3) throw ConfigError(where + ": expected 'object_class, room_category, score'");
    if (parts[0].empty() || parts[1].empty()) throw ConfigError(where + ": empty label");
    const double score = detail::parse_double(parts[2], "score");
    if (!(score >= 0.0)) throw ConfigError(where + ": score must be non-negative");
    const auto key = std::make_pair(normalize_label(parts[0]), normalize_label(parts[1]));
    if (t.entries().count(key)) throw ConfigError(where + ": duplicate entry");
    t.set(key.first, key.second, score);
  }
  return t;
}

inline const std::string& default_cooccurrence_text() {
  static const std::string text =
      "# object_class, room_category_or_object, score\n"
      "coffee_machine, kitchen, 1.0\n"
      "coffee_machine, sink, 0.8\n"
      "coffee_machine, fridge, 0.8\n"
      "coffee_machine, office, 0.1\n"
      "coffee_machine, conference_room, 0.05\n"
      "printer, office, 0.8\n"
      "printer, corridor, 0.4\n"
      "printer, desk, 0.3\n"
      "stapler, office, 0.9\n"
      "stapler, desk, 0.5\n"
      "laptop, office, 0.8\n"
      "laptop, conference_room, 0.6\n"
      "projector, conference_room, 1.0\n"
      "whiteboard, conference_room, 0.9\n"
      "whiteboard, office, 0.3\n"
      "microwave, kitchen, 1.0\n"
      "sink, kitchen, 0.8\n"
      "sink, bathroom, 0.9\n"
      "towel, bathroom, 1.0\n"
      "toilet_paper, bathroom, 1.0\n"
      "cup, kitchen, 0.9\n"
      "cup, office, 0.3\n"
      "umbrella, corridor, 0.6\n"
      "plant, corridor, 0.5\n"
      "plant, office, 0.3\n"
      "box, storage, 1.0\n"
      "ladder, storage, 0.8\n";
  return text;
}

// score(room) = affinity(goal, category) + 0.1 * sum over room objects of
// affinity(goal, object); confidences are scores over the max score, uniform
// 1/n when every score is zero. Sorted by score, then room id.
inline DiscoveryResponse mock_rank(const CooccurrenceTable& table, const std::vector<RoomContext>& contexts,
                                   const GoalQuery& goal) {
  const std::string g = normalize_label(goal.text);
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(contexts.size());
  double max_score = 0.0;
  for (const auto& c : contexts) {
    double s = table.affinity(g, normalize_label(c.category));
    double co = 0.0;
    for (const auto& a : c.attributes) co += table.affinity(g, normalize_label(a));
    s += co * 0.1;
    scored.emplace_back(c.room_id, s);
    max_score = std::max(max_score, s);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  DiscoveryResponse r;
  for (const auto& [id, s] : scored)
    r.ranked_rooms.push_back({id, max_score > 0.0 ? s / max_score : 1.0 / static_cast<double>(contexts.size())});
  r.rationale = max_score > 0.0 ? "co-occurrence table" : "co-occurrence table has no evidence; uniform ranking";
  return r;
}

class MockOracle final : public GoalOracle {
 public:
  explicit MockOracle(CooccurrenceTable table) : table_(std::move(table)) {}

  DiscoveryResponse query(const std::vector<RoomContext>& contexts, const GoalQuery& goal) const override {
    return mock_rank(table_, contexts, goal);
  }
  std::string name() const override { return "mock"; }

 private:
  CooccurrenceTable table_;
};

// ---------------------------------------------------------------------------
// Oracle wire format
// ---------------------------------------------------------------------------

inline nlohmann::json discovery_request_json(const std::vector<RoomContext>& contexts, const GoalQuery& goal) {
  nlohmann::json rooms = nlohmann::json::array();
  for (const auto& c : contexts) rooms.push_back({{"id", c.room_id}, {"category", c.category}, {"objects", c.attributes}});
  return {{"goal", goal.text}, {"rooms", rooms}};
}

// Strict parse of {ranking:[{id, confidence}], rationale}.
inline DiscoveryResponse parse_discovery_response(const std::string& body) {
  auto fail = [&](const std::string& why) {
    discovery_log()("malformed oracle response (" + why + "): " + body);
    return ParseError("malformed oracle response: " + why, body);
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  if (!j.is_object() || !j.contains("ranking") || !j["ranking"].is_array()) throw fail("missing 'ranking' array");
  DiscoveryResponse r;
  for (const auto& item : j["ranking"]) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string() || !item.contains("confidence") ||
        !item["confidence"].is_number())
      throw fail("ranking entries need string 'id' and numeric 'confidence'");
    const double c = item["confidence"].get<double>();
    if (!(c >= 0.0 && c <= 1.0)) throw fail("confidence outside [0, 1]");
    r.ranked_rooms.push_back({item["id"].get<std::string>(), c});
  }
  if (j.contains("rationale")) {
    if (!j["rationale"].is_string()) throw fail("'rationale' must be a string");
    r.rationale = j["rationale"].get<std::string>();
  }
  return r;
}

inline std::string discovery_response_json(const DiscoveryResponse& r) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& rr : r.ranked_rooms) ranking.push_back({{"id", rr.room_id}, {"confidence", rr.confidence}});
  return nlohmann::json{{"ranking", ranking}, {"rationale", r.rationale}}.dump();
}

// ---------------------------------------------------------------------------
// Entry point used by the planner
// ---------------------------------------------------------------------------

// Asks the oracle, drops rooms not in `contexts` (with a warning) and orders
// the rest by confidence (stable, so the oracle's order breaks ties).
inline DiscoveryResponse goal_llm_response(const std::vector<RoomContext>& contexts, const GoalQuery& goal,
                                           const GoalOracle* oracle) {
  if (contexts.empty()) throw ValidationError("goal discovery needs at least one room");
  if (oracle == nullptr) throw DiscoveryFailedError("no discovery oracle configured for goal '" + goal.text + "'");
  DiscoveryResponse raw = oracle->query(contexts, goal);
  std::set<std::string> known;
  for (const auto& c : contexts) known.insert(c.room_id);
  DiscoveryResponse out;
  out.rationale = raw.rationale;
  std::set<std::string> seen;
  for (auto& rr : raw.ranked_rooms) {
    if (!known.count(rr.room_id)) {
      discovery_log()("oracle '" + oracle->name() + "' returned unknown room '" + rr.room_id + "'; dropped");
      continue;
    }
    if (!seen.insert(rr.room_id).second) continue;
    out.ranked_rooms.push_back(std::move(rr));
  }
  std::stable_sort(out.ranked_rooms.begin(), out.ranked_rooms.end(),
                   [](const RankedRoom& a, const RankedRoom& b) { return a.confidence > b.confidence; });
  if (out.ranked_rooms.empty())
    throw DiscoveryFailedError("oracle '" + oracle->name() + "' proposed no known room for goal '" + goal.text + "'");
  return out;
}

}  // namespace intellimove
