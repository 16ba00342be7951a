#pragma once

// Synthetic office generator. Rooms hang off a straight corridor (spine
// layout) or form a chain of rooms joined by doors (suite layout). Returns
// the costmap together with the ground truth it was drawn from.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "intellimove/errors.hpp"
#include "intellimove/graph.hpp"
#include "intellimove/metric.hpp"
#include "intellimove/segmentation.hpp"

namespace intellimove {

struct VocabularyEntry {
  std::string object_class;
  std::string category;

  friend bool operator==(const VocabularyEntry&, const VocabularyEntry&) = default;
};

// The first class listed for a category is its anchor and is always placed
// in rooms of that category (the default category rules require it).
inline const std::vector<VocabularyEntry>& default_vocabulary() {
  static const std::vector<VocabularyEntry> v = {
      {"desk", "office"},
      {"chair", "office"},
      {"bookcase", "office"},
      {"computer", "office"},
      {"monitor", "office"},
      {"conference_table", "conference_room"},
      {"projector", "conference_room"},
      {"whiteboard", "conference_room"},
      {"fridge", "kitchen"},
      {"sink", "kitchen"},
      {"microwave", "kitchen"},
      {"dining_table", "kitchen"},
      {"fire_extinguisher", "corridor"},
      {"plant", "corridor"},
      {"bench", "corridor"},
  };
  return v;
}

struct EnvSpec {
  std::uint64_t seed = 1;
  int n_rooms = 4;
  double room_size_min = 3.0;  // meters, both room extents
  double room_size_max = 5.0;
  double corridor_width = 2.0;
  double door_width = 0.8;
  double wall_thickness = 0.15;
  int objects_min = 3;  // per room, corridor included
  int objects_max = 6;
  double resolution = 0.05;
  std::string layout = "spine";  // spine | suite
  std::vector<VocabularyEntry> vocabulary = default_vocabulary();

  friend bool operator==(const EnvSpec&, const EnvSpec&) = default;
};

inline void validate_env_spec(const EnvSpec& s) {
  if (s.n_rooms < 1) throw ValidationError("n_rooms must be >= 1");
  if (!(s.resolution > 0.0)) throw ValidationError("resolution must be positive");
  if (!(s.room_size_min > 0.0) || s.room_size_max < s.room_size_min)
    throw ValidationError("room size range must be non-empty and positive");
  if (s.objects_min < 0 || s.objects_max < s.objects_min)
    throw ValidationError("objects per room range must be non-empty and non-negative");
  if (!(s.door_width > 0.0) || !(s.wall_thickness > 0.0)) throw ValidationError("door and wall sizes must be positive");
  if (s.layout != "spine" && s.layout != "suite") throw ValidationError("layout must be spine or suite");
  if (s.layout == "spine" && !(s.corridor_width > SegmentationParams{}.door_width_max))
    throw ValidationError("corridor_width must exceed the segmentation door width");
  if (s.vocabulary.empty()) throw ValidationError("vocabulary must not be empty");
}

// key: value spec file; unknown keys rejected. `vocabulary` is a comma list
// of class=category pairs.
inline EnvSpec parse_env_spec(const std::string& text, const std::string& source = "spec") {
  auto kv = detail::parse_key_values(text,
                                     {"seed", "n_rooms", "room_size_min", "room_size_max", "corridor_width",
                                      "door_width", "wall_thickness", "objects_min", "objects_max", "resolution",
                                      "layout", "vocabulary"},
                                     source);
  EnvSpec s;
  if (kv.count("seed")) s.seed = static_cast<std::uint64_t>(detail::parse_int(kv["seed"], "seed"));
  if (kv.count("n_rooms")) s.n_rooms = static_cast<int>(detail::parse_int(kv["n_rooms"], "n_rooms"));
  if (kv.count("room_size_min")) s.room_size_min = detail::parse_double(kv["room_size_min"], "room_size_min");
  if (kv.count("room_size_max")) s.room_size_max = detail::parse_double(kv["room_size_max"], "room_size_max");
  if (kv.count("corridor_width")) s.corridor_width = detail::parse_double(kv["corridor_width"], "corridor_width");
  if (kv.count("door_width")) s.door_width = detail::parse_double(kv["door_width"], "door_width");
  if (kv.count("wall_thickness")) s.wall_thickness = detail::parse_double(kv["wall_thickness"], "wall_thickness");
  if (kv.count("objects_min")) s.objects_min = static_cast<int>(detail::parse_int(kv["objects_min"], "objects_min"));
  if (kv.count("objects_max")) s.objects_max = static_cast<int>(detail::parse_int(kv["objects_max"], "objects_max"));
  if (kv.count("resolution")) s.resolution = detail::parse_double(kv["resolution"], "resolution");
  if (kv.count("layout")) s.layout = kv["layout"];
  if (kv.count("vocabulary")) {
    s.vocabulary.clear();
    for (const auto& item : detail::split(kv["vocabulary"], ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError(source + ": vocabulary items must be class=category");
      s.vocabulary.push_back({normalize_label(item.substr(0, eq)), normalize_label(item.substr(eq + 1))});
    }
  }
  validate_env_spec(s);
  return s;
}

struct CellRect {
  int c0 = 0, r0 = 0, c1 = 0, r1 = 0;  // half-open [c0, c1) x [r0, r1)

  bool contains(GridIndex i) const noexcept { return i.col >= c0 && i.col < c1 && i.row >= r0 && i.row < r1; }
  std::int64_t area() const noexcept { return static_cast<std::int64_t>(c1 - c0) * (r1 - r0); }
  GridIndex center() const noexcept { return {(c0 + c1) / 2, (r0 + r1) / 2}; }

  friend bool operator==(const CellRect&, const CellRect&) = default;
};

struct GroundTruthRoom {
  std::string id;
  std::string category;
  CellRect interior;

  friend bool operator==(const GroundTruthRoom&, const GroundTruthRoom&) = default;
};

struct GroundTruthDoor {
  std::string room_a;
  std::string room_b;
  CellRect opening;

  friend bool operator==(const GroundTruthDoor&, const GroundTruthDoor&) = default;
};

struct GroundTruth {
  std::vector<GroundTruthRoom> rooms;
  std::vector<GroundTruthDoor> doors;
  std::vector<ObjectNode> objects;
  std::int64_t wall_cells = 0;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct GeneratedEnvironment {
  CostmapGrid costmap;
  GroundTruth truth;
  SemanticGraph graph;
};

namespace detail {

// Bounded integers straight from the engine output so sequences do not
// depend on the standard library's distribution implementations.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  int uniform(int lo, int hi) {  // inclusive
    if (hi <= lo) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

 private:
  std::mt19937_64 engine_;
};

inline int cells_for(double meters, double res) { return std::max(1, static_cast<int>(std::lround(meters / res))); }

}  // namespace detail

inline GeneratedEnvironment generate(const EnvSpec& spec) {
  validate_env_spec(spec);
  detail::SplitRng rng(spec.seed);
  const double res = spec.resolution;
  const int wt = detail::cells_for(spec.wall_thickness, res);
  const int door = detail::cells_for(spec.door_width, res);
  const int smin = detail::cells_for(spec.room_size_min, res);
  const int smax = detail::cells_for(spec.room_size_max, res);
  const int margin = detail::cells_for(0.3, res);  // door distance from corners
  if (smin < door + 2 * margin)
    throw GenerationError("rooms of " + detail::fixed(spec.room_size_min) + " m cannot fit a door of " +
                          detail::fixed(spec.door_width) + " m");

  // Categories available for rooms, with their vocabulary in order.
  std::vector<std::string> categories;
  std::map<std::string, std::vector<std::string>> classes_of;
  for (const auto& v : spec.vocabulary) {
    if (!classes_of.count(v.category) && v.category != "corridor") categories.push_back(v.category);
    classes_of[v.category].push_back(v.object_class);
  }
  if (categories.empty()) throw GenerationError("vocabulary has no room categories besides corridor");

  struct Room {
    std::string category;
    CellRect rect;
  };
  std::vector<Room> rooms(static_cast<std::size_t>(spec.n_rooms));
  for (auto& r : rooms) r.category = categories[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(categories.size()) - 1))];

  const bool has_corridor = spec.layout == "spine" && spec.n_rooms > 1;
  CellRect corridor{};
  std::vector<std::pair<std::size_t, CellRect>> doors;  // room index -> opening (suite: to next room)
  int W = 0, H = 0;

  if (!has_corridor) {
    // Single row of rooms; consecutive rooms share a wall with a door.
    std::vector<int> widths, depths;
    for (int i = 0; i < spec.n_rooms; ++i) {
      widths.push_back(rng.uniform(smin, smax));
      depths.push_back(rng.uniform(smin, smax));
    }
    int x = wt;
    int max_depth = 0;
    for (int i = 0; i < spec.n_rooms; ++i) {
      rooms[static_cast<std::size_t>(i)].rect = {x, wt, x + widths[static_cast<std::size_t>(i)],
                                                  wt + depths[static_cast<std::size_t>(i)]};
      x += widths[static_cast<std::size_t>(i)] + wt;
      max_depth = std::max(max_depth, depths[static_cast<std::size_t>(i)]);
    }
    W = x;
    H = wt + max_depth + wt;
    for (int i = 0; i + 1 < spec.n_rooms; ++i) {
      const auto& a = rooms[static_cast<std::size_t>(i)].rect;
      const auto& b = rooms[static_cast<std::size_t>(i) + 1].rect;
      const int shared = std::min(a.r1, b.r1) - wt;
      const int off = rng.uniform(margin, shared - door - margin);
      doors.push_back({static_cast<std::size_t>(i), CellRect{a.c1, wt + off, b.c0, wt + off + door}});
    }
  } else {
    const int cw = detail::cells_for(spec.corridor_width, res);
    const int n_top = (spec.n_rooms + 1) / 2;
    std::vector<int> widths, depths;
    for (int i = 0; i < spec.n_rooms; ++i) {
      widths.push_back(rng.uniform(smin, smax));
      depths.push_back(rng.uniform(smin, smax));
    }
    int depth_bottom = 0, depth_top = 0;
    for (int i = 0; i < spec.n_rooms; ++i) {
      int& depth = i < n_top ? depth_top : depth_bottom;
      depth = std::max(depth, depths[static_cast<std::size_t>(i)]);
    }
    const int corridor_r0 = depth_bottom > 0 ? wt + depth_bottom + wt : wt;
    const int corridor_r1 = corridor_r0 + cw;
    int x_top = wt, x_bottom = wt;
    for (int i = 0; i < spec.n_rooms; ++i) {
      const int w = widths[static_cast<std::size_t>(i)], d = depths[static_cast<std::size_t>(i)];
      auto& rect = rooms[static_cast<std::size_t>(i)].rect;
      const int off = rng.uniform(margin, w - door - margin);
      if (i < n_top) {
        rect = {x_top, corridor_r1 + wt, x_top + w, corridor_r1 + wt + d};
        doors.push_back({static_cast<std::size_t>(i), CellRect{x_top + off, corridor_r1, x_top + off + door, corridor_r1 + wt}});
        x_top += w + wt;
      } else {
        rect = {x_bottom, corridor_r0 - wt - d, x_bottom + w, corridor_r0 - wt};
        doors.push_back({static_cast<std::size_t>(i), CellRect{x_bottom + off, corridor_r0 - wt, x_bottom + off + door, corridor_r0}});
        x_bottom += w + wt;
      }
    }
    W = std::max(x_top, x_bottom);
    H = corridor_r1 + wt + depth_top + wt;
    corridor = {wt, corridor_r0, W - wt, corridor_r1};
  }

  // Raster: everything lethal, then carve interiors and door openings.
  std::vector<Cost> cells(static_cast<std::size_t>(W) * static_cast<std::size_t>(H), cost::kLethal);
  auto carve = [&](const CellRect& r) {
    for (int row = r.r0; row < r.r1; ++row)
      for (int col = r.c0; col < r.c1; ++col) cells[static_cast<std::size_t>(row) * W + col] = cost::kFree;
  };
  for (const auto& r : rooms) carve(r.rect);
  if (has_corridor) carve(corridor);
  for (const auto& [_, d] : doors) carve(d);

  GeneratedEnvironment env;
  env.costmap = CostmapGrid(W, H, res, 0.0, 0.0, std::move(cells));
  env.truth.wall_cells = std::count(env.costmap.cells().begin(), env.costmap.cells().end(), cost::kLethal);

  // Names: category_k in generation order; the corridor comes last.
  std::map<std::string, int> ordinal;
  std::vector<GroundTruthRoom> gt_rooms;
  for (const auto& r : rooms) gt_rooms.push_back({r.category + "_" + std::to_string(++ordinal[r.category]), r.category, r.rect});
  if (has_corridor) gt_rooms.push_back({"corridor_" + std::to_string(++ordinal["corridor"]), "corridor", corridor});
  env.truth.rooms = gt_rooms;
  for (const auto& [i, d] : doors) {
    const std::string other = has_corridor ? gt_rooms.back().id : gt_rooms[i + 1].id;
    env.truth.doors.push_back({gt_rooms[i].id, other, d});
  }

  // Objects: anchor class first, then random classes of the room category,
  // on distinct cells at least `margin` away from the walls.
  std::set<std::size_t> used;
  std::map<std::string, int> class_count;
  for (const auto& room : gt_rooms) {
    const auto& vocab = classes_of[room.category];
    if (vocab.empty()) continue;
    const int n_obj = rng.uniform(spec.objects_min, spec.objects_max);
    const CellRect& r = room.interior;
    if (n_obj == 0) continue;
    if (r.c1 - r.c0 <= 2 * margin || r.r1 - r.r0 <= 2 * margin) throw GenerationError("room too small for objects");
    for (int k = 0; k < n_obj; ++k) {
      const std::string& cls =
          k == 0 ? vocab.front() : vocab[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(vocab.size()) - 1))];
      GridIndex cell;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 1000) throw GenerationError("no free cell left for objects in " + room.id);
        cell = {rng.uniform(r.c0 + margin, r.c1 - 1 - margin), rng.uniform(r.r0 + margin, r.r1 - 1 - margin)};
        if (used.insert(env.costmap.flat(cell)).second) break;
      }
      env.truth.objects.push_back(
          {cls + "_" + std::to_string(++class_count[cls]), cls, grid_to_world(env.costmap, cell), room.id});
    }
  }

  // Ground-truth graph: rooms at rectangle centers, door-center portals,
  // edge weight = centroid -> door -> centroid straight-line length.
  for (const auto& room : gt_rooms)
    add_room(env.graph, {room.id, room.category, grid_to_world(env.costmap, room.interior.center()), room.interior.area(), {}});
  for (const auto& o : env.truth.objects) add_object(env.graph, o);
  for (const auto& d : env.truth.doors) {
    const auto portal = d.opening.center();
    const auto pw = grid_to_world(env.costmap, portal);
    const double w = distance(find_room(env.graph, d.room_a)->centroid, pw) + distance(pw, find_room(env.graph, d.room_b)->centroid);
    add_room_edge(env.graph, {d.room_a, d.room_b, w, portal});
  }
  return env;
}

}  // namespace intellimove
