#pragma once

// Room segmentation (distance-transform watershed), room adjacency and
// rule-based place categorization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "intellimove/errors.hpp"
#include "intellimove/graph.hpp"
#include "intellimove/metric.hpp"

namespace intellimove {

struct RoomLabelRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> labels;  // 0 = not a room, k > 0 = room k

  std::uint16_t at(GridIndex i) const {
    return labels[static_cast<std::size_t>(i.row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i.col)];
  }
  std::uint16_t max_label() const {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
  }

  friend bool operator==(const RoomLabelRaster&, const RoomLabelRaster&) = default;
};

namespace detail {

inline constexpr int k4c[4] = {1, -1, 0, 0};
inline constexpr int k4r[4] = {0, 0, 1, -1};

// 1-D squared Euclidean distance transform of a sampled function
// (lower envelope of parabolas).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  auto intersect = [&](int q, int p) {
    return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * q - 2.0 * p);
  };
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace detail

// Euclidean distance (meters, center to center) from every cell to the
// nearest non-free cell. Cells outside the grid count as obstacles.
inline std::vector<double> obstacle_distance(const CostmapGrid& g) {
  const int w = g.width() + 2;
  const int h = g.height() + 2;
  // Larger than any squared in-grid distance, small enough to stay exact.
  const double big = 2.0 * (static_cast<double>(w) * w + static_cast<double>(h) * h) + 1.0;
  std::vector<double> sq(static_cast<std::size_t>(w) * h, 0.0);
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c)
      if (is_free(g.cells()[static_cast<std::size_t>(r) * g.width() + c]))
        sq[static_cast<std::size_t>(r + 1) * w + (c + 1)] = big;

  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  f.resize(w), d.resize(w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) f[c] = sq[static_cast<std::size_t>(r) * w + c];
    detail::edt_1d(f, d, v, z);
    for (int c = 0; c < w; ++c) sq[static_cast<std::size_t>(r) * w + c] = d[c];
  }
  f.resize(h), d.resize(h);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) f[r] = sq[static_cast<std::size_t>(r) * w + c];
    detail::edt_1d(f, d, v, z);
    for (int r = 0; r < h; ++r) sq[static_cast<std::size_t>(r) * w + c] = d[r];
  }

  std::vector<double> out(g.size());
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c)
      out[static_cast<std::size_t>(r) * g.width() + c] =
          std::sqrt(sq[static_cast<std::size_t>(r + 1) * w + (c + 1)]) * g.resolution();
  return out;
}

// 4-connected components of free cells; returns per-cell component id
// (-1 for non-free) and the id of the largest component (lowest id on ties).
inline std::pair<std::vector<int>, int> free_components(const CostmapGrid& g) {
  std::vector<int> comp(g.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (comp[s] >= 0 || !is_free(g.cells()[s])) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto k = stack.back();
      stack.pop_back();
      ++count;
      const auto u = g.unflat(k);
      for (int d = 0; d < 4; ++d) {
        const GridIndex v{u.col + detail::k4c[d], u.row + detail::k4r[d]};
        if (!g.in_bounds(v)) continue;
        const auto kv = g.flat(v);
        if (comp[kv] < 0 && is_free(g.cells()[kv])) {
          comp[kv] = id;
          stack.push_back(kv);
        }
      }
    }
    sizes.push_back(count);
  }
  int largest = -1;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (largest < 0 || sizes[i] > sizes[static_cast<std::size_t>(largest)]) largest = static_cast<int>(i);
  return {comp, largest};
}

struct SegmentationParams {
  double door_width_max = 1.2;   // meters
  double min_room_area = 4.0;    // square meters; converted to cells per grid
  std::int64_t min_room_cells(double resolution) const {
    return static_cast<std::int64_t>(std::llround(min_room_area / (resolution * resolution)));
  }
};

namespace detail {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  // Smaller id stays the representative so results do not depend on merge order.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;
    return true;
  }
};

// For each unordered pair of labels sharing a 4-neighbour boundary, the
// number of cells on each side touching the other label.
inline std::map<std::pair<int, int>, std::pair<std::int64_t, std::int64_t>> boundary_counts(
    const std::vector<int>& label, int width, int height) {
  std::map<std::pair<int, int>, std::pair<std::set<std::size_t>, std::set<std::size_t>>> sides;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * width + c;
      const int a = label[k];
      if (a < 0) continue;
      // right and up neighbours cover every 4-adjacent pair once
      for (int d : {0, 2}) {
        const int cc = c + k4c[d], rr = r + k4r[d];
        if (cc >= width || rr >= height) continue;
        const std::size_t kn = static_cast<std::size_t>(rr) * width + cc;
        const int b = label[kn];
        if (b < 0 || b == a) continue;
        auto& s = sides[std::minmax(a, b)];
        if (a < b) {
          s.first.insert(k);
          s.second.insert(kn);
        } else {
          s.first.insert(kn);
          s.second.insert(k);
        }
      }
    }
  }
  std::map<std::pair<int, int>, std::pair<std::int64_t, std::int64_t>> out;
  for (auto& [key, s] : sides)
    out[key] = {static_cast<std::int64_t>(s.first.size()), static_cast<std::int64_t>(s.second.size())};
  return out;
}

}  // namespace detail

// Watershed on the obstacle-distance transform:
//  1. distance from each free cell to the nearest non-free cell;
//  2. seeds at plateaus of local maxima deeper than door_width_max / 2;
//  3. seeds flood the largest free component in decreasing-distance order;
//  4. regions sharing a boundary wider than door_width_max are merged;
//  5. regions below min_room_cells are absorbed into their largest neighbour.
// Labels are renumbered 1..n in (row, col) order of each region's first cell.
// Free cells outside the largest 4-connected free component stay 0.
inline RoomLabelRaster segment_rooms(const CostmapGrid& g, std::int64_t min_room_cells, double door_width_max) {
  const auto [comp, largest] = free_components(g);
  if (largest < 0) throw ValidationError("costmap has no free cells");
  const int W = g.width();
  const int H = g.height();
  const std::size_t N = g.size();
  const auto dist = obstacle_distance(g);
  auto inside = [&](std::size_t k) { return comp[k] == largest; };

  // Seeds: 4-connected groups of cells that are >= every 8-neighbour.
  const double seed_min = door_width_max / 2.0;
  std::vector<char> candidate(N, 0);
  for (std::size_t k = 0; k < N; ++k) {
    if (!inside(k) || !(dist[k] > seed_min)) continue;
    const auto u = g.unflat(k);
    bool peak = true;
    for (int d = 0; d < 8 && peak; ++d) {
      const GridIndex v{u.col + detail::kDc[d], u.row + detail::kDr[d]};
      if (g.in_bounds(v) && dist[g.flat(v)] > dist[k]) peak = false;
    }
    candidate[k] = peak ? 1 : 0;
  }

  std::vector<int> label(N, -1);
  int n_regions = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < N; ++s) {
    if (!candidate[s] || label[s] >= 0) continue;
    label[s] = n_regions;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto k = stack.back();
      stack.pop_back();
      const auto u = g.unflat(k);
      for (int d = 0; d < 4; ++d) {
        const GridIndex v{u.col + detail::k4c[d], u.row + detail::k4r[d]};
        if (!g.in_bounds(v)) continue;
        const auto kv = g.flat(v);
        if (candidate[kv] && label[kv] < 0) {
          label[kv] = n_regions;
          stack.push_back(kv);
        }
      }
    }
    ++n_regions;
  }
  if (n_regions == 0) {
    // Nothing wide enough to seed: the deepest cell seeds one room.
    std::size_t best = N;
    for (std::size_t k = 0; k < N; ++k)
      if (inside(k) && (best == N || dist[k] > dist[best])) best = k;
    label[best] = n_regions++;
  }

  // Flooding, deepest first, ties in scan order.
  struct Item {
    double d;
    std::size_t k;
  };
  auto lower = [](const Item& a, const Item& b) { return a.d < b.d || (a.d == b.d && a.k > b.k); };
  std::priority_queue<Item, std::vector<Item>, decltype(lower)> open(lower);
  for (std::size_t k = 0; k < N; ++k)
    if (label[k] >= 0) open.push({dist[k], k});
  while (!open.empty()) {
    const auto it = open.top();
    open.pop();
    const auto u = g.unflat(it.k);
    for (int d = 0; d < 4; ++d) {
      const GridIndex v{u.col + detail::k4c[d], u.row + detail::k4r[d]};
      if (!g.in_bounds(v)) continue;
      const auto kv = g.flat(v);
      if (label[kv] >= 0 || !inside(kv)) continue;
      label[kv] = label[it.k];
      open.push({dist[kv], kv});
    }
  }

  // Merge across wide boundaries until stable.
  const double res = g.resolution();
  detail::DisjointSets sets(n_regions);
  auto relabel = [&] {
    for (auto& l : label)
      if (l >= 0) l = sets.find(l);
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [pair, counts] : detail::boundary_counts(label, W, H)) {
      const double width_m = static_cast<double>(std::max(counts.first, counts.second)) * res;
      if (width_m > door_width_max) changed = sets.unite(pair.first, pair.second) || changed;
    }
    relabel();
  }

  // Absorb small regions, smallest first.
  while (true) {
    std::map<int, std::int64_t> size;
    for (auto l : label)
      if (l >= 0) ++size[l];
    if (size.size() <= 1) break;
    int victim = -1;
    for (const auto& [l, s] : size)
      if (s < min_room_cells && (victim < 0 || s < size[victim])) victim = l;
    if (victim < 0) break;
    int into = -1;
    for (const auto& [pair, counts] : detail::boundary_counts(label, W, H)) {
      int other = -1;
      if (pair.first == victim) other = pair.second;
      if (pair.second == victim) other = pair.first;
      if (other < 0) continue;
      if (into < 0 || size[other] > size[into] || (size[other] == size[into] && other < into)) into = other;
    }
    if (into < 0) break;  // isolated; cannot happen inside one component
    sets.unite(victim, into);
    relabel();
  }

  RoomLabelRaster out{W, H, std::vector<std::uint16_t>(N, 0)};
  std::map<int, std::uint16_t> renumber;
  for (std::size_t k = 0; k < N; ++k) {
    if (label[k] < 0) continue;
    auto [it, fresh] = renumber.try_emplace(label[k], static_cast<std::uint16_t>(renumber.size() + 1));
    if (renumber.size() > 65535) throw ValidationError("too many rooms for a 16-bit label raster");
    out.labels[k] = it->second;
  }
  return out;
}

inline RoomLabelRaster segment_rooms(const CostmapGrid& g, const SegmentationParams& p = {}) {
  return segment_rooms(g, p.min_room_cells(g.resolution()), p.door_width_max);
}

// Invariant check for a raster against its costmap. Returns human-readable
// violations, empty when consistent.
inline std::vector<std::string> validate_raster(const RoomLabelRaster& raster, const CostmapGrid& g) {
  std::vector<std::string> out;
  if (raster.width != g.width() || raster.height != g.height() ||
      raster.labels.size() != static_cast<std::size_t>(raster.width) * static_cast<std::size_t>(raster.height)) {
    out.push_back("raster dimensions do not match costmap");
    return out;
  }
  std::map<std::uint16_t, std::size_t> first;
  std::map<std::uint16_t, std::size_t> count;
  for (std::size_t k = 0; k < raster.labels.size(); ++k) {
    const auto l = raster.labels[k];
    if (l == 0) continue;
    if (!is_free(g.cells()[k])) {
      out.push_back("labeled cell " + std::to_string(k) + " is not free");
      break;
    }
    first.try_emplace(l, k);
    ++count[l];
  }
  for (const auto& [l, start] : first) {
    std::vector<char> seen(raster.labels.size(), 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
      const auto k = stack.back();
      stack.pop_back();
      ++reached;
      const auto u = g.unflat(k);
      for (int d = 0; d < 4; ++d) {
        const GridIndex v{u.col + detail::k4c[d], u.row + detail::k4r[d]};
        if (!g.in_bounds(v)) continue;
        const auto kv = g.flat(v);
        if (!seen[kv] && raster.labels[kv] == l) {
          seen[kv] = 1;
          stack.push_back(kv);
        }
      }
    }
    if (reached != count[l]) out.push_back("room label " + std::to_string(l) + " is not 4-connected");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Room geometry and adjacency
// ---------------------------------------------------------------------------

// Cell of the region nearest to the region's mean cell position; always a
// member of the region. Ties broken in (row, col) order.
inline GridIndex room_centroid_cell(const RoomLabelRaster& raster, std::uint16_t l) {
  double sc = 0, sr = 0;
  std::int64_t n = 0;
  for (int r = 0; r < raster.height; ++r)
    for (int c = 0; c < raster.width; ++c)
      if (raster.labels[static_cast<std::size_t>(r) * raster.width + c] == l) {
        sc += c;
        sr += r;
        ++n;
      }
  if (n == 0) throw ValidationError("room label " + std::to_string(l) + " has no cells");
  const double mc = sc / static_cast<double>(n), mr = sr / static_cast<double>(n);
  GridIndex best{-1, -1};
  double best_d = std::numeric_limits<double>::infinity();
  for (int r = 0; r < raster.height; ++r)
    for (int c = 0; c < raster.width; ++c)
      if (raster.labels[static_cast<std::size_t>(r) * raster.width + c] == l) {
        const double d = (c - mc) * (c - mc) + (r - mr) * (r - mr);
        if (d < best_d) {
          best_d = d;
          best = {c, r};
        }
      }
  return best;
}

inline std::string default_room_name(std::uint16_t label) { return "room_" + std::to_string(label); }

// Rooms a and b are adjacent when a cell of a is 4-adjacent to a cell of b.
// The portal is the middle cell (scan order) of a's side of the boundary and
// the edge weight is the grid cost centroid(a) -> portal -> centroid(b).
// `names[k-1]` names label k; defaults to room_k.
inline std::vector<RoomEdge> extract_adjacency(const RoomLabelRaster& raster, const CostmapGrid& g,
                                               const std::vector<std::string>& names = {},
                                               const GridSearchOptions& opt = {}) {
  if (raster.width != g.width() || raster.height != g.height())
    throw ValidationError("raster dimensions do not match costmap");
  auto name = [&](std::uint16_t l) {
    return l - 1u < names.size() ? names[l - 1u] : default_room_name(l);
  };
  std::map<std::pair<int, int>, std::set<GridIndex>> side_a;
  for (int r = 0; r < raster.height; ++r) {
    for (int c = 0; c < raster.width; ++c) {
      const auto a = raster.at({c, r});
      if (a == 0) continue;
      for (int d = 0; d < 4; ++d) {
        const GridIndex v{c + detail::k4c[d], r + detail::k4r[d]};
        if (!g.in_bounds(v)) continue;
        const auto b = raster.at(v);
        if (b == 0 || b == a) continue;
        if (a < b) side_a[{a, b}].insert({c, r});
      }
    }
  }
  std::map<std::uint16_t, GridIndex> centroid;
  std::vector<RoomEdge> edges;
  for (const auto& [pair, cells] : side_a) {
    const auto a = static_cast<std::uint16_t>(pair.first);
    const auto b = static_cast<std::uint16_t>(pair.second);
    for (auto l : {a, b})
      if (!centroid.count(l)) centroid[l] = room_centroid_cell(raster, l);
    const GridIndex portal = *std::next(cells.begin(), static_cast<std::ptrdiff_t>(cells.size() / 2));
    const auto field = grid_cost_field(g, portal, opt);
    const auto& ca = field[g.flat(centroid[a])];
    const auto& cb = field[g.flat(centroid[b])];
    if (!ca || !cb)
      throw ConsistencyError("portal between " + name(a) + " and " + name(b) + " cannot reach both room centroids");
    edges.push_back({name(a), name(b), (*ca + *cb).meters(g.resolution()), portal});
  }
  return edges;
}

// ---------------------------------------------------------------------------
// Place categorization
// ---------------------------------------------------------------------------

struct CategoryRule {
  std::string category;
  std::vector<std::string> required;
  std::vector<std::pair<std::string, double>> score_weights;

  friend bool operator==(const CategoryRule&, const CategoryRule&) = default;
};

// One rule per line:  category: required=a,b; weights=a:2,b:1
inline std::vector<CategoryRule> parse_category_rules(const std::string& text, const std::string& source = "rules") {
  std::vector<CategoryRule> rules;
  std::set<std::string> categories;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) { return ConfigError(source + ":" + std::to_string(lineno) + ": " + why); };
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string_view::npos) throw fail("expected 'category: ...'");
    CategoryRule rule;
    rule.category = normalize_label(t.substr(0, colon));
    if (rule.category.empty()) throw fail("empty category");
    if (!categories.insert(rule.category).second) throw fail("duplicate category '" + rule.category + "'");
    bool have_required = false, have_weights = false;
    for (const auto& part : detail::split(t.substr(colon + 1), ';')) {
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw fail("expected key=value in '" + part + "'");
      const auto key = std::string(detail::trim(std::string_view(part).substr(0, eq)));
      const auto value = std::string_view(part).substr(eq + 1);
      if (key == "required") {
        if (have_required) throw fail("duplicate 'required'");
        have_required = true;
        for (const auto& cls : detail::split(value, ',')) {
          if (cls.empty()) continue;
          auto n = normalize_label(cls);
          if (std::find(rule.required.begin(), rule.required.end(), n) != rule.required.end())
            throw fail("duplicate class '" + n + "' in required");
          rule.required.push_back(n);
        }
      } else if (key == "weights") {
        if (have_weights) throw fail("duplicate 'weights'");
        have_weights = true;
        for (const auto& item : detail::split(value, ',')) {
          if (item.empty()) continue;
          const auto c = item.find(':');
          if (c == std::string::npos) throw fail("expected class:weight in '" + item + "'");
          auto cls = normalize_label(std::string_view(item).substr(0, c));
          const double w = detail::parse_double(std::string_view(item).substr(c + 1), "weight");
          if (!(w > 0.0)) throw fail("weight for '" + cls + "' must be positive");
          for (const auto& [existing, _] : rule.score_weights)
            if (existing == cls) throw fail("duplicate class '" + cls + "' in weights");
          rule.score_weights.emplace_back(cls, w);
        }
      } else {
        throw fail("unknown rule key '" + key + "'");
      }
    }
    if (rule.required.empty() && rule.score_weights.empty()) throw fail("rule has neither required nor weights");
    rules.push_back(std::move(rule));
  }
  return rules;
}

inline const std::string& default_category_rules_text() {
  static const std::string text =
      "# category: required=<classes>; weights=<class:weight,...>\n"
      "office: weights=desk:2,chair:1,bookcase:1,computer:1,monitor:1\n"
      "conference_room: required=conference_table; weights=conference_table:3,projector:1,whiteboard:1,chair:0.5\n"
      "kitchen: required=fridge; weights=fridge:2,sink:1,microwave:1,coffee_machine:1,dining_table:1\n"
      "bathroom: required=toilet; weights=toilet:2,sink:1,mirror:1\n"
      "storage: required=shelf; weights=shelf:1,box:1\n"
      "corridor: required=fire_extinguisher; weights=fire_extinguisher:1,plant:0.5,bench:0.5\n";
  return text;
}

inline const std::vector<CategoryRule>& default_category_rules() {
  static const auto rules = parse_category_rules(default_category_rules_text(), "default rules");
  return rules;
}

// Highest weight sum among rules whose required classes are all present.
// Ties go to the earlier rule; no satisfied rule gives "uncategorized".
// A rule without required classes is satisfied only if it scores above 0.
template <typename Range>
std::string categorize_room(const Range& attributes, const std::vector<CategoryRule>& rules) {
  std::set<std::string> attrs;
  for (const auto& a : attributes) attrs.insert(normalize_label(a));
  const CategoryRule* best = nullptr;
  double best_score = -1.0;
  for (const auto& rule : rules) {
    bool ok = std::all_of(rule.required.begin(), rule.required.end(), [&](const auto& c) { return attrs.count(c) > 0; });
    if (!ok) continue;
    double score = 0.0;
    for (const auto& [cls, w] : rule.score_weights)
      if (attrs.count(cls)) score += w;
    if (rule.required.empty() && !(score > 0.0)) continue;
    if (score > best_score) {
      best_score = score;
      best = &rule;
    }
  }
  return best ? best->category : "uncategorized";
}

inline std::string categorize_room(std::initializer_list<std::string> attributes, const std::vector<CategoryRule>& rules) {
  return categorize_room(std::vector<std::string>(attributes), rules);
}

}  // namespace intellimove
