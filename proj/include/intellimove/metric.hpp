#pragma once

// Metric layer: the costmap grid, its on-disk form, and the 8-connected
// grid search shared by edge weighting and path refinement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "intellimove/detail/pgm.hpp"
#include "intellimove/detail/text.hpp"
#include "intellimove/errors.hpp"

namespace intellimove {

using Cost = std::uint8_t;

namespace cost {
inline constexpr Cost kFree = 0;
inline constexpr Cost kMaxGraded = 252;
inline constexpr Cost kInscribed = 253;
inline constexpr Cost kLethal = 254;
inline constexpr Cost kUnknown = 255;
}  // namespace cost

struct GridIndex {
  int col = 0;
  int row = 0;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
  friend auto operator<=>(const GridIndex& a, const GridIndex& b) {
    // (row, col) scan order
    if (auto c = a.row <=> b.row; c != 0) return c;
    return a.col <=> b.col;
  }
};

struct MetricPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const MetricPoint&, const MetricPoint&) = default;
};

inline double distance(const MetricPoint& a, const MetricPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

class CostmapGrid {
 public:
  CostmapGrid() = default;

  CostmapGrid(int width, int height, double resolution, double origin_x, double origin_y,
              std::vector<Cost> cells)
      : width_(width),
        height_(height),
        resolution_(resolution),
        origin_x_(origin_x),
        origin_y_(origin_y),
        cells_(std::move(cells)) {
    if (width_ <= 0 || height_ <= 0) throw ValidationError("costmap dimensions must be positive");
    if (!(resolution_ > 0.0) || !std::isfinite(resolution_))
      throw ValidationError("costmap resolution must be positive");
    if (!std::isfinite(origin_x_) || !std::isfinite(origin_y_))
      throw ValidationError("costmap origin must be finite");
    if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
      throw ValidationError("costmap cell count does not match width*height");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double resolution() const noexcept { return resolution_; }
  double origin_x() const noexcept { return origin_x_; }
  double origin_y() const noexcept { return origin_y_; }
  const std::vector<Cost>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }

  bool in_bounds(GridIndex i) const noexcept {
    return i.col >= 0 && i.row >= 0 && i.col < width_ && i.row < height_;
  }
  std::size_t flat(GridIndex i) const noexcept {
    return static_cast<std::size_t>(i.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(i.col);
  }
  GridIndex unflat(std::size_t k) const noexcept {
    return {static_cast<int>(k % static_cast<std::size_t>(width_)),
            static_cast<int>(k / static_cast<std::size_t>(width_))};
  }
  Cost at(GridIndex i) const {
    if (!in_bounds(i)) throw BoundsError("grid index out of bounds");
    return cells_[flat(i)];
  }

  friend bool operator==(const CostmapGrid&, const CostmapGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.0;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  std::vector<Cost> cells_;
};

inline bool is_free(Cost c) noexcept { return c < cost::kInscribed; }

inline GridIndex world_to_grid(const CostmapGrid& g, const MetricPoint& p) {
  const double fc = std::floor((p.x - g.origin_x()) / g.resolution());
  const double fr = std::floor((p.y - g.origin_y()) / g.resolution());
  if (!std::isfinite(fc) || !std::isfinite(fr) || fc < 0 || fr < 0 || fc >= g.width() ||
      fr >= g.height())
    throw BoundsError("point (" + detail::fixed(p.x) + ", " + detail::fixed(p.y) +
                      ") lies outside the costmap");
  return {static_cast<int>(fc), static_cast<int>(fr)};
}

inline MetricPoint grid_to_world(const CostmapGrid& g, GridIndex i) {
  if (!g.in_bounds(i)) throw BoundsError("grid index out of bounds");
  return {g.origin_x() + (i.col + 0.5) * g.resolution(), g.origin_y() + (i.row + 0.5) * g.resolution()};
}

// ---------------------------------------------------------------------------
// Costmap files
// ---------------------------------------------------------------------------

struct CostmapMeta {
  double resolution = 0.05;
  double origin_x = 0.0;
  double origin_y = 0.0;
  int free_thresh = 250;
  int lethal_thresh = 50;
  // "threshold": pixels mapped through free/lethal thresholds.
  // "raw": pixel value is the cost itself.
  std::string mode = "threshold";
};

inline CostmapMeta parse_costmap_meta(const std::string& text, const std::string& source = "metadata") {
  auto kv = detail::parse_key_values(
      text, {"resolution", "origin_x", "origin_y", "free_thresh", "lethal_thresh", "mode"}, source);
  for (const char* required : {"resolution", "origin_x", "origin_y"})
    if (!kv.count(required)) throw ConfigError(source + ": missing key '" + required + "'");
  CostmapMeta m;
  m.resolution = detail::parse_double(kv["resolution"], "resolution");
  m.origin_x = detail::parse_double(kv["origin_x"], "origin_x");
  m.origin_y = detail::parse_double(kv["origin_y"], "origin_y");
  if (kv.count("free_thresh")) m.free_thresh = static_cast<int>(detail::parse_int(kv["free_thresh"], "free_thresh"));
  if (kv.count("lethal_thresh"))
    m.lethal_thresh = static_cast<int>(detail::parse_int(kv["lethal_thresh"], "lethal_thresh"));
  if (kv.count("mode")) m.mode = kv["mode"];
  if (!(m.resolution > 0.0)) throw ValidationError(source + ": resolution must be positive");
  if (m.mode != "threshold" && m.mode != "raw") throw ConfigError(source + ": mode must be threshold or raw");
  if (m.lethal_thresh < 0 || m.free_thresh > 255 || m.lethal_thresh >= m.free_thresh)
    throw ConfigError(source + ": thresholds must satisfy 0 <= lethal_thresh < free_thresh <= 255");
  return m;
}

inline std::string format_costmap_meta(const CostmapMeta& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "resolution: %.17g\norigin_x: %.17g\norigin_y: %.17g\nfree_thresh: %d\nlethal_thresh: %d\nmode: %s\n",
                m.resolution, m.origin_x, m.origin_y, m.free_thresh, m.lethal_thresh, m.mode.c_str());
  return buf;
}

// Pixel to cost under threshold mode. Between the thresholds, darker pixels
// cost more: free_thresh-1 maps to 1, lethal_thresh+1 maps to 252.
inline Cost pixel_to_cost(int pixel, int free_thresh, int lethal_thresh) {
  if (pixel >= free_thresh) return cost::kFree;
  if (pixel <= lethal_thresh) return cost::kLethal;
  const int hi = free_thresh - 1;
  const int lo = lethal_thresh + 1;
  if (hi == lo) return 127;
  return static_cast<Cost>(1 + ((hi - pixel) * 251) / (hi - lo));
}

inline CostmapGrid costmap_from_image(const detail::PgmImage& img, const CostmapMeta& meta) {
  if (img.maxval != 255) throw FormatError("costmap PGM must have maxval 255");
  std::vector<Cost> cells(img.pixels.size());
  // PGM rows run top-down; grid row 0 is the bottom (lowest y) row.
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const int px = img.pixels[static_cast<std::size_t>(img.height - 1 - r) * img.width + c];
      cells[static_cast<std::size_t>(r) * img.width + c] =
          meta.mode == "raw" ? static_cast<Cost>(px) : pixel_to_cost(px, meta.free_thresh, meta.lethal_thresh);
    }
  }
  return CostmapGrid(img.width, img.height, meta.resolution, meta.origin_x, meta.origin_y, std::move(cells));
}

inline CostmapGrid load_costmap(const std::string& image_path, const std::string& meta_path) {
  const auto meta = parse_costmap_meta(detail::read_file(meta_path), meta_path);
  return costmap_from_image(detail::read_pgm(image_path), meta);
}

// Grids holding only free and lethal cells are written in threshold mode so
// the image reads naturally (white free, black walls); anything else is raw.
inline CostmapMeta meta_for(const CostmapGrid& g) {
  CostmapMeta m;
  m.resolution = g.resolution();
  m.origin_x = g.origin_x();
  m.origin_y = g.origin_y();
  const bool binary = std::all_of(g.cells().begin(), g.cells().end(),
                                  [](Cost c) { return c == cost::kFree || c == cost::kLethal; });
  m.mode = binary ? "threshold" : "raw";
  return m;
}

inline void save_costmap(const CostmapGrid& g, const std::string& image_path, const std::string& meta_path) {
  const auto meta = meta_for(g);
  detail::PgmImage img{g.width(), g.height(), 255, {}};
  img.pixels.resize(g.size());
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      const Cost v = g.cells()[static_cast<std::size_t>(r) * g.width() + c];
      std::uint16_t px = v;
      if (meta.mode == "threshold") px = v == cost::kFree ? 255 : 0;
      img.pixels[static_cast<std::size_t>(g.height() - 1 - r) * g.width() + c] = px;
    }
  }
  detail::write_file(image_path, detail::encode_pgm(img));
  detail::write_file(meta_path, format_costmap_meta(meta));
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct GridSearchOptions {
  // Treat 253 cells as traversable with a 3x step factor.
  bool allow_inscribed = false;
};

// Per-cell weight w such that a step factor is 1 + w/128. Returns -1 for
// cells that may not be entered.
inline int step_weight(Cost c, const GridSearchOptions& opt) noexcept {
  if (c < cost::kInscribed) return c;
  if (c == cost::kInscribed && opt.allow_inscribed) return 256;
  return -1;
}

// Exact path cost. A step between cells u and v contributes
// 256 + w(u) + w(v) units to `straight` or `diagonal`; the metric value is
// resolution * (straight + sqrt2 * diagonal) / 256, i.e. step length times
// (1 + mean cell cost / 128). Keeping the two integer sums makes costs exact,
// order-independent and symmetric in direction.
struct GridCost {
  std::int64_t straight = 0;
  std::int64_t diagonal = 0;

  double meters(double resolution) const noexcept {
    return resolution * (static_cast<double>(straight) + std::sqrt(2.0) * static_cast<double>(diagonal)) / 256.0;
  }

  friend bool operator==(const GridCost&, const GridCost&) = default;
  friend GridCost operator+(GridCost a, const GridCost& b) noexcept {
    return {a.straight + b.straight, a.diagonal + b.diagonal};
  }

  // Exact comparison of straight + sqrt2*diagonal.
  friend bool operator<(const GridCost& a, const GridCost& b) noexcept {
    const std::int64_t x = a.straight - b.straight;  // want x < sqrt2 * y
    const std::int64_t y = b.diagonal - a.diagonal;
    if (y >= 0) {
      if (x < 0) return true;
      return y > 0 && x * x < 2 * y * y;
    }
    return x < 0 && x * x > 2 * y * y;
  }
  friend bool operator>(const GridCost& a, const GridCost& b) noexcept { return b < a; }
  friend bool operator<=(const GridCost& a, const GridCost& b) noexcept { return !(b < a); }
};

struct GridPath {
  std::vector<GridIndex> cells;
  GridCost exact;
  double cost = 0.0;  // meters-equivalent
};

namespace detail {

inline constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
inline constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};

struct GridSearchState {
  std::vector<GridCost> best;
  std::vector<std::int64_t> parent;  // -1 = none
  std::vector<char> done;
};

inline void require_traversable(const CostmapGrid& g, GridIndex i, const GridSearchOptions& opt, const char* which) {
  if (!g.in_bounds(i)) throw BoundsError(std::string(which) + " cell out of bounds");
  if (step_weight(g.cells()[g.flat(i)], opt) < 0)
    throw ValidationError(std::string(which) + " cell (" + std::to_string(i.col) + ", " + std::to_string(i.row) +
                          ") is not traversable");
}

// Dijkstra from `from`; stops early once `stop_at` (if any) is settled.
inline GridSearchState grid_dijkstra(const CostmapGrid& g, GridIndex from, const GridSearchOptions& opt,
                                     std::optional<GridIndex> stop_at) {
  const std::size_t n = g.size();
  GridSearchState st;
  st.best.assign(n, GridCost{-1, -1});
  st.parent.assign(n, -1);
  st.done.assign(n, 0);

  struct Entry {
    GridCost c;
    std::size_t k;
  };
  // Min-heap on (cost, flat index) so settling order is deterministic.
  auto greater = [](const Entry& a, const Entry& b) {
    if (b.c < a.c) return true;
    if (a.c < b.c) return false;
    return a.k > b.k;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(greater)> open(greater);

  const auto& cells = g.cells();
  const std::size_t src = g.flat(from);
  st.best[src] = GridCost{};
  open.push({GridCost{}, src});
  const std::int64_t target = stop_at ? static_cast<std::int64_t>(g.flat(*stop_at)) : -1;

  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    if (st.done[e.k]) continue;
    st.done[e.k] = 1;
    if (static_cast<std::int64_t>(e.k) == target) break;
    const GridIndex u = g.unflat(e.k);
    const int wu = step_weight(cells[e.k], opt);
    for (int d = 0; d < 8; ++d) {
      const GridIndex v{u.col + kDc[d], u.row + kDr[d]};
      if (!g.in_bounds(v)) continue;
      const std::size_t kv = g.flat(v);
      if (st.done[kv]) continue;
      const int wv = step_weight(cells[kv], opt);
      if (wv < 0) continue;
      GridCost step{};
      (d < 4 ? step.straight : step.diagonal) = 256 + wu + wv;
      const GridCost cand = e.c + step;
      if (st.best[kv].straight < 0 || cand < st.best[kv]) {
        st.best[kv] = cand;
        st.parent[kv] = static_cast<std::int64_t>(e.k);
        open.push({cand, kv});
      }
    }
  }
  return st;
}

}  // namespace detail

// Minimum-cost 8-connected path. Diagonal moves between two cells are
// allowed regardless of the corner cells.
inline GridPath grid_shortest_path(const CostmapGrid& g, GridIndex from, GridIndex to,
                                   const GridSearchOptions& opt = {}) {
  detail::require_traversable(g, from, opt, "start");
  detail::require_traversable(g, to, opt, "goal");
  GridPath out;
  if (from == to) {
    out.cells = {from};
    return out;
  }
  const auto st = detail::grid_dijkstra(g, from, opt, to);
  const std::size_t kt = g.flat(to);
  if (!st.done[kt])
    throw UnreachableError("no grid route from (" + std::to_string(from.col) + ", " + std::to_string(from.row) +
                           ") to (" + std::to_string(to.col) + ", " + std::to_string(to.row) + ")");
  for (std::int64_t k = static_cast<std::int64_t>(kt); k >= 0; k = st.parent[static_cast<std::size_t>(k)])
    out.cells.push_back(g.unflat(static_cast<std::size_t>(k)));
  std::reverse(out.cells.begin(), out.cells.end());
  out.exact = st.best[kt];
  out.cost = out.exact.meters(g.resolution());
  return out;
}

// Single-source costs to every cell; std::nullopt where unreachable.
inline std::vector<std::optional<GridCost>> grid_cost_field(const CostmapGrid& g, GridIndex from,
                                                            const GridSearchOptions& opt = {}) {
  detail::require_traversable(g, from, opt, "start");
  const auto st = detail::grid_dijkstra(g, from, opt, std::nullopt);
  std::vector<std::optional<GridCost>> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    if (st.done[k]) out[k] = st.best[k];
  return out;
}

}  // namespace intellimove
