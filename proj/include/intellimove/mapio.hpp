#pragma once

// On-disk map container and SVG rendering.
//
// A map is a directory:
//   costmap.pgm + costmap.meta   metric layer
//   rooms.pgm                    16-bit room-label raster
//   graph.json                   object and room layers
//   meta.json                    name, creation time, format version

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "intellimove/detail/pgm.hpp"
#include "intellimove/detail/text.hpp"
#include "intellimove/errors.hpp"
#include "intellimove/planner.hpp"
#include "intellimove/semantic_map.hpp"

namespace intellimove {

inline nlohmann::json graph_to_json(const SemanticGraph& g) {
  using nlohmann::json;
  json rooms = json::array(), objects = json::array(), edges = json::array();
  for (const auto& r : g.rooms)
    rooms.push_back({{"id", r.id},
                     {"category", r.category},
                     {"centroid", {r.centroid.x, r.centroid.y}},
                     {"cell_count", r.cell_count},
                     {"attributes", r.attributes}});
  for (const auto& o : g.objects)
    objects.push_back({{"id", o.id}, {"class", o.class_label}, {"position", {o.position.x, o.position.y}}, {"room", o.room_id}});
  for (const auto& e : g.room_edges)
    edges.push_back({{"a", e.room_a}, {"b", e.room_b}, {"weight", e.weight}, {"portal", {e.portal.col, e.portal.row}}});
  return {{"version", kMapFormatVersion}, {"rooms", rooms}, {"objects", objects}, {"edges", edges}};
}

// Rebuilds through add_room/add_object/add_room_edge, so a file that breaks
// a graph invariant is rejected here.
inline SemanticGraph graph_from_json(const nlohmann::json& j) {
  auto point = [](const nlohmann::json& p) { return MetricPoint{p.at(0).get<double>(), p.at(1).get<double>()}; };
  if (j.at("version").get<int>() > kMapFormatVersion)
    throw VersionError("graph.json version " + std::to_string(j.at("version").get<int>()) + " is newer than supported");
  SemanticGraph g;
  std::vector<std::pair<std::string, std::vector<std::string>>> stored_attrs;
  for (const auto& r : j.at("rooms")) {
    add_room(g, {r.at("id").get<std::string>(), r.at("category").get<std::string>(), point(r.at("centroid")),
                 r.at("cell_count").get<std::int64_t>(), {}});
    stored_attrs.emplace_back(g.rooms.back().id, r.at("attributes").get<std::vector<std::string>>());
  }
  for (const auto& o : j.at("objects"))
    add_object(g, {o.at("id").get<std::string>(), o.at("class").get<std::string>(), point(o.at("position")),
                   o.at("room").get<std::string>()});
  for (const auto& e : j.at("edges"))
    add_room_edge(g, {e.at("a").get<std::string>(), e.at("b").get<std::string>(), e.at("weight").get<double>(),
                      GridIndex{e.at("portal").at(0).get<int>(), e.at("portal").at(1).get<int>()}});
  for (const auto& [id, attrs] : stored_attrs)
    if (find_room(g, id)->attributes != attrs) throw ConsistencyError("room '" + id + "' attributes disagree with its objects");
  return g;
}

inline detail::PgmImage raster_to_image(const RoomLabelRaster& r) {
  detail::PgmImage img{r.width, r.height, 65535, std::vector<std::uint16_t>(r.labels.size())};
  for (int row = 0; row < r.height; ++row)
    for (int c = 0; c < r.width; ++c)
      img.pixels[static_cast<std::size_t>(r.height - 1 - row) * r.width + c] =
          r.labels[static_cast<std::size_t>(row) * r.width + c];
  return img;
}

inline RoomLabelRaster raster_from_image(const detail::PgmImage& img) {
  if (img.maxval != 65535) throw FormatError("rooms.pgm must be a 16-bit PGM (maxval 65535)");
  RoomLabelRaster r{img.width, img.height, std::vector<std::uint16_t>(img.pixels.size())};
  for (int row = 0; row < r.height; ++row)
    for (int c = 0; c < r.width; ++c)
      r.labels[static_cast<std::size_t>(row) * r.width + c] =
          img.pixels[static_cast<std::size_t>(r.height - 1 - row) * r.width + c];
  return r;
}

inline void save_map(const SemanticMap& m, const std::string& dir) {
  if (auto v = validate_map(m); !v.empty())
    throw ConsistencyError("refusing to save inconsistent map: " + v.front().subject + ": " + v.front().rule);
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path p(dir);
  save_costmap(m.costmap, (p / "costmap.pgm").string(), (p / "costmap.meta").string());
  detail::write_file((p / "rooms.pgm").string(), detail::encode_pgm(raster_to_image(m.raster)));
  detail::write_file((p / "graph.json").string(), graph_to_json(m.graph).dump(2) + "\n");
  const nlohmann::json meta{{"format_version", m.meta.format_version}, {"name", m.meta.name}, {"created", m.meta.created}};
  detail::write_file((p / "meta.json").string(), meta.dump(2) + "\n");
}

// Reads the three layers without the cross-layer check. Format and version
// problems still throw.
inline SemanticMap load_map_unchecked(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path p(dir);
  for (const char* f : {"meta.json", "costmap.pgm", "costmap.meta", "rooms.pgm", "graph.json"})
    if (!fs::is_regular_file(p / f)) throw CorruptArchiveError(dir + ": missing " + f);

  SemanticMap m;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(detail::read_file((p / "meta.json").string()));
    m.meta.format_version = meta.at("format_version").get<int>();
    m.meta.name = meta.at("name").get<std::string>();
    m.meta.created = meta.at("created").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArchiveError(dir + "/meta.json: " + e.what());
  }
  if (m.meta.format_version > kMapFormatVersion || m.meta.format_version < 1)
    throw VersionError(dir + ": map format version " + std::to_string(m.meta.format_version) + " is not supported");

  try {
    m.costmap = load_costmap((p / "costmap.pgm").string(), (p / "costmap.meta").string());
    m.raster = raster_from_image(detail::read_pgm((p / "rooms.pgm").string()));
    m.graph = graph_from_json(nlohmann::json::parse(detail::read_file((p / "graph.json").string())));
  } catch (const VersionError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArchiveError(dir + ": " + e.what());
  } catch (const FormatError& e) {
    throw CorruptArchiveError(dir + ": " + e.what());
  } catch (const ConfigError& e) {
    throw CorruptArchiveError(dir + ": " + e.what());
  } catch (const ValidationError& e) {
    throw CorruptArchiveError(dir + ": " + e.what());
  } catch (const ConflictError& e) {
    throw CorruptArchiveError(dir + ": " + e.what());
  }
  return m;
}

inline SemanticMap load_map(const std::string& dir) {
  auto m = load_map_unchecked(dir);
  if (auto v = validate_map(m); !v.empty())
    throw ConsistencyError(dir + ": " + v.front().subject + ": " + v.front().rule);
  return m;
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

inline std::string category_color(const std::string& category) {
  static const std::map<std::string, std::string> fixed_colors = {
      {"office", "#4e79a7"},  {"corridor", "#bab0ac"}, {"conference_room", "#f28e2b"}, {"kitchen", "#59a14f"},
      {"bathroom", "#76b7b2"}, {"storage", "#9c755f"},  {"living_room", "#edc948"},      {"uncategorized", "#d3d3d3"}};
  if (auto it = fixed_colors.find(category); it != fixed_colors.end()) return it->second;
  static const char* palette[] = {"#e15759", "#af7aa1", "#ff9da7", "#8cd17d", "#b6992d", "#499894"};
  return palette[fnv1a(category) % 6];
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// Layers, bottom to top: costmap (grayscale), rooms (one translucent path
// per room, label at centroid), objects, then the optional path in red with
// start and goal markers. Drawing units are cells; y grows upward in the map
// and downward in SVG.
inline std::string render_svg(const SemanticMap& m, const SemanticPath* path = nullptr) {
  const auto& g = m.costmap;
  const int W = g.width(), H = g.height();
  const double res = g.resolution();
  auto sx = [&](double x) { return detail::fixed((x - g.origin_x()) / res, 2); };
  auto sy = [&](double y) { return detail::fixed(H - (y - g.origin_y()) / res, 2); };
  const double scale = std::max(1.0, 1000.0 / std::max(W, H));

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << detail::fixed(W * scale, 0)
     << "\" height=\"" << detail::fixed(H * scale, 0) << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
     << "<title>" << detail::xml_escape(m.meta.name) << "</title>\n";

  os << "<g id=\"costmap\" shape-rendering=\"crispEdges\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n";
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W;) {
      const Cost v = g.cells()[static_cast<std::size_t>(r) * W + c];
      int e = c + 1;
      while (e < W && g.cells()[static_cast<std::size_t>(r) * W + e] == v) ++e;
      if (v != cost::kFree) {
        int shade = v == cost::kUnknown ? 128 : v >= cost::kInscribed ? 0 : 255 - (v * 200) / 252;
        char color[8];
        std::snprintf(color, sizeof color, "#%02x%02x%02x", shade, shade, shade);
        os << "<rect x=\"" << c << "\" y=\"" << (H - 1 - r) << "\" width=\"" << (e - c) << "\" height=\"1\" fill=\""
           << color << "\"/>\n";
      }
      c = e;
    }
  }
  os << "</g>\n";

  os << "<g id=\"rooms\">\n";
  for (std::size_t i = 0; i < m.graph.rooms.size(); ++i) {
    const auto& room = m.graph.rooms[i];
    const auto l = static_cast<std::uint16_t>(i + 1);
    os << "<path class=\"room\" data-room=\"" << detail::xml_escape(room.id) << "\" fill=\""
       << detail::category_color(room.category) << "\" fill-opacity=\"0.35\" d=\"";
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W;) {
        if (m.raster.labels[static_cast<std::size_t>(r) * W + c] != l) {
          ++c;
          continue;
        }
        int e = c + 1;
        while (e < W && m.raster.labels[static_cast<std::size_t>(r) * W + e] == l) ++e;
        os << "M" << c << " " << (H - 1 - r) << "h" << (e - c) << "v1h-" << (e - c) << "z";
        c = e;
      }
    }
    os << "\"/>\n";
  }
  for (const auto& room : m.graph.rooms)
    os << "<text class=\"room-label\" x=\"" << sx(room.centroid.x) << "\" y=\"" << sy(room.centroid.y)
       << "\" font-size=\"" << detail::fixed(0.5 / res, 1) << "\" text-anchor=\"middle\">"
       << detail::xml_escape(room.id) << " (" << detail::xml_escape(room.category) << ")</text>\n";
  os << "</g>\n";

  os << "<g id=\"objects\">\n";
  for (const auto& o : m.graph.objects)
    os << "<circle class=\"object\" cx=\"" << sx(o.position.x) << "\" cy=\"" << sy(o.position.y) << "\" r=\""
       << detail::fixed(0.15 / res, 2) << "\" fill=\"#333333\"/>\n"
       << "<text class=\"object-label\" x=\"" << sx(o.position.x) << "\" y=\"" << sy(o.position.y - 0.35)
       << "\" font-size=\"" << detail::fixed(0.3 / res, 1) << "\" text-anchor=\"middle\">"
       << detail::xml_escape(o.class_label) << "</text>\n";
  os << "</g>\n";

  if (path) {
    std::vector<MetricPoint> pts = path->waypoints;
    if (pts.empty()) {
      for (const auto& id : path->nodes) {
        if (const auto* r = find_room(m.graph, id)) pts.push_back(r->centroid);
        else if (const auto* o = find_object(m.graph, id)) pts.push_back(o->position);
      }
    }
    os << "<g id=\"path\">\n<polyline class=\"semantic-path\" fill=\"none\" stroke=\"#ff0000\" stroke-width=\""
       << detail::fixed(0.1 / res, 2) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << sx(pts[i].x) << "," << sy(pts[i].y);
    os << "\"/>\n";
    if (!pts.empty()) {
      os << "<circle class=\"path-start\" cx=\"" << sx(pts.front().x) << "\" cy=\"" << sy(pts.front().y) << "\" r=\""
         << detail::fixed(0.25 / res, 2) << "\" fill=\"#00aa00\"/>\n"
         << "<circle class=\"path-goal\" cx=\"" << sx(pts.back().x) << "\" cy=\"" << sy(pts.back().y) << "\" r=\""
         << detail::fixed(0.25 / res, 2) << "\" fill=\"#ff0000\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace intellimove
