#include <gtest/gtest.h>

#include "support.hpp"

using namespace intellimove;
using namespace intellimove::testing;

namespace {

// Two w x h rooms side by side split by a one-cell wall; `door` cells of the
// wall are opened in the middle (0 = sealed).
CostmapGrid twin_rooms(int w, int h, int door, double res = 0.05) {
  const int W = 2 * w + 3, H = h + 2;
  std::vector<Cost> cells(static_cast<std::size_t>(W) * H, cost::kLethal);
  for (int r = 1; r <= h; ++r)
    for (int c = 1; c < W - 1; ++c)
      if (c != w + 1) cells[static_cast<std::size_t>(r) * W + c] = cost::kFree;
  for (int k = 0; k < door; ++k) cells[static_cast<std::size_t>(1 + (h - door) / 2 + k) * W + w + 1] = cost::kFree;
  return CostmapGrid(W, H, res, 0.0, 0.0, std::move(cells));
}

}  // namespace

TEST(Distance, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  const auto g = random_grid(rng, 13, 11, 0.2, 0.5);
  const auto d = obstacle_distance(g);
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) {
      if (!is_free(g.at({c, r}))) continue;
      // nearest non-free cell, or the virtual ring one cell outside the grid
      double best = std::min({c + 1.0, r + 1.0, double(g.width() - c), double(g.height() - r)});
      for (int r2 = 0; r2 < g.height(); ++r2)
        for (int c2 = 0; c2 < g.width(); ++c2)
          if (!is_free(g.at({c2, r2}))) best = std::min(best, std::hypot(c - c2, r - r2));
      EXPECT_NEAR(d[g.flat({c, r})], best * 0.5, 1e-9) << c << "," << r;
    }
}

TEST(Segmentation, SingleRectangleIsOneRoom) {
  const auto g = twin_rooms(40, 40, 0);
  auto cells = g.cells();
  for (int r = 1; r <= 40; ++r) cells[static_cast<std::size_t>(r) * g.width() + 41] = cost::kFree;
  CostmapGrid open(g.width(), g.height(), g.resolution(), 0, 0, cells);
  const auto raster = segment_rooms(open);
  EXPECT_EQ(raster.max_label(), 1);
  for (std::size_t k = 0; k < open.size(); ++k) EXPECT_EQ(raster.labels[k] != 0, is_free(open.cells()[k]));
}

TEST(Segmentation, DoorSplitsTwoRooms) {
  const auto g = twin_rooms(80, 80, 16);
  const auto raster = segment_rooms(g);
  ASSERT_EQ(raster.max_label(), 2);
  EXPECT_TRUE(validate_raster(raster, g).empty());
  const auto edges = extract_adjacency(raster, g);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_NEAR(edges[0].portal.col, 81, 1);
  EXPECT_GE(edges[0].portal.row, 33);
  EXPECT_LE(edges[0].portal.row, 48);
}

TEST(Segmentation, WideOpeningMerges) {
  // a 2 m opening is wider than door_width_max, so both halves form one room
  const auto g = twin_rooms(80, 80, 40);
  EXPECT_EQ(segment_rooms(g).max_label(), 1);
}

TEST(Segmentation, SealedRoomsHaveNoEdge) {
  const auto g = twin_rooms(60, 60, 0);
  const auto raster = segment_rooms(g);
  EXPECT_TRUE(extract_adjacency(raster, g).empty());
}

TEST(Segmentation, GeneratorSuitesRecovered) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto spec = office_spec(seed, 2);
    spec.layout = "suite";
    const auto env = generate(spec);
    const auto m = build_semantic_map(env.costmap, observations_of(env.truth));
    const auto res = compare_to_truth(m, env);
    EXPECT_TRUE(res.ok()) << "seed " << seed << ": " << res.detail;
  }
}

TEST(Segmentation, LinearSuiteIsPathGraph) {
  auto spec = office_spec(9, 4);
  spec.layout = "suite";
  const auto env = generate(spec);
  const auto raster = segment_rooms(env.costmap);
  const auto edges = extract_adjacency(raster, env.costmap);
  EXPECT_EQ(raster.max_label(), 4);
  EXPECT_EQ(edges.size(), 3u);
  std::map<std::string, int> degree;
  for (const auto& e : edges) ++degree[e.room_a], ++degree[e.room_b];
  int ends = 0;
  for (const auto& [_, d] : degree) ends += d == 1;
  EXPECT_EQ(ends, 2);
}

TEST(Categorize, Rules) {
  const auto office_req = parse_category_rules("office: required=desk; weights=desk:2,chair:1\n");
  EXPECT_EQ(categorize_room({"desk", "chair", "bookcase"}, office_req), "office");
  EXPECT_EQ(categorize_room({"chair"}, office_req), "uncategorized");
  EXPECT_EQ(categorize_room(std::vector<std::string>{}, default_category_rules()), "uncategorized");
  EXPECT_EQ(categorize_room({"fridge", "sink"}, default_category_rules()), "kitchen");
  EXPECT_EQ(categorize_room({"fire_extinguisher", "plant"}, default_category_rules()), "corridor");
  EXPECT_EQ(categorize_room({"bookcase"}, default_category_rules()), "office");
}

TEST(Categorize, ParseErrors) {
  EXPECT_THROW(parse_category_rules("office required=desk\n"), ConfigError);
  EXPECT_THROW(parse_category_rules("office: required=desk\noffice: weights=desk:1\n"), ConfigError);
  EXPECT_THROW(parse_category_rules("office: weights=desk:0\n"), ConfigError);
  EXPECT_THROW(parse_category_rules("office: colour=red\n"), ConfigError);
  EXPECT_THROW(parse_category_rules("office:\n"), ConfigError);
}

TEST(Categorize, DefaultRulesCoverGeneratorRooms) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto env = generate(office_spec(seed, 5));
    for (const auto& room : env.truth.rooms) {
      std::vector<std::string> classes;
      for (const auto& o : env.truth.objects)
        if (o.room_id == room.id) classes.push_back(o.class_label);
      EXPECT_EQ(categorize_room(classes, default_category_rules()), room.category) << seed << " " << room.id;
    }
  }
}

TEST(Categorize, BundledRulesFileMatchesDefaults) {
  const std::string path = std::string(INTELLIMOVE_DATA_DIR) + "/category_rules.txt";
  EXPECT_EQ(parse_category_rules(detail::read_file(path), path), default_category_rules());
}
