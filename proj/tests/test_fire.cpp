#include "evac/error.hpp"
#include "evac/fire.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace evac;
using namespace evac::fire;
using geometry::Point;
using nlohmann::json;

namespace {

FireSet square(double x0, double y0, double side) {
  FireSet s;
  s.polygons.push_back({{{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}}});
  return s;
}

}  // namespace

TEST(FireSetAt, LinearGrowth) {
  const auto s = FireScenario::circles({{{0, 0}, 10.0, 1.0}});
  EXPECT_DOUBLE_EQ(fire_set_at(s, 5).circles.at(0).radius, 15.0);
  EXPECT_DOUBLE_EQ(fire_set_at(s, 0).circles.at(0).radius, 10.0);
}

TEST(FireSetAt, DefaultGrowthIsOneMeterPerInstance) {
  const auto s = parse_scenario(json::parse(R"({"type":"circles","circles":[{"lat":0,"lon":0,"r0_m":3}]})"), {0, 0});
  EXPECT_DOUBLE_EQ(s.circle_list().at(0).growth, 1.0);
  EXPECT_DOUBLE_EQ(fire_set_at(s, 7).circles.at(0).radius, 10.0);
}

TEST(FireSetAt, FramesStepHold) {
  const auto s = FireScenario::frames({{2, square(0, 0, 1)}, {5, square(0, 0, 3)}});
  EXPECT_THROW(fire_set_at(s, 1), InputError);
  EXPECT_EQ(fire_set_at(s, 4).polygons.at(0).ring, square(0, 0, 1).polygons[0].ring);
  EXPECT_EQ(fire_set_at(s, 5).polygons.at(0).ring, square(0, 0, 3).polygons[0].ring);
  EXPECT_EQ(s.first_instance(), 2);
  EXPECT_EQ(s.last_instance(), 5);
  EXPECT_THROW(fire_set_at(s, 6), InputError);
}

TEST(Scenario, RejectsBadInput) {
  EXPECT_THROW(FireScenario::circles({{{0, 0}, 0.0, 1.0}}), InputError);
  EXPECT_THROW(FireScenario::circles({{{0, 0}, 1.0, -1.0}}), InputError);
  EXPECT_THROW(FireScenario::frames({{1, {}}, {1, {}}}), InputError);
  EXPECT_THROW(parse_scenario(json::parse(R"({"type":"cones"})"), {0, 0}), InputError);
  EXPECT_THROW(parse_scenario(json::parse(R"({"type":"frames","frames":[{"t":0,"multipolygon":[[[0,0],[0,1]]]}]})"),
                              {0, 0}),
               InputError);
}

TEST(Monotone, CirclesAlwaysOk) {
  EXPECT_FALSE(validate_monotone(FireScenario::circles({{{0, 0}, 1.0, 0.0}, {{5, 5}, 2.0, 3.0}}), 50));
}

TEST(Monotone, ShrinkingFrameReported) {
  const auto s = FireScenario::frames(
      {{0, square(0, 0, 2)}, {1, square(0, 0, 3)}, {2, square(0, 0, 4)}, {3, square(0, 0, 1)}, {4, square(0, 0, 5)}});
  const auto bad = validate_monotone(s, 4);
  ASSERT_TRUE(bad);
  EXPECT_EQ(*bad, 3);
  EXPECT_FALSE(validate_monotone(s, 2));
}

TEST(Monotone, IdenticalFramesOk) {
  std::vector<Frame> frames;
  for (int t = 0; t < 6; ++t) frames.push_back({t, square(1, 1, 2)});
  EXPECT_FALSE(validate_monotone(FireScenario::frames(frames), 5));
}

TEST(Merge, IdentityIsPointwiseEqual) {
  const auto old = FireScenario::circles({{{0, 0}, 10.0, 1.0}});
  const auto m = merge_scenarios(old, old, 3, 8);
  for (int t = 0; t <= 8; ++t) {
    const Point probe_in{0, 10.0 + t};
    const Point probe_out{0, 10.0 + t + 0.01};
    EXPECT_TRUE(contains(fire_set_at(m, t), probe_in));
    EXPECT_FALSE(contains(fire_set_at(m, t), probe_out));
  }
  EXPECT_FALSE(validate_monotone(m, 8));
}

TEST(Merge, SecondCircleFromTFire) {
  const auto old = FireScenario::circles({{{0, 0}, 10.0, 1.0}});
  const auto fresh = FireScenario::circles({{{100, 0}, 5.0, 1.0}});
  const auto m = merge_scenarios(old, fresh, 5, 10);
  EXPECT_EQ(fire_set_at(m, 4).circles.size(), 1u);
  const auto f6 = fire_set_at(m, 6);
  EXPECT_EQ(f6.circles.size(), 2u);
  EXPECT_TRUE(contains(f6, {100, 10.9}));
  EXPECT_TRUE(contains(f6, {0, 15.9}));
  EXPECT_FALSE(contains(fire_set_at(m, 4), {100, 0}));
}

TEST(Merge, FasterConcentricGrowthWins) {
  const auto old = FireScenario::circles({{{0, 0}, 10.0, 1.0}});
  const auto fast = FireScenario::circles({{{0, 0}, 10.0, 4.0}});
  const auto m = merge_scenarios(old, fast, 2, 6);
  for (int t = 2; t <= 6; ++t) {
    EXPECT_TRUE(contains(fire_set_at(m, t), {10.0 + 4.0 * t, 0}));
    EXPECT_FALSE(contains(fire_set_at(m, t), {10.0 + 4.0 * t + 0.01, 0}));
  }
  EXPECT_FALSE(contains(fire_set_at(m, 1), {12.0, 0}));
}

TEST(Merge, CoverageErrors) {
  const auto frames = FireScenario::frames({{0, square(0, 0, 1)}, {4, square(0, 0, 1)}});
  const auto circles = FireScenario::circles({{{0, 0}, 1.0, 1.0}});
  EXPECT_THROW(merge_scenarios(frames, circles, 2, 6), InputError);
  EXPECT_THROW(merge_scenarios(circles, FireScenario::frames({{5, {}}}), 3, 6), InputError);
}

TEST(Merge, OutputIsMonotone) {
  std::mt19937 rng(9);
  for (int k = 0; k < 50; ++k) {
    const auto a = tk::random_circles(rng, 500.0);
    const auto b = tk::random_circles(rng, 500.0);
    const int t_fire = std::uniform_int_distribution<int>(0, 10)(rng);
    EXPECT_FALSE(validate_monotone(merge_scenarios(a, b, t_fire, 15), 15));
  }
}

TEST(Cache, CenterNodeAlwaysOvertaken) {
  const auto net = tk::make_net({{0, 0}, {500, 0}}, {{0, 1, 1, 1}}, {}, {});
  const auto cache = build_cache(net, FireScenario::circles({{{0, 0}, 1.0, 1.0}}), 10);
  for (int t = 0; t <= 10; ++t) EXPECT_TRUE(cache.overtaken(t, 0));
}

TEST(Cache, OvertakenWhenRadiusArrives) {
  const auto net = tk::make_net({{18, 0}, {500, 0}}, {{0, 1, 1, 1}}, {}, {});
  const auto cache = build_cache(net, FireScenario::circles({{{0, 0}, 10.0, 1.0}}), 12);
  for (int t = 0; t < 8; ++t) EXPECT_FALSE(cache.overtaken(t, 0)) << t;
  for (int t = 8; t <= 12; ++t) EXPECT_TRUE(cache.overtaken(t, 0)) << t;
  EXPECT_EQ(cache.overtaken_nodes(9), std::vector<int>{0});
}

TEST(Cache, DistanceDropsAtGrowthRate) {
  const auto net = tk::make_net({{1010, -50}, {1010, 50}}, {{0, 1, 1, 1}}, {}, {});
  const auto cache = build_cache(net, FireScenario::circles({{{0, 0}, 10.0, 1.0}}), 20);
  for (int t = 0; t <= 20; ++t) EXPECT_NEAR(cache.arc_dist(t, 0), 1000.0 - t, 1e-9);
}

TEST(Cache, NoFireIsInfinite) {
  const auto net = tk::make_net({{0, 0}, {10, 0}}, {{0, 1, 1, 1}}, {}, {});
  const auto cache = build_cache(net, tk::no_fire(), 3);
  EXPECT_EQ(cache.arc_dist(2, 0), FireCache::kNoFire);
  EXPECT_FALSE(cache.overtaken(2, 1));
}

TEST(Cache, ExtendsIncrementally) {
  const auto net = tk::make_net({{30, 0}, {60, 0}}, {{0, 1, 1, 1}}, {}, {});
  const auto s = FireScenario::circles({{{0, 0}, 5.0, 2.0}});
  FireCache inc(net, s, 3);
  inc.extend_to(6);
  inc.extend_to(15);
  const auto full = build_cache(net, s, 15);
  EXPECT_EQ(inc.t_begin(), 3);
  EXPECT_EQ(inc.t_end(), 15);
  for (int t = 3; t <= 15; ++t) {
    EXPECT_EQ(inc.arc_dist(t, 0), full.arc_dist(t, 0));
    EXPECT_EQ(inc.overtaken(t, 0), full.overtaken(t, 0));
  }
  EXPECT_THROW(inc.arc_dist(2, 0), std::out_of_range);
}

TEST(Cache, TouchingEndpointGivesZero) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto net = tk::random_network(rng, {});
    const auto s = tk::random_circles(rng, 400.0);
    const auto cache = build_cache(net, s, 10);
    for (int t = 0; t <= 10; ++t) {
      for (int k = 0; k < net.arc_count(); ++k) {
        const auto& a = net.arcs[k];
        if (cache.overtaken(t, a.from) || cache.overtaken(t, a.to)) EXPECT_EQ(cache.arc_dist(t, k), 0.0);
      }
    }
  }
}

TEST(Fingerprint, StableAndSensitive) {
  const auto a = FireScenario::circles({{{0, 0}, 10.0, 1.0}});
  const auto b = FireScenario::circles({{{0, 0}, 10.0, 1.5}});
  EXPECT_EQ(fingerprint(a), fingerprint(FireScenario::circles({{{0, 0}, 10.0, 1.0}})));
  EXPECT_NE(fingerprint(a), fingerprint(b));
  EXPECT_EQ(fingerprint(a).size(), 16u);
}
