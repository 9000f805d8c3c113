#include <doctest.h>

#include "gridflow/expert.hpp"
#include "gridflow/mapf.hpp"
#include "support.hpp"

using namespace gridflow;

namespace {

bool has_violation(const ValidationReport& r, const std::string& kind) {
  for (const auto& v : r.violations)
    if (v.kind == kind) return true;
  return false;
}

}  // namespace

TEST_SUITE("mapf") {

TEST_CASE("stationary agents do not collide") {
  const std::vector<Cell> p{{0, 0}, {1, 1}};
  CHECK(detect_collisions(p, p).empty());
}

TEST_CASE("swap along an edge is one edge collision") {
  const std::vector<Cell> before{{0, 0}, {0, 1}}, after{{0, 1}, {0, 0}};
  const auto c = detect_collisions(before, after, 4);
  REQUIRE(c.size() == 1);
  CHECK(c[0].kind == CollisionKind::Edge);
  CHECK(c[0].a == 0);
  CHECK(c[0].b == 1);
  CHECK(c[0].t == 4);
}

TEST_CASE("length mismatch") {
  const std::vector<Cell> a{{0, 0}}, b{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(detect_collisions(a, b), LengthMismatch);
}

TEST_CASE("three agents on a 2x2 map match brute force") {
  const GridMap m(2, 2);
  const auto cells = m.free_cells();
  for (const Cell a0 : cells)
    for (const Cell a1 : cells)
      for (const Cell a2 : cells) {
        if (a0 == a1 || a0 == a2 || a1 == a2) continue;
        const std::vector<Cell> before{a0, a1, a2};
        std::vector<std::vector<Cell>> options;
        for (const Cell c : before) {
          std::vector<Cell> o;
          for (const auto& [act, n] : neighbors(m, c)) o.push_back(n);
          options.push_back(o);
        }
        for (const Cell b0 : options[0])
          for (const Cell b1 : options[1])
            for (const Cell b2 : options[2]) {
              const std::vector<Cell> after{b0, b1, b2};
              std::set<testing::PairCollision> got;
              for (const auto& c : detect_collisions(before, after))
                got.insert({c.kind == CollisionKind::Vertex ? 0 : 1, c.a, c.b});
              CHECK(got == testing::brute_force_collisions(before, after));
            }
      }
}

TEST_CASE("collisions are symmetric in agent order") {
  const std::vector<Cell> before{{0, 0}, {0, 1}, {1, 1}}, after{{0, 1}, {0, 0}, {0, 1}};
  const std::vector<Cell> rb{before[2], before[1], before[0]}, ra{after[2], after[1], after[0]};
  const auto x = detect_collisions(before, after);
  const auto y = detect_collisions(rb, ra);
  REQUIRE(x.size() == y.size());
  std::set<testing::PairCollision> mapped;
  for (const auto& c : y) {
    const int a = 2 - c.a, b = 2 - c.b;
    mapped.insert({c.kind == CollisionKind::Vertex ? 0 : 1, std::min(a, b), std::max(a, b)});
  }
  std::set<testing::PairCollision> direct;
  for (const auto& c : x) direct.insert({c.kind == CollisionKind::Vertex ? 0 : 1, c.a, c.b});
  CHECK(mapped == direct);
}

TEST_CASE("single-agent shortest path validates") {
  const Instance inst{GridMap(3, 3), {{0, 0}}, {{2, 2}}, "one"};
  Solution s;
  s.paths = {{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}}};
  const auto r = validate(inst, s);
  CHECK(r.ok);
  CHECK(soc(s) == 4);
  CHECK(makespan(s) == 4);
}

TEST_CASE("swapping neighbors is an edge collision violation") {
  const Instance inst{GridMap(1, 2), {{0, 0}, {0, 1}}, {{0, 1}, {0, 0}}, "swap"};
  Solution s;
  s.paths = {{{0, 0}, {0, 1}}, {{0, 1}, {0, 0}}};
  const auto r = validate(inst, s);
  CHECK_FALSE(r.ok);
  CHECK(has_violation(r, "edge_collision"));
}

TEST_CASE("validate reports endpoint and connectivity problems") {
  const Instance inst{parse_map("1 4\n..#.\n"), {{0, 0}}, {{0, 1}}, "bad"};
  Solution s;
  s.paths = {{{0, 1}, {0, 0}}};
  auto r = validate(inst, s);
  CHECK(has_violation(r, "start"));
  CHECK(has_violation(r, "goal"));

  s.paths = {{{0, 0}, {0, 2}, {0, 1}}};
  r = validate(inst, s);
  CHECK(has_violation(r, "off_map"));

  s.paths = {{{0, 0}, {0, 3}, {0, 1}}};
  r = validate(inst, s);
  CHECK(has_violation(r, "disconnected"));

  s.paths = {};
  CHECK(has_violation(validate(inst, s), "agent_count"));
}

TEST_CASE("an agent resting at its goal still collides") {
  const Instance inst{GridMap(1, 3), {{0, 1}, {0, 0}}, {{0, 1}, {0, 2}}, "rest"};
  Solution s;
  s.paths = {{{0, 1}}, {{0, 0}, {0, 1}, {0, 2}}};
  const auto r = validate(inst, s);
  CHECK(has_violation(r, "vertex_collision"));
}

TEST_CASE("agent already at goal") {
  Solution s;
  s.paths = {{{2, 2}}};
  CHECK(s.arrival(0) == 0);
  CHECK(soc(s) == 0);
}

TEST_CASE("arrival is the earliest permanent stay") {
  Solution s;
  s.paths = {{{0, 0}, {0, 1}, {0, 0}, {0, 1}, {0, 1}}};
  CHECK(s.arrival(0) == 3);
  CHECK(s.at(0, 10) == Cell{0, 1});
  CHECK(truncated(s).paths[0].size() == 4);
  CHECK(extended(s, 7).paths[0].size() == 7);
}

TEST_CASE("yield plan: agent 0 detours through the pocket") {
  const Instance inst = testing::yield_instance();
  const Solution s = testing::yield_solution();
  const auto r = validate(inst, s);
  CHECK(r.ok);
  const int bfs0 = *bfs_distance(inst.map, inst.goals[0]).at(inst.starts[0]);
  CHECK(s.arrival(0) > bfs0);
  CHECK(soc(s) == s.arrival(0) + s.arrival(1));
  CHECK(soc(s) == 8);
  CHECK(makespan(s) == 5);
}

TEST_CASE("truncating and re-extending a valid solution stays valid") {
  const Instance inst = testing::yield_instance();
  const Solution s = testing::yield_solution();
  const Solution again = extended(truncated(s), 12);
  CHECK(validate(inst, again).ok);
  CHECK(soc(again) == soc(s));
}

TEST_CASE("soc is bounded below by the BFS sum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = testing::maze_instance(seed, 16, 6);
    const Solution s = solve_prioritized(inst);
    long lower = 0;
    for (int i = 0; i < inst.num_agents(); ++i)
      lower += *bfs_distance(inst.map, inst.goals[static_cast<std::size_t>(i)]).at(inst.starts[static_cast<std::size_t>(i)]);
    CHECK(soc(s) >= lower);
    CHECK(makespan(s) <= soc(s));
  }
}

TEST_CASE("scenario files round trip") {
  const std::string text =
      "version 1\n"
      "0\tmaze.map\t4\t3\t1\t2\t3\t0\t4.00000000\n"
      "1\tmaze.map\t4\t3\t0\t0\t2\t2\t4.00000000\n";
  const auto entries = parse_scen(text);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].start == Cell{2, 1});
  CHECK(entries[0].goal == Cell{0, 3});
  CHECK(render_scen(entries) == text);
  CHECK(parse_scen(render_scen(entries)) == entries);
}

TEST_CASE("scenario errors carry the line") {
  try {
    parse_scen("version 1\n0\tm\t4\t4\t1\t1\t2\n");
    FAIL("expected MalformedScenario");
  } catch (const MalformedScenario& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scen("0\tm\t4\t4\tx\t1\t2\t2\t1\n"), MalformedScenario);
}

TEST_CASE("generated scenarios round trip through scen files") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = testing::maze_instance(seed, 16, 8);
    const auto entries = scen_from_instance(inst, "maze.map");
    const auto back = instance_from_scen(inst.map, parse_scen(render_scen(entries)), -1, inst.id);
    CHECK(back.starts == inst.starts);
    CHECK(back.goals == inst.goals);
    CHECK(instance_from_scen(inst.map, entries, 3, "x").num_agents() == 3);
  }
}

TEST_CASE("instance invariants") {
  CHECK_THROWS_AS(check_instance({GridMap(2, 2), {{0, 0}, {0, 0}}, {{1, 1}, {1, 0}}, ""}), InvalidInstance);
  CHECK_THROWS_AS(check_instance({GridMap(2, 2), {{0, 0}}, {{1, 1}, {1, 0}}, ""}), InvalidInstance);
  CHECK_THROWS_AS(check_instance({parse_map("1 2\n.#\n"), {{0, 0}}, {{0, 1}}, ""}), InvalidInstance);
  CHECK_NOTHROW(check_instance(testing::yield_instance()));
}

}  // TEST_SUITE
