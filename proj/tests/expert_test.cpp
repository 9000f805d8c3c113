#include <doctest.h>

#include "gridflow/expert.hpp"
#include "support.hpp"

using namespace gridflow;

namespace {

std::vector<DistanceField> fields_for(const GridMap& map, const std::vector<Cell>& goals) {
  std::vector<DistanceField> out;
  for (const Cell g : goals) out.push_back(bfs_distance(map, g));
  return out;
}

}  // namespace

TEST_SUITE("expert") {

TEST_CASE("single agent gets a shortest path") {
  const Instance inst{GridMap(8, 8), {{0, 0}}, {{5, 7}}, "single"};
  const Solution s = solve_prioritized(inst);
  CHECK(validate(inst, s).ok);
  CHECK(soc(s) == 12);
}

TEST_CASE("single agent in mazes matches BFS") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = testing::maze_instance(seed, 16, 1);
    const Solution s = solve_prioritized(inst);
    CHECK(validate(inst, s).ok);
    CHECK(soc(s) == *bfs_distance(inst.map, inst.goals[0]).at(inst.starts[0]));
  }
}

TEST_CASE("corridor swap: one agent yields through the pocket") {
  const Instance inst = testing::yield_instance();
  const Solution s = solve_prioritized(inst);
  REQUIRE(validate(inst, s).ok);
  bool pocket = false;
  for (const auto& p : s.paths)
    for (const Cell c : p) pocket = pocket || c == Cell{1, 1};
  CHECK(pocket);
  CHECK(soc(s) >= 8);
}

TEST_CASE("declared successes validate on mazes with 8 agents") {
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = testing::maze_instance(1000 + seed, 16, 8);
    try {
      const Solution s = solve_prioritized(inst);
      CHECK(validate(inst, s).ok);
      ++solved;
    } catch (const Unsolvable&) {
    } catch (const Timeout&) {
    }
  }
  CHECK(solved >= 95);
}

TEST_CASE("same seed, same solution") {
  const Instance inst = testing::maze_instance(42, 16, 12);
  ExpertConfig cfg;
  cfg.seed = 9;
  CHECK(solve_prioritized(inst, cfg) == solve_prioritized(inst, cfg));
}

TEST_CASE("unreachable goal is unsolvable") {
  const Instance inst{parse_map("1 3\n.#.\n"), {{0, 0}}, {{0, 2}}, "cut"};
  CHECK_THROWS_AS(solve_prioritized(inst), Unsolvable);
}

TEST_CASE("dead-locked corridor exhausts restarts") {
  const Instance inst{GridMap(1, 2), {{0, 0}, {0, 1}}, {{0, 1}, {0, 0}}, "swap"};
  ExpertConfig cfg;
  cfg.max_restarts = 3;
  CHECK_THROWS_AS(solve_prioritized(inst, cfg), Unsolvable);
}

TEST_CASE("zero budget times out") {
  const Instance inst = testing::maze_instance(3, 16, 8);
  ExpertConfig cfg;
  cfg.timeout_ms = 0;
  CHECK_THROWS_AS(solve_prioritized(inst, cfg), Timeout);
}

TEST_CASE("planning horizon") {
  const Instance inst{GridMap(3, 5), {{0, 0}}, {{2, 4}}, "h"};
  const auto d = fields_for(inst.map, inst.goals);
  CHECK(planning_horizon(inst, d) == 4 * 8 + 6);
}

TEST_CASE("pibt: single agent steps towards its goal") {
  const GridMap m(1, 3);
  const std::vector<Cell> pos{{0, 1}}, goals{{0, 2}};
  const auto d = fields_for(m, goals);
  const std::vector<double> pri{1.0};
  CHECK(solve_pibt_step(m, pos, pri, d) == std::vector<Action>{Action::Right});
}

TEST_CASE("pibt: head-on pair near a pocket against the full joint action space") {
  //   .....
  //   ##.##
  const GridMap m = parse_map("2 5\n.....\n##.##\n");
  const std::vector<Cell> pos{{0, 1}, {0, 2}}, goals{{0, 4}, {0, 0}};
  const auto d = fields_for(m, goals);
  for (int high = 0; high < 2; ++high) {
    std::vector<double> pri{0.0, 0.0};
    pri[static_cast<std::size_t>(high)] = 1.0;
    const auto acts = solve_pibt_step(m, pos, pri, d);

    int best = 1 << 20;
    for (const Action a0 : kAllActions)
      for (const Action a1 : kAllActions) {
        const std::vector<Cell> next{step(pos[0], a0), step(pos[1], a1)};
        if (!m.is_free(next[0]) || !m.is_free(next[1])) continue;
        if (!testing::brute_force_collisions(pos, next).empty()) continue;
        best = std::min(best, *d[static_cast<std::size_t>(high)].at(next[static_cast<std::size_t>(high)]));
      }
    const std::vector<Cell> next{step(pos[0], acts[0]), step(pos[1], acts[1])};
    CHECK(m.is_free(next[0]));
    CHECK(m.is_free(next[1]));
    CHECK(testing::brute_force_collisions(pos, next).empty());
    const auto hs = static_cast<std::size_t>(high);
    CHECK(*d[hs].at(next[hs]) == best);
    CHECK(*d[hs].at(next[hs]) < *d[hs].at(pos[hs]));
  }
}

TEST_CASE("pibt: random joint steps are collision-free") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10000; ++trial) {
    const GridMap m = testing::random_map(6, 6, 0.25, rng);
    auto free = m.free_cells();
    if (free.size() < 4) continue;
    std::shuffle(free.begin(), free.end(), rng);
    const int n = 1 + static_cast<int>(rng() % std::min<std::size_t>(free.size() / 2, 8));
    std::vector<Cell> pos(free.begin(), free.begin() + n);
    std::shuffle(free.begin(), free.end(), rng);
    std::vector<Cell> goals;
    std::vector<DistanceField> d;
    std::vector<double> pri;
    for (int i = 0; i < n; ++i) {
      const Cell p = pos[static_cast<std::size_t>(i)];
      auto field = bfs_distance(m, p);
      // Pick any cell reachable from p as its goal.
      Cell goal = p;
      for (const Cell c : free)
        if (field.reachable(c)) {
          goal = c;
          break;
        }
      goals.push_back(goal);
      d.push_back(bfs_distance(m, goal));
      pri.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    }
    const auto acts = solve_pibt_step(m, pos, pri, d);
    std::vector<Cell> next;
    for (int i = 0; i < n; ++i) next.push_back(step(pos[static_cast<std::size_t>(i)], acts[static_cast<std::size_t>(i)]));
    for (const Cell c : next) REQUIRE(m.is_free(c));
    REQUIRE(testing::brute_force_collisions(pos, next).empty());
  }
}

TEST_CASE("pibt rejects shared positions") {
  const GridMap m(2, 2);
  const std::vector<Cell> pos{{0, 0}, {0, 0}};
  const auto d = fields_for(m, {{1, 1}, {1, 0}});
  const std::vector<double> pri{1.0, 0.5};
  CHECK_THROWS_AS(solve_pibt_step(m, pos, pri, d), InvalidState);
}

}  // TEST_SUITE
