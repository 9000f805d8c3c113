#include <doctest.h>

#include "gridflow/action_field.hpp"
#include "gridflow/expert.hpp"
#include "gridflow/features.hpp"
#include "support.hpp"

using namespace gridflow;

namespace {

std::vector<DistanceField> fields_for(const GridMap& map, const std::vector<Cell>& goals) {
  std::vector<DistanceField> out;
  for (const Cell g : goals) out.push_back(bfs_distance(map, g));
  return out;
}

// Sign expected by the case table given oracle deltas; 2 marks the random branch.
int expected_sign(long d_neg, long d_pos) {
  if (d_neg >= 0 && d_pos >= 0) return 0;
  if (d_neg >= 0) return 1;
  if (d_pos >= 0) return -1;
  return 2;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("two by four layout has shape (2, 4, 6)") {
  const Instance inst = testing::yield_instance();
  const auto f = build_features<float>(inst.map, inst.starts, inst.goals, fields_for(inst.map, inst.goals),
                                       CounterRng(1));
  CHECK(f.height() == 2);
  CHECK(f.width() == 4);
  CHECK(f.channels() == 6);
  CHECK(f.flat().size() == 48);
  CHECK(f(1, 0, kMapChannel) == 1.0f);
  CHECK(f(0, 0, kCurrentChannel) == 1.0f);
  CHECK(f(0, 3, kCurrentChannel) == 2.0f);
  CHECK(f(0, 3, kGoalChannel) == 1.0f);
  CHECK(f(0, 0, kGoalChannel) == 2.0f);
  CHECK(f(0, 0, kCostChannel) == doctest::Approx(3.0 / 6.0));
  CHECK(f(0, 0, kGradXChannel) == 1.0f);
  CHECK(f(0, 3, kGradXChannel) == -1.0f);
  CHECK(f(0, 1, kCostChannel) == 0.0f);
}

TEST_CASE("flat layout is row-major channel-last") {
  const GridMap m = parse_map("2 3\n.#.\n...\n");
  const std::vector<Cell> pos{{1, 2}}, goals{{0, 0}};
  const auto f = build_features<float>(m, pos, goals, fields_for(m, goals), CounterRng(0));
  const auto flat = f.flat();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 6; ++k) CHECK(flat[static_cast<std::size_t>((r * 3 + c) * 6 + k)] == f(r, c, k));
  CHECK((f.channel(kMapChannel) == m.cells().cast<float>()).all());
}

TEST_CASE("no agents: only the map channel is set") {
  const GridMap m = parse_map("3 3\n.#.\n...\n#..\n");
  const auto f = build_features<float>(m, {}, {}, {}, CounterRng(0));
  CHECK((f.channel(kMapChannel) == m.cells().cast<float>()).all());
  for (int k = 1; k < kNumChannels; ++k) CHECK((f.channel(k) == 0.0f).all());
}

TEST_CASE("agent at its goal has zero cost and zero gradient") {
  const GridMap m(4, 4);
  const std::vector<Cell> pos{{2, 1}};
  const auto f = build_features<float>(m, pos, pos, fields_for(m, pos), CounterRng(0));
  CHECK(f(2, 1, kCostChannel) == 0.0f);
  CHECK(f(2, 1, kGradXChannel) == 0.0f);
  CHECK(f(2, 1, kGradYChannel) == 0.0f);
}

TEST_CASE("index normalization") {
  const GridMap m(2, 2);
  const std::vector<Cell> pos{{0, 0}, {1, 1}}, goals{{0, 1}, {1, 0}};
  const auto f = build_features<double>(m, pos, goals, fields_for(m, goals), CounterRng(0), {true});
  CHECK(f(0, 0, kCurrentChannel) == 0.5);
  CHECK(f(1, 1, kCurrentChannel) == 1.0);
}

TEST_CASE("missing or mismatched distance fields") {
  const GridMap m(2, 2);
  const std::vector<Cell> pos{{0, 0}, {1, 1}}, goals{{0, 1}, {1, 0}};
  CHECK_THROWS_AS(build_features<float>(m, pos, goals, fields_for(m, {goals[0]}), CounterRng(0)),
                  MissingDistanceField);
  CHECK_THROWS_AS(build_features<float>(m, pos, goals, fields_for(m, {goals[1], goals[0]}), CounterRng(0)),
                  MissingDistanceField);
}

TEST_CASE("gradient on a corridor") {
  const GridMap m(1, 3);
  const auto d = bfs_distance(m, {0, 2});
  CHECK(gradient_at(d, {0, 0}, CounterRng(0)) == Gradient{1, 0});
  CHECK(gradient_at(d, {0, 2}, CounterRng(0)) == Gradient{0, 0});
  const auto cut = bfs_distance(parse_map("1 3\n.#.\n"), {0, 0});
  CHECK_THROWS_AS(gradient_at(cut, {0, 2}, CounterRng(0)), UnreachableCell);
}

TEST_CASE("gradient on an open map points at the centre") {
  const GridMap m(5, 5);
  const auto d = bfs_distance(m, {2, 2});
  CHECK(gradient_at(d, {0, 0}, CounterRng(0)) == Gradient{1, 1});
  CHECK(gradient_at(d, {4, 4}, CounterRng(0)) == Gradient{-1, -1});
  CHECK(gradient_at(d, {0, 2}, CounterRng(0)) == Gradient{0, 1});
}

TEST_CASE("gradient tie around a loop is a seeded coin") {
  //   .....
  //   .###.
  //   .....
  const GridMap m = parse_map("3 5\n.....\n.###.\n.....\n");
  const auto d = bfs_distance(m, {2, 2});
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const Gradient g = gradient_at(d, {0, 2}, CounterRng(seed));
    CHECK((g.dx == -1 || g.dx == 1));
    CHECK(g.dy == 0);
    CHECK(gradient_at(d, {0, 2}, CounterRng(seed)) == g);
    seen.insert(g.dx);
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("gradient matches the case table on random maps") {
  std::mt19937_64 rng(21);
  const int dr[] = {0, 0, -1, 1}, dc[] = {-1, 1, 0, 0};  // left, right, up, down
  for (int trial = 0; trial < 2000; ++trial) {
    const GridMap m = testing::random_map(10, 10, 0.3, rng);
    if (m.free_count() == 0) continue;
    const Cell goal = testing::random_free_cell(m, rng);
    const Cell cell = testing::random_free_cell(m, rng);
    const auto oracle = testing::dijkstra_oracle(m, goal);
    const long here = oracle[static_cast<std::size_t>(cell.row * 10 + cell.col)];
    const auto field = bfs_distance(m, goal);
    const CounterRng key(rng());
    if (here < 0) {
      CHECK_THROWS_AS(gradient_at(field, cell, key), UnreachableCell);
      continue;
    }
    long delta[4];
    for (int k = 0; k < 4; ++k) {
      const int r = cell.row + dr[k], c = cell.col + dc[k];
      const bool ok = r >= 0 && c >= 0 && r < 10 && c < 10 && oracle[static_cast<std::size_t>(r * 10 + c)] >= 0;
      delta[k] = ok ? oracle[static_cast<std::size_t>(r * 10 + c)] - here : std::numeric_limits<long>::max();
    }
    const Gradient g = gradient_at(field, cell, key);
    const int ex = expected_sign(delta[0], delta[1]), ey = expected_sign(delta[2], delta[3]);
    if (ex == 2) CHECK((g.dx == 1 || g.dx == -1));
    else CHECK(g.dx == ex);
    if (ey == 2) CHECK((g.dy == 1 || g.dy == -1));
    else CHECK(g.dy == ey);
    CHECK(gradient_at(field, cell, key) == g);
  }
}

TEST_CASE("a nonzero gradient component is a strictly improving move") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = testing::maze_instance(seed, 12, 6);
    for (std::size_t i = 0; i < inst.starts.size(); ++i) {
      const auto d = bfs_distance(inst.map, inst.goals[i]);
      for (const Cell c : inst.map.free_cells()) {
        const Gradient g = gradient_at(d, c, CounterRng(seed));
        const int here = *d.at(c);
        if (g.dx != 0) CHECK(*d.at(step(c, g.dx > 0 ? Action::Right : Action::Left)) < here);
        if (g.dy != 0) CHECK(*d.at(step(c, g.dy > 0 ? Action::Down : Action::Up)) < here);
      }
    }
  }
}

TEST_CASE("features are deterministic for a state and seed") {
  const Instance inst = testing::maze_instance(8, 16, 10);
  const auto d = fields_for(inst.map, inst.goals);
  const auto a = build_features<float>(inst.map, inst.starts, inst.goals, d, state_rng(4, inst.id, 3));
  const auto b = build_features<float>(inst.map, inst.starts, inst.goals, d, state_rng(4, inst.id, 3));
  CHECK(a == b);
}

TEST_CASE("labels of a waiting step") {
  const GridMap m(2, 3);
  const std::vector<Cell> pos{{0, 0}, {1, 2}};
  const auto l = build_label(m, pos, pos, 2);
  CHECK(l.t == 2);
  CHECK(l.at({0, 0}) == Action::Wait);
  CHECK(l.at({1, 2}) == Action::Wait);
  CHECK((l.actions == static_cast<std::uint8_t>(Action::Free)).count() == 4);
}

TEST_CASE("yield plan: a move to the right is labelled Right") {
  const Instance inst = testing::yield_instance();
  const Solution s = testing::yield_solution();
  // After the yield, agent 0 heads right along the top row.
  const auto l = build_label(inst.map, s.positions(3), s.positions(4), 3);
  CHECK(l.at({0, 1}) == Action::Right);
  CHECK(l.at({0, 0}) == Action::Wait);
}

TEST_CASE("invalid transitions") {
  const GridMap m = parse_map("2 3\n..#\n...\n");
  const std::vector<Cell> a{{0, 0}}, wall{{0, 2}};
  CHECK_THROWS_AS(build_label(m, a, std::vector<Cell>{{1, 1}}), InvalidTransition);
  CHECK_THROWS_AS(build_label(m, std::vector<Cell>{{0, 1}}, wall), InvalidTransition);
  const std::vector<Cell> two{{0, 0}, {0, 1}}, swapped{{0, 1}, {0, 0}};
  CHECK_THROWS_AS(build_label(m, two, swapped), InvalidTransition);
  CHECK_THROWS_AS(build_label(m, two, a), InvalidTransition);
}

TEST_CASE("labels of expert transitions replay the solution") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = testing::maze_instance(300 + seed, 16, 8);
    const Solution s = solve_prioritized(inst);
    std::vector<ActionField> labels;
    for (int t = 0; t < makespan(s); ++t) {
      const auto l = build_label(inst.map, s.positions(t), s.positions(t + 1), t);
      for (const Cell c : s.positions(t)) {
        CHECK(l.at(c) != Action::Free);
        CHECK(inst.map.is_free(step(c, l.at(c))));
      }
      CHECK((l.actions == static_cast<std::uint8_t>(Action::Free)).count() == 256 - inst.num_agents());
      labels.push_back(l);
    }
    CHECK(truncated(apply_fields(inst, labels)) == s);
  }
}

TEST_CASE("padding a 2x4 map to 16") {
  const Instance inst = testing::yield_instance();
  const auto f = build_features<float>(inst.map, inst.starts, inst.goals, fields_for(inst.map, inst.goals),
                                       CounterRng(1));
  const auto [padded, rec] = pad_to_valid(f, 16);
  CHECK(padded.height() == 16);
  CHECK(padded.width() == 16);
  CHECK(rec.row_offset == 0);
  CHECK(rec.col_offset == 0);
  CHECK(padded(5, 5, kMapChannel) == 1.0f);
  CHECK(padded(0, 7, kMapChannel) == 1.0f);
  CHECK(padded(5, 5, kCurrentChannel) == 0.0f);
  CHECK(crop(padded, rec) == f);

  const GridMap pm = pad_to_valid(inst.map, 16);
  CHECK(pm.height() == 16);
  CHECK(pm.free_count() == inst.map.free_count());
}

TEST_CASE("padding an aligned map is a no-op") {
  const FeatureTensor<float> x(32, 32);
  const auto [padded, rec] = pad_to_valid(x, 16);
  CHECK(padded.height() == 32);
  CHECK(padded.width() == 32);
  CHECK(crop(padded, rec) == x);
}

TEST_CASE("crop inverts pad for random shapes") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int h = 1 + static_cast<int>(rng() % 40), w = 1 + static_cast<int>(rng() % 40);
    FeatureTensor<float> x(h, w);
    x.data().setRandom();
    const int multiple = 1 + static_cast<int>(rng() % 16);
    const auto [padded, rec] = pad_to_valid(x, multiple);
    CHECK(padded.height() % multiple == 0);
    CHECK(padded.width() % multiple == 0);
    CHECK(crop(padded, rec) == x);
  }
}

}  // TEST_SUITE
