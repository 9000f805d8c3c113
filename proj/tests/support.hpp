#pragma once

// Independent oracles and generators shared by the test binaries. Nothing
// here calls into the code paths it is used to check.

#include "gridflow/dataset.hpp"
#include "gridflow/mapf.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <vector>

namespace gridflow::testing {

inline GridMap random_map(int h, int w, double obstacle_prob, std::mt19937_64& rng) {
  std::bernoulli_distribution wall(obstacle_prob);
  GridMap::Mask cells(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) cells(r, c) = wall(rng) ? 1 : 0;
  return GridMap(cells);
}

inline Cell random_free_cell(const GridMap& map, std::mt19937_64& rng) {
  std::vector<Cell> free;
  for (int r = 0; r < map.height(); ++r)
    for (int c = 0; c < map.width(); ++c)
      if (map.cells()(r, c) == 0) free.push_back({r, c});
  return free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
}

/// Unit-weight Dijkstra over an explicit adjacency scan; -1 = unreachable.
inline std::vector<long> dijkstra_oracle(const GridMap& map, Cell goal) {
  const int h = map.height(), w = map.width();
  constexpr long kInf = std::numeric_limits<long>::max();
  std::vector<long> dist(static_cast<std::size_t>(h * w), kInf);
  using Item = std::pair<long, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(goal.row * w + goal.col)] = 0;
  pq.push({0, goal.row * w + goal.col});
  const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[static_cast<std::size_t>(u)]) continue;
    for (int k = 0; k < 4; ++k) {
      const int r = u / w + dr[k], c = u % w + dc[k];
      if (r < 0 || c < 0 || r >= h || c >= w || map.cells()(r, c) != 0) continue;
      const int v = r * w + c;
      if (d + 1 < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = d + 1;
        pq.push({d + 1, v});
      }
    }
  }
  for (auto& d : dist)
    if (d == kInf) d = -1;
  return dist;
}

struct PairCollision {
  int kind;  // 0 vertex, 1 edge
  int a, b;
  auto operator<=>(const PairCollision&) const = default;
};

/// O(N^2) pairwise definition of vertex and edge collisions.
inline std::set<PairCollision> brute_force_collisions(const std::vector<Cell>& before, const std::vector<Cell>& after) {
  std::set<PairCollision> out;
  for (std::size_t i = 0; i < after.size(); ++i)
    for (std::size_t j = i + 1; j < after.size(); ++j) {
      if (after[i] == after[j]) out.insert({0, static_cast<int>(i), static_cast<int>(j)});
      if (after[i] == before[j] && after[j] == before[i] && before[i] != before[j])
        out.insert({1, static_cast<int>(i), static_cast<int>(j)});
    }
  return out;
}

/// Whether every free cell can reach every other (recursive flood fill).
inline bool connected_by_flood_fill(const GridMap& map) {
  const int h = map.height(), w = map.width();
  std::vector<char> seen(static_cast<std::size_t>(h * w), 0);
  int total = 0, start = -1;
  for (int i = 0; i < h * w; ++i)
    if (map.cells()(i / w, i % w) == 0) {
      ++total;
      if (start < 0) start = i;
    }
  if (total == 0) return true;
  int reached = 0;
  std::function<void(int, int)> fill = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= h || c >= w) return;
    if (map.cells()(r, c) != 0 || seen[static_cast<std::size_t>(r * w + c)]) return;
    seen[static_cast<std::size_t>(r * w + c)] = 1;
    ++reached;
    fill(r - 1, c);
    fill(r + 1, c);
    fill(r, c - 1);
    fill(r, c + 1);
  };
  fill(start / w, start % w);
  return reached == total;
}

/// The corridor-with-pocket layout: agent 0 at the left end, agent 1 at the
/// right end, goals swapped; the only passing place is the pocket below
/// column 1.
///   ....
///   #.##
inline Instance yield_instance() {
  GridMap::Mask cells(2, 4);
  cells << 0, 0, 0, 0,  //
      1, 0, 1, 1;
  return Instance{GridMap(cells), {{0, 0}, {0, 3}}, {{0, 3}, {0, 0}}, "yield"};
}

/// Hand-made optimal plan for yield_instance: agent 0 steps into the pocket
/// and lets agent 1 pass.
inline Solution yield_solution() {
  Solution s;
  s.paths = {{{0, 0}, {0, 1}, {1, 1}, {0, 1}, {0, 2}, {0, 3}},  //
             {{0, 3}, {0, 2}, {0, 1}, {0, 0}}};
  return s;
}

/// Random maze instance in the acceptance family.
inline Instance maze_instance(std::uint64_t seed, int size, int agents) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> density(0.3, 0.8), braid(0.3, 1.0);
  const GridMap map = generate_maze(size, size, density(rng), braid(rng), rng());
  return generate_scenario(map, agents, rng(), "maze-" + std::to_string(seed));
}

}  // namespace gridflow::testing
