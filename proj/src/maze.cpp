#include "gridflow/dataset.hpp"
#include "gridflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace gridflow {

namespace {

constexpr std::array<Action, 4> kMoves = {Action::Up, Action::Down, Action::Left, Action::Right};

// Component label per cell, -1 on obstacles.
std::vector<int> label_components(const GridMap& map, int* count = nullptr) {
  std::vector<int> label(static_cast<std::size_t>(map.size()), -1);
  int next = 0;
  for (int idx = 0; idx < map.size(); ++idx) {
    if (label[static_cast<std::size_t>(idx)] != -1 || map.is_obstacle(map.cell(idx))) continue;
    std::deque<int> open{idx};
    label[static_cast<std::size_t>(idx)] = next;
    while (!open.empty()) {
      const Cell u = map.cell(open.front());
      open.pop_front();
      for (Action a : kMoves) {
        const Cell v = step(u, a);
        if (!map.is_free(v) || label[static_cast<std::size_t>(map.index(v))] != -1) continue;
        label[static_cast<std::size_t>(map.index(v))] = next;
        open.push_back(map.index(v));
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

int free_neighbor_count(const GridMap& map, Cell c) {
  int n = 0;
  for (Action a : kMoves) n += map.is_free(step(c, a)) ? 1 : 0;
  return n;
}

// Whether turning free cell `c` into an obstacle keeps the free region connected.
bool removable(GridMap& map, Cell c) {
  if (free_neighbor_count(map, c) <= 1) return true;
  map.set_obstacle(c, true);
  int components = 0;
  label_components(map, &components);
  map.set_obstacle(c, false);
  return components <= 1;
}

void carve_lattice(GridMap& map, Engine& rng) {
  const int lr = (map.height() + 1) / 2;
  const int lc = (map.width() + 1) / 2;
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(lr * lc), 0);
  auto lattice = [&](int i) { return Cell{2 * (i / lc), 2 * (i % lc)}; };

  const int first = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(lr * lc)));
  std::vector<int> stack{first};
  visited[static_cast<std::size_t>(first)] = 1;
  map.set_obstacle(lattice(first), false);
  while (!stack.empty()) {
    const int cur = stack.back();
    const int r = cur / lc, c = cur % lc;
    std::vector<int> options;
    if (r > 0 && !visited[static_cast<std::size_t>(cur - lc)]) options.push_back(cur - lc);
    if (r + 1 < lr && !visited[static_cast<std::size_t>(cur + lc)]) options.push_back(cur + lc);
    if (c > 0 && !visited[static_cast<std::size_t>(cur - 1)]) options.push_back(cur - 1);
    if (c + 1 < lc && !visited[static_cast<std::size_t>(cur + 1)]) options.push_back(cur + 1);
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    const int nxt = options[static_cast<std::size_t>(uniform_index(rng, options.size()))];
    const Cell a = lattice(cur), b = lattice(nxt);
    map.set_obstacle({(a.row + b.row) / 2, (a.col + b.col) / 2}, false);
    map.set_obstacle(b, false);
    visited[static_cast<std::size_t>(nxt)] = 1;
    stack.push_back(nxt);
  }
}

void braid_dead_ends(GridMap& map, double braid, Engine& rng) {
  std::vector<Cell> lattice;
  for (int r = 0; r < map.height(); r += 2)
    for (int c = 0; c < map.width(); c += 2) lattice.push_back({r, c});
  shuffle(lattice, rng);
  for (const Cell cell : lattice) {
    if (free_neighbor_count(map, cell) != 1) continue;
    if (uniform_real(rng) >= braid) continue;
    std::vector<Cell> walls;
    for (Action a : kMoves) {
      const Cell wall = step(cell, a);
      const Cell beyond = step(wall, a);
      if (map.in_bounds(beyond) && map.is_obstacle(wall) && map.is_free(beyond)) walls.push_back(wall);
    }
    if (!walls.empty()) map.set_obstacle(walls[static_cast<std::size_t>(uniform_index(rng, walls.size()))], false);
  }
}

void adjust_density(GridMap& map, int target_obstacles, Engine& rng) {
  int obstacles = map.size() - map.free_count();
  std::vector<Cell> all;
  for (int idx = 0; idx < map.size(); ++idx) all.push_back(map.cell(idx));
  shuffle(all, rng);

  bool changed = true;
  while (obstacles > target_obstacles && changed) {
    changed = false;
    for (const Cell c : all) {
      if (obstacles <= target_obstacles) break;
      if (!map.is_obstacle(c) || free_neighbor_count(map, c) == 0) continue;
      map.set_obstacle(c, false);
      --obstacles;
      changed = true;
    }
  }
  changed = true;
  while (obstacles < target_obstacles && changed) {
    changed = false;
    for (const Cell c : all) {
      if (obstacles >= target_obstacles || map.size() - obstacles <= 1) break;
      if (map.is_obstacle(c) || !removable(map, c)) continue;
      map.set_obstacle(c, true);
      ++obstacles;
      changed = true;
    }
  }
}

}  // namespace

GridMap generate_maze(int height, int width, double wall_density, double braid, std::uint64_t seed) {
  if (height < 4 || width < 4) throw DimensionMismatch("maze dimensions must be at least 4x4");
  wall_density = std::clamp(wall_density, 0.0, 1.0);
  braid = std::clamp(braid, 0.0, 1.0);
  Engine rng(splitmix64(seed));

  GridMap map(GridMap::Mask::Ones(height, width));
  carve_lattice(map, rng);
  braid_dead_ends(map, braid, rng);
  const int target = static_cast<int>(std::lround(target_obstacle_fraction(wall_density) * map.size()));
  adjust_density(map, target, rng);
  return map;
}

std::vector<int> free_components(const GridMap& map) {
  int count = 0;
  const auto label = label_components(map, &count);
  std::vector<int> sizes(static_cast<std::size_t>(count), 0);
  for (int l : label)
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

Instance generate_scenario(const GridMap& map, int num_agents, std::uint64_t seed, std::string id) {
  auto cells = map.free_cells();
  if (num_agents < 0 || static_cast<std::size_t>(num_agents) > cells.size())
    throw TooManyAgents(std::to_string(num_agents) + " agents requested, map has " + std::to_string(cells.size()) +
                        " free cells");
  const auto label = label_components(map);
  Engine rng(splitmix64(seed ^ 0x6a09e667f3bcc909ULL));

  Instance inst{map, {}, {}, std::move(id)};
  shuffle(cells, rng);
  inst.starts.assign(cells.begin(), cells.begin() + num_agents);

  shuffle(cells, rng);
  std::vector<std::uint8_t> used(static_cast<std::size_t>(map.size()), 0);
  for (const Cell s : inst.starts) {
    const int component = label[static_cast<std::size_t>(map.index(s))];
    auto it = std::find_if(cells.begin(), cells.end(), [&](Cell g) {
      return !used[static_cast<std::size_t>(map.index(g))] && label[static_cast<std::size_t>(map.index(g))] == component;
    });
    if (it == cells.end()) throw TooManyAgents("no reachable goal left for a start in a small region");
    used[static_cast<std::size_t>(map.index(*it))] = 1;
    inst.goals.push_back(*it);
  }
  return inst;
}

}  // namespace gridflow
