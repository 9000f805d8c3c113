#include "gridflow/expert.hpp"

#include "gridflow/rng.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <tuple>

namespace gridflow {

namespace {

using Clock = std::chrono::steady_clock;
constexpr int kNever = std::numeric_limits<int>::max();

// Space-time reservations of already planned agents, indexed t * cells + cell.
class ReservationTable {
 public:
  ReservationTable(int cells, int horizon)
      : cells_(cells),
        horizon_(horizon),
        vertex_(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(cells), 0),
        incoming_(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(cells), -1),
        goal_from_(static_cast<std::size_t>(cells), kNever),
        last_visit_(static_cast<std::size_t>(cells), -1) {}

  // `path` is cell indices truncated at arrival.
  void reserve(const std::vector<int>& path) {
    const int arrival = static_cast<int>(path.size()) - 1;
    for (int t = 0; t <= arrival; ++t) {
      const int v = path[static_cast<std::size_t>(t)];
      vertex_[slot(t, v)] = 1;
      last_visit_[static_cast<std::size_t>(v)] = std::max(last_visit_[static_cast<std::size_t>(v)], t);
      if (t < arrival) incoming_[slot(t, path[static_cast<std::size_t>(t + 1)])] = v;
    }
    goal_from_[static_cast<std::size_t>(path.back())] = arrival;
  }

  bool vertex_blocked(int t, int v) const {
    if (t >= goal_from_[static_cast<std::size_t>(v)]) return true;
    return t <= horizon_ && vertex_[slot(t, v)] != 0;
  }

  // Moving u -> v during t -> t+1 swaps with an earlier agent moving v -> u.
  bool edge_blocked(int t, int u, int v) const { return u != v && incoming_[slot(t, u)] == v; }

  int last_visit(int v) const { return last_visit_[static_cast<std::size_t>(v)]; }

 private:
  std::size_t slot(int t, int v) const {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(cells_) + static_cast<std::size_t>(v);
  }

  int cells_;
  int horizon_;
  std::vector<std::uint8_t> vertex_;
  std::vector<int> incoming_;
  std::vector<int> goal_from_;
  std::vector<int> last_visit_;
};

struct Deadline {
  Clock::time_point end;
  void check() const {
    if (Clock::now() >= end) throw Timeout("expert exceeded its time budget");
  }
};

// Space-time A* for one agent. Returns cell indices truncated at arrival, or
// nullopt when no path exists within the horizon.
std::optional<std::vector<int>> space_time_astar(const GridMap& map, int start, int goal, const DistanceField& h,
                                                 const ReservationTable& table, int horizon, const Deadline& deadline) {
  struct Node {
    int cell;
    int t;
    int parent;
  };
  struct Entry {
    int f, h, action;
    std::uint64_t seq;
    int node;
    bool operator>(const Entry& o) const {
      return std::tie(f, h, action, seq) > std::tie(o.f, o.h, o.action, o.seq);
    }
  };

  const int cells = map.size();
  auto heuristic = [&](int v) { return h.dist(v / map.width(), v % map.width()); };
  if (heuristic(start) == DistanceField::kUnreachable) return std::nullopt;
  if (table.vertex_blocked(0, start)) return std::nullopt;

  std::vector<Node> nodes;
  std::vector<std::uint8_t> closed(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(cells), 0);
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t seq = 0;
  nodes.push_back({start, 0, -1});
  open.push({heuristic(start), heuristic(start), 0, seq++, 0});

  std::size_t expansions = 0;
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const Node cur = nodes[static_cast<std::size_t>(top.node)];
    const auto key = static_cast<std::size_t>(cur.t) * static_cast<std::size_t>(cells) + static_cast<std::size_t>(cur.cell);
    if (closed[key]) continue;
    closed[key] = 1;
    if ((++expansions & 1023U) == 0) deadline.check();

    if (cur.cell == goal && cur.t > table.last_visit(goal)) {
      std::vector<int> path(static_cast<std::size_t>(cur.t) + 1);
      for (int n = top.node; n >= 0; n = nodes[static_cast<std::size_t>(n)].parent)
        path[static_cast<std::size_t>(nodes[static_cast<std::size_t>(n)].t)] = nodes[static_cast<std::size_t>(n)].cell;
      return path;
    }
    if (cur.t >= horizon) continue;

    const Cell here = map.cell(cur.cell);
    for (Action a : kAllActions) {
      const Cell there = step(here, a);
      if (!map.is_free(there)) continue;
      const int v = map.index(there);
      const int t = cur.t + 1;
      const int hv = heuristic(v);
      if (t + hv > horizon) continue;
      if (closed[static_cast<std::size_t>(t) * static_cast<std::size_t>(cells) + static_cast<std::size_t>(v)]) continue;
      if (table.vertex_blocked(t, v) || table.edge_blocked(cur.t, cur.cell, v)) continue;
      nodes.push_back({v, t, top.node});
      open.push({t + hv, hv, static_cast<int>(a), seq++, static_cast<int>(nodes.size()) - 1});
    }
  }
  return std::nullopt;
}

}  // namespace

int planning_horizon(const Instance& instance, std::span<const DistanceField> distances) {
  int longest = 0;
  for (int i = 0; i < instance.num_agents(); ++i)
    longest = std::max(longest, distances[static_cast<std::size_t>(i)].at(instance.starts[static_cast<std::size_t>(i)]).value_or(0));
  return 4 * (instance.map.height() + instance.map.width()) + longest;
}

Solution solve_prioritized(const Instance& instance, const ExpertConfig& config) {
  check_instance(instance);
  const Deadline deadline{Clock::now() + std::chrono::milliseconds(config.timeout_ms)};
  const int n = instance.num_agents();
  const GridMap& map = instance.map;

  std::vector<DistanceField> distances;
  distances.reserve(static_cast<std::size_t>(n));
  for (const Cell g : instance.goals) distances.push_back(bfs_distance(map, g));
  for (int i = 0; i < n; ++i)
    if (!distances[static_cast<std::size_t>(i)].reachable(instance.starts[static_cast<std::size_t>(i)]))
      throw Unsolvable("agent " + std::to_string(i) + " cannot reach its goal (restarts: 0)");

  const int horizon = planning_horizon(instance, distances);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return *distances[static_cast<std::size_t>(a)].at(instance.starts[static_cast<std::size_t>(a)]) >
           *distances[static_cast<std::size_t>(b)].at(instance.starts[static_cast<std::size_t>(b)]);
  });
  Engine rng(splitmix64(config.seed));

  int failed_agent = -1;
  for (int attempt = 0; attempt <= config.max_restarts; ++attempt) {
    if (attempt > 0) shuffle(order, rng);
    deadline.check();

    ReservationTable table(map.size(), horizon);
    std::vector<std::vector<int>> planned(static_cast<std::size_t>(n));
    bool ok = true;
    for (int agent : order) {
      const auto i = static_cast<std::size_t>(agent);
      auto path = space_time_astar(map, map.index(instance.starts[i]), map.index(instance.goals[i]), distances[i],
                                   table, horizon, deadline);
      if (!path) {
        ok = false;
        failed_agent = agent;
        break;
      }
      table.reserve(*path);
      planned[i] = std::move(*path);
    }
    if (!ok) continue;

    Solution solution;
    solution.paths.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int v : planned[static_cast<std::size_t>(i)]) solution.paths[static_cast<std::size_t>(i)].push_back(map.cell(v));
    return solution;
  }
  throw Unsolvable("agent " + std::to_string(failed_agent) + " could not be planned (restarts: " +
                   std::to_string(config.max_restarts) + ")");
}

std::vector<Action> solve_pibt_step(const GridMap& map, std::span<const Cell> positions,
                                    std::span<const double> priorities, std::span<const DistanceField> distances) {
  const int n = static_cast<int>(positions.size());
  if (static_cast<int>(priorities.size()) != n || static_cast<int>(distances.size()) != n)
    throw LengthMismatch("positions, priorities and distance fields must have one entry per agent");

  constexpr int kNone = -1;
  std::vector<int> occupied_now(static_cast<std::size_t>(map.size()), kNone);
  std::vector<int> occupied_next(static_cast<std::size_t>(map.size()), kNone);
  std::vector<int> next(static_cast<std::size_t>(n), kNone);
  for (int i = 0; i < n; ++i) {
    const int v = map.index(positions[static_cast<std::size_t>(i)]);
    if (occupied_now[static_cast<std::size_t>(v)] != kNone) throw InvalidState("positions are not collision-free");
    occupied_now[static_cast<std::size_t>(v)] = i;
  }

  auto pibt = [&](auto&& self, int ai, int parent) -> bool {
    const Cell here = positions[static_cast<std::size_t>(ai)];
    const auto& dist = distances[static_cast<std::size_t>(ai)];
    auto candidates = neighbors(map, here);
    auto key = [&](const std::pair<Action, Cell>& c) {
      const int d = dist.at(c.second).value_or(std::numeric_limits<int>::max());
      const bool taken = occupied_now[static_cast<std::size_t>(map.index(c.second))] != kNone && c.second != here;
      return std::tuple(d, taken, static_cast<int>(c.first));
    };
    std::sort(candidates.begin(), candidates.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });

    for (const auto& [action, cell] : candidates) {
      const int v = map.index(cell);
      if (occupied_next[static_cast<std::size_t>(v)] != kNone) continue;
      if (parent != kNone && cell == positions[static_cast<std::size_t>(parent)]) continue;
      occupied_next[static_cast<std::size_t>(v)] = ai;
      next[static_cast<std::size_t>(ai)] = v;
      const int ak = occupied_now[static_cast<std::size_t>(v)];
      if (ak != kNone && ak != ai && next[static_cast<std::size_t>(ak)] == kNone) {
        if (!self(self, ak, ai)) continue;
      }
      return true;
    }
    const int v = map.index(here);
    occupied_next[static_cast<std::size_t>(v)] = ai;
    next[static_cast<std::size_t>(ai)] = v;
    return false;
  };

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return priorities[static_cast<std::size_t>(a)] > priorities[static_cast<std::size_t>(b)];
  });
  for (int ai : order)
    if (next[static_cast<std::size_t>(ai)] == kNone) pibt(pibt, ai, kNone);

  std::vector<Action> actions(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    actions[static_cast<std::size_t>(i)] = action_between(positions[static_cast<std::size_t>(i)], map.cell(next[static_cast<std::size_t>(i)]));
  return actions;
}

}  // namespace gridflow
