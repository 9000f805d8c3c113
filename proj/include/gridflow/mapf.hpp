#pragma once

#include "gridflow/grid_map.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridflow {

using Path = std::vector<Cell>;

/// A MAPF problem: N agents with pairwise-distinct free starts and goals.
struct Instance {
  GridMap map;
  std::vector<Cell> starts;
  std::vector<Cell> goals;
  std::string id;

  int num_agents() const { return static_cast<int>(starts.size()); }
};

/// Throws InvalidInstance if starts/goals are off-map, on obstacles, not
/// pairwise distinct, or of different lengths.
void check_instance(const Instance& instance);

/// Per-agent paths. A path holds the agent's cell at t = 0, 1, ..., and the
/// agent implicitly stays on the last cell afterwards.
struct Solution {
  std::vector<Path> paths;

  int num_agents() const { return static_cast<int>(paths.size()); }
  /// Earliest t from which agent i never leaves its final cell.
  int arrival(int agent) const;
  /// Position at time t with the stay-at-target extension.
  Cell at(int agent, int t) const;
  std::vector<Cell> positions(int t) const;
  /// Longest stored path length minus one.
  int horizon() const;

  friend bool operator==(const Solution&, const Solution&) = default;
};

/// Paths cut to their arrival time (trailing waits dropped).
Solution truncated(const Solution& solution);
/// Paths padded or cut so that every path has exactly `length` cells.
Solution extended(const Solution& solution, int length);

enum class CollisionKind { Vertex, Edge };

struct Collision {
  CollisionKind kind;
  int a;  // a < b
  int b;
  int t;  // transition t -> t+1
  Cell from;  // vertex: the shared cell; edge: a's cell before the move
  Cell to;    // vertex: same as from; edge: a's cell after the move

  friend bool operator==(const Collision&, const Collision&) = default;
};

const char* collision_kind_name(CollisionKind kind);

/// Every vertex and edge collision of the joint move before -> after, sorted
/// by (kind, a, b). Each unordered pair appears at most once per kind.
std::vector<Collision> detect_collisions(std::span<const Cell> before, std::span<const Cell> after, int t = 0);

struct Violation {
  std::string kind;  // "agent_count", "start", "goal", "off_map", "disconnected", "vertex_collision", "edge_collision"
  int agent = -1;
  int other = -1;
  int t = -1;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

ValidationReport validate(const Instance& instance, const Solution& solution);

/// Sum of arrival times.
long soc(const Solution& solution);
/// Latest arrival time.
int makespan(const Solution& solution);

/// One row of a MovingAI .scen file. x is the column, y the row.
struct ScenarioEntry {
  int bucket = 0;
  std::string map_name;
  int width = 0;
  int height = 0;
  Cell start;
  Cell goal;
  double optimal = 0.0;

  friend bool operator==(const ScenarioEntry&, const ScenarioEntry&) = default;
};

std::vector<ScenarioEntry> parse_scen(std::string_view text);
std::string render_scen(std::span<const ScenarioEntry> entries);

/// Instance from the first `num_agents` entries of a scenario (all when < 0).
Instance instance_from_scen(const GridMap& map, std::span<const ScenarioEntry> entries, int num_agents,
                            std::string id);
/// Scenario rows for an instance; `optimal` holds the BFS distance.
std::vector<ScenarioEntry> scen_from_instance(const Instance& instance, const std::string& map_name);

}  // namespace gridflow
