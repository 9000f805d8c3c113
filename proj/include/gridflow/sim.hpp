#pragma once

#include "gridflow/policies.hpp"

#include <string>
#include <vector>

namespace gridflow {

struct EpisodeConfig {
  EpisodeMode mode = EpisodeMode::MAPF;
  /// Step limit; <= 0 means 4 * (height + width).
  int max_steps = 0;
  CollisionMode collision = CollisionMode::Strict;
  Selection select = Selection::Argmax;
  /// Forwarded to the policy and used for feature tie-breaks.
  std::uint64_t seed = 0;
  /// Seeds lifelong goal reassignment.
  std::uint64_t goal_seed = 0;
  int policy_timeout_ms = 30000;
};

int effective_max_steps(const EpisodeConfig& config, const GridMap& map);

struct StepRecord {
  int t = 0;
  std::vector<Cell> positions;  // before the step
  std::vector<Cell> goals;      // in force during the step
  std::vector<Action> actions;  // read from the field; invalid ones as Wait
  std::vector<Collision> collisions;
  int invalid_actions = 0;
  double latency_ms = 0.0;
  std::vector<int> completed;   // lifelong: agents that reached their goal
};

struct EpisodeTrace {
  Instance instance;
  std::string map_name;
  std::string map_type;
  std::string policy;
  EpisodeConfig config;
  std::vector<StepRecord> steps;
  std::vector<Cell> final_positions;
  std::vector<Cell> final_goals;
  bool success = false;
  /// Strict mode stopped the episode on a collision.
  bool aborted = false;
  int completions = 0;

  int length() const { return static_cast<int>(steps.size()); }
  long total_collisions() const;
  /// Agent positions over time, one path cell per step plus the final one.
  Solution induced_solution() const;
};

/// Runs one closed-loop episode. In MAPF mode the episode ends when all
/// agents stand on their goals (success) or after max_steps. In lifelong
/// mode it runs exactly max_steps; an agent reaching its goal counts a
/// completion and receives a fresh uniformly random free goal that is not
/// another agent's goal and not its own cell.
///
/// Throws ProtocolViolation or PolicyTimeout.
EpisodeTrace run_episode(const Instance& instance, Policy& policy, const EpisodeConfig& config);

}  // namespace gridflow
