#pragma once

#include "gridflow/mapf.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gridflow {

struct ExpertConfig {
  int timeout_ms = 2000;
  int max_restarts = 50;
  std::uint64_t seed = 0;
};

/// Prioritized planning: agents are planned one after another with
/// space-time A* against a reservation table holding the earlier agents'
/// vertices, edges, and (after arrival) their goal cells forever. When an
/// agent cannot be planned the whole attempt restarts with a fresh seeded
/// random priority order.
///
/// The first attempt orders agents by decreasing start-goal distance.
/// Returned paths are truncated at each agent's arrival time.
///
/// Throws Timeout when `timeout_ms` elapses and Unsolvable after
/// `max_restarts` failed restarts.
Solution solve_prioritized(const Instance& instance, const ExpertConfig& config = {});

/// Time bound of a single space-time search: 4 * (height + width) plus the
/// largest start-goal distance of the instance.
int planning_horizon(const Instance& instance, std::span<const DistanceField> distances);

/// One collision-free joint step by priority inheritance with backtracking.
/// Agents are processed by decreasing priority; each picks the free neighbor
/// closest to its goal, asking lower-priority occupants to move out of the
/// way first and waiting when nothing works.
///
/// `positions` must be collision-free; `distances[i]` is agent i's distance
/// field to its goal. Returns one action per agent.
std::vector<Action> solve_pibt_step(const GridMap& map, std::span<const Cell> positions,
                                    std::span<const double> priorities, std::span<const DistanceField> distances);

}  // namespace gridflow
