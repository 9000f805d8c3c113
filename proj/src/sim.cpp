#include "gridflow/sim.hpp"

#include <chrono>
#include <unordered_map>
#include <unordered_set>

namespace gridflow {

int effective_max_steps(const EpisodeConfig& config, const GridMap& map) {
  return config.max_steps > 0 ? config.max_steps : 4 * (map.height() + map.width());
}

long EpisodeTrace::total_collisions() const {
  long total = 0;
  for (const auto& s : steps) total += static_cast<long>(s.collisions.size());
  return total;
}

Solution EpisodeTrace::induced_solution() const {
  Solution s;
  s.paths.resize(instance.starts.size());
  for (const auto& step : steps)
    for (std::size_t i = 0; i < step.positions.size(); ++i) s.paths[i].push_back(step.positions[i]);
  for (std::size_t i = 0; i < final_positions.size(); ++i) s.paths[i].push_back(final_positions[i]);
  return s;
}

namespace {

Cell fresh_goal(const GridMap& map, const std::vector<Cell>& goals, std::size_t agent, Cell position, Engine& rng) {
  std::unordered_set<Cell> taken(goals.begin(), goals.end());
  taken.erase(goals[agent]);
  taken.insert(position);
  std::vector<Cell> options;
  for (const Cell c : map.free_cells())
    if (!taken.contains(c)) options.push_back(c);
  if (options.empty()) return goals[agent];
  return options[static_cast<std::size_t>(uniform_index(rng, options.size()))];
}

}  // namespace

EpisodeTrace run_episode(const Instance& instance, Policy& policy, const EpisodeConfig& config) {
  check_instance(instance);
  const GridMap& map = instance.map;
  const int max_steps = effective_max_steps(config, map);
  const std::chrono::milliseconds timeout(config.policy_timeout_ms);

  EpisodeTrace trace;
  trace.instance = instance;
  trace.policy = policy.name();
  trace.config = config;
  trace.config.max_steps = max_steps;

  std::vector<Cell> positions = instance.starts;
  std::vector<Cell> goals = instance.goals;
  Engine goal_rng(splitmix64(config.goal_seed ^ 0x676f616cULL));
  std::unordered_map<Cell, DistanceField> distances;

  const bool want_features = parse_ready(
      policy.request(init_message(map, instance.num_agents(), config.mode, config.select, config.seed), timeout));

  for (int t = 0; t < max_steps; ++t) {
    if (config.mode == EpisodeMode::MAPF && positions == goals) break;

    std::optional<FeatureTensor<float>> features;
    if (want_features) {
      std::vector<DistanceField> fields;
      for (const Cell g : goals) {
        auto it = distances.find(g);
        if (it == distances.end()) it = distances.emplace(g, bfs_distance(map, g)).first;
        fields.push_back(it->second);
      }
      features = build_features<float>(map, positions, goals, fields, state_rng(config.seed, instance.id, t));
    }
    const Json obs = obs_message(t, positions, goals, features ? &*features : nullptr);

    const auto started = std::chrono::steady_clock::now();
    const Json reply = policy.request(obs, timeout);
    const double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    const ActionField field = parse_act(reply, t, map, positions);
    StepResult result = apply_field(map, positions, field, config.collision);

    StepRecord record;
    record.t = t;
    record.positions = positions;
    record.goals = goals;
    record.actions = std::move(result.proposed);
    record.collisions = std::move(result.collisions);
    record.invalid_actions = result.invalid_actions;
    record.latency_ms = latency;

    if (config.collision == CollisionMode::Strict && !record.collisions.empty()) {
      trace.steps.push_back(std::move(record));
      trace.aborted = true;
      break;
    }
    if (!detect_collisions(positions, result.positions, t).empty())
      throw InvalidState("step " + std::to_string(t) + " produced a colliding occupancy");
    positions = std::move(result.positions);

    if (config.mode == EpisodeMode::LMAPF) {
      for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] != goals[i]) continue;
        record.completed.push_back(static_cast<int>(i));
        ++trace.completions;
        goals[i] = fresh_goal(map, goals, i, positions[i], goal_rng);
      }
    }
    trace.steps.push_back(std::move(record));
  }

  trace.final_positions = positions;
  trace.final_goals = goals;
  trace.success = config.mode == EpisodeMode::MAPF && !trace.aborted && positions == goals;
  policy.notify(end_message(trace.length(), trace.success));
  return trace;
}

}  // namespace gridflow
