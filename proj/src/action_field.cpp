#include "gridflow/action_field.hpp"

#include <unordered_set>

namespace gridflow {

std::vector<ActionField> fields_from_solution(const Instance& instance, const Solution& solution) {
  const auto report = validate(instance, solution);
  if (!report.ok)
    throw InvalidSolution("solution fails validation: " + report.violations.front().kind + " (" +
                          report.violations.front().detail + ")");
  const int span = makespan(solution);
  std::vector<ActionField> fields;
  fields.reserve(static_cast<std::size_t>(span));
  for (int t = 0; t < span; ++t) {
    ActionField f(instance.map.height(), instance.map.width(), t);
    for (int i = 0; i < solution.num_agents(); ++i) f.set(solution.at(i, t), action_between(solution.at(i, t), solution.at(i, t + 1)));
    fields.push_back(std::move(f));
  }
  return fields;
}

ActionField field_from_actions(const GridMap& map, std::span<const Cell> positions, std::span<const Action> actions,
                               int t) {
  if (positions.size() != actions.size()) throw LengthMismatch("one action per agent required");
  ActionField f(map.height(), map.width(), t);
  for (std::size_t i = 0; i < positions.size(); ++i) f.set(positions[i], actions[i]);
  return f;
}

StepResult apply_field(const GridMap& map, std::span<const Cell> positions, const ActionField& field,
                       CollisionMode mode) {
  if (field.height() != map.height() || field.width() != map.width())
    throw DimensionMismatch("field is " + std::to_string(field.height()) + "x" + std::to_string(field.width()) +
                            ", map is " + std::to_string(map.height()) + "x" + std::to_string(map.width()));
  {
    std::unordered_set<Cell> seen;
    for (const Cell c : positions) {
      if (!map.in_bounds(c)) throw InvalidState("agent position off the map");
      if (!seen.insert(c).second) throw InvalidState("two agents share a cell before the step");
    }
  }

  StepResult out;
  const std::size_t n = positions.size();
  out.proposed.resize(n);
  std::vector<Cell> target(n);
  for (std::size_t i = 0; i < n; ++i) {
    Action a = field.at(positions[i]);
    if (!is_move_action(static_cast<int>(a)) || !map.is_free(step(positions[i], a))) {
      ++out.invalid_actions;
      a = Action::Wait;
    }
    out.proposed[i] = a;
    target[i] = step(positions[i], a);
  }

  out.collisions = detect_collisions(positions, target, field.t);
  if (out.collisions.empty()) {
    out.positions = std::move(target);
    return out;
  }
  if (mode == CollisionMode::Strict) {
    out.positions.assign(positions.begin(), positions.end());
    return out;
  }

  auto pending = out.collisions;
  while (!pending.empty()) {
    bool progressed = false;
    for (const auto& c : pending) {
      for (int agent : {c.a, c.b}) {
        const auto i = static_cast<std::size_t>(agent);
        if (target[i] != positions[i]) {
          target[i] = positions[i];
          progressed = true;
        }
      }
    }
    if (!progressed) throw InvalidState("collision cancellation made no progress");
    pending = detect_collisions(positions, target, field.t);
  }
  out.positions = std::move(target);
  return out;
}

Solution apply_fields(const Instance& instance, std::span<const ActionField> fields) {
  std::vector<Cell> positions = instance.starts;
  Solution solution;
  solution.paths.resize(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) solution.paths[i].push_back(positions[i]);

  for (const auto& field : fields) {
    auto result = apply_field(instance.map, positions, field, CollisionMode::Strict);
    if (!result.collisions.empty())
      throw CollisionAt("collision at t=" + std::to_string(field.t) + " between agents " +
                        std::to_string(result.collisions.front().a) + " and " + std::to_string(result.collisions.front().b));
    positions = std::move(result.positions);
    for (std::size_t i = 0; i < positions.size(); ++i) solution.paths[i].push_back(positions[i]);
  }
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (positions[i] != instance.goals[i])
      throw AgentNotAtGoal("agent " + std::to_string(i) + " ends away from its goal");
  return solution;
}

}  // namespace gridflow
