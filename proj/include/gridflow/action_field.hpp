#pragma once

#include "gridflow/mapf.hpp"

#include <span>
#include <vector>

namespace gridflow {

/// One timestep of a plan as a grid of cell actions: every agent-occupied
/// cell holds exactly one of Wait/Up/Down/Left/Right, all other cells Free.
/// A sequence of fields, one per timestep, encodes a whole solution.
struct ActionField {
  int t = 0;
  Grid<std::uint8_t> actions;

  ActionField() = default;
  ActionField(int height, int width, int timestep)
      : t(timestep), actions(Grid<std::uint8_t>::Constant(height, width, static_cast<std::uint8_t>(Action::Free))) {}

  int height() const { return static_cast<int>(actions.rows()); }
  int width() const { return static_cast<int>(actions.cols()); }
  Action at(Cell c) const { return static_cast<Action>(actions(c.row, c.col)); }
  void set(Cell c, Action a) { actions(c.row, c.col) = static_cast<std::uint8_t>(a); }

  friend bool operator==(const ActionField& a, const ActionField& b) {
    return a.t == b.t && a.actions.rows() == b.actions.rows() && a.actions.cols() == b.actions.cols() &&
           (a.actions == b.actions).all();
  }
};

enum class CollisionMode { Strict, Tolerant };

struct StepResult {
  std::vector<Cell> positions;
  /// Strict: collisions of the proposed move (nobody moved if non-empty).
  /// Tolerant: collisions of the originally proposed move only.
  std::vector<Collision> collisions;
  /// Occupied cells holding Free, or an action into a wall / off the map.
  /// Such agents wait.
  int invalid_actions = 0;
  /// Action each agent read from the field, after invalid ones became Wait.
  std::vector<Action> proposed;
};

/// Fields for t = 0 .. makespan-1. Throws InvalidSolution when `solution`
/// fails validation.
std::vector<ActionField> fields_from_solution(const Instance& instance, const Solution& solution);

/// Field with `actions[i]` written at agent i's cell and Free elsewhere.
ActionField field_from_actions(const GridMap& map, std::span<const Cell> positions, std::span<const Action> actions,
                               int t = 0);

/// Advances agents by one timestep, each reading the action at its own cell.
///
/// Strict: the proposed joint move is returned unchanged if collision-free;
/// otherwise nobody moves and the collisions are reported.
/// Tolerant: both participants of every collision are cancelled (they stay),
/// repeated until no collision remains; only the first round's collisions
/// are counted.
///
/// `positions` must be distinct (InvalidState otherwise).
StepResult apply_field(const GridMap& map, std::span<const Cell> positions, const ActionField& field,
                       CollisionMode mode);

/// Replays fields from the instance starts in Strict mode. Throws CollisionAt
/// on the first colliding step and AgentNotAtGoal if an agent ends elsewhere.
/// Paths have fields.size() + 1 cells each.
Solution apply_fields(const Instance& instance, std::span<const ActionField> fields);

}  // namespace gridflow
