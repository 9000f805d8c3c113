#pragma once

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace gridflow {

/// Dense row-major 2D array used for every per-cell quantity (obstacles,
/// distances, actions). Row 0 is the top of the map.
template <typename T>
using Grid = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Zero-based (row, col) grid coordinate.
struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Per-cell action. The integer values fix the channel order of the
/// 5-way policy output; Free marks a cell with no agent on it.
enum class Action : std::uint8_t {
  Wait = 0,
  Up = 1,
  Down = 2,
  Left = 3,
  Right = 4,
  Free = 255,
};

inline constexpr int kNumActions = 5;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Wait, Action::Up, Action::Down, Action::Left, Action::Right};

inline constexpr Cell step(Cell c, Action a) {
  switch (a) {
    case Action::Up: return {c.row - 1, c.col};
    case Action::Down: return {c.row + 1, c.col};
    case Action::Left: return {c.row, c.col - 1};
    case Action::Right: return {c.row, c.col + 1};
    default: return c;
  }
}

/// Action that moves `from` to `to`, or Free if the cells are not equal or
/// 4-adjacent.
inline constexpr Action action_between(Cell from, Cell to) {
  const int dr = to.row - from.row;
  const int dc = to.col - from.col;
  if (dr == 0 && dc == 0) return Action::Wait;
  if (dr == -1 && dc == 0) return Action::Up;
  if (dr == 1 && dc == 0) return Action::Down;
  if (dr == 0 && dc == -1) return Action::Left;
  if (dr == 0 && dc == 1) return Action::Right;
  return Action::Free;
}

inline constexpr bool is_move_action(int id) { return id >= 0 && id < kNumActions; }

const char* action_name(Action a);

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define GRIDFLOW_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

GRIDFLOW_DEFINE_ERROR(DimensionMismatch);
GRIDFLOW_DEFINE_ERROR(UnknownGlyph);
GRIDFLOW_DEFINE_ERROR(GoalOnObstacle);
GRIDFLOW_DEFINE_ERROR(CellOnObstacle);
GRIDFLOW_DEFINE_ERROR(LengthMismatch);
GRIDFLOW_DEFINE_ERROR(InvalidInstance);
GRIDFLOW_DEFINE_ERROR(MalformedScenario);
GRIDFLOW_DEFINE_ERROR(Timeout);
GRIDFLOW_DEFINE_ERROR(Unsolvable);
GRIDFLOW_DEFINE_ERROR(InvalidSolution);
GRIDFLOW_DEFINE_ERROR(InvalidState);
GRIDFLOW_DEFINE_ERROR(CollisionAt);
GRIDFLOW_DEFINE_ERROR(AgentNotAtGoal);
GRIDFLOW_DEFINE_ERROR(MissingDistanceField);
GRIDFLOW_DEFINE_ERROR(UnreachableCell);
GRIDFLOW_DEFINE_ERROR(InvalidTransition);
GRIDFLOW_DEFINE_ERROR(TooManyAgents);
GRIDFLOW_DEFINE_ERROR(SinkFull);
GRIDFLOW_DEFINE_ERROR(ExpertFailureRateExceeded);
GRIDFLOW_DEFINE_ERROR(InvalidRecipe);
GRIDFLOW_DEFINE_ERROR(ProtocolViolation);
GRIDFLOW_DEFINE_ERROR(PolicyTimeout);
GRIDFLOW_DEFINE_ERROR(MissingBest);
GRIDFLOW_DEFINE_ERROR(OrderViolation);
GRIDFLOW_DEFINE_ERROR(EmptyGroup);
GRIDFLOW_DEFINE_ERROR(MalformedTrace);

#undef GRIDFLOW_DEFINE_ERROR

}  // namespace gridflow

template <>
struct std::hash<gridflow::Cell> {
  std::size_t operator()(const gridflow::Cell& c) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.row)) << 32) |
                                      static_cast<std::uint32_t>(c.col));
  }
};
