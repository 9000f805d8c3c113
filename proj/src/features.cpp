#include "gridflow/features.hpp"

#include <limits>

namespace gridflow {

namespace {

constexpr long kInfinity = std::numeric_limits<long>::max();

long delta(const DistanceField& field, Cell from, Action a) {
  const auto d = field.at(step(from, a));
  if (!d) return kInfinity;
  return static_cast<long>(*d) - field.dist(from.row, from.col);
}

int axis_sign(long toward_negative, long toward_positive, const CounterRng& rng, std::uint64_t counter) {
  const bool neg = toward_negative < 0;
  const bool pos = toward_positive < 0;
  if (!neg && !pos) return 0;
  if (pos && !neg) return 1;
  if (neg && !pos) return -1;
  return rng.sign(counter);
}

}  // namespace

Gradient gradient_at(const DistanceField& field, Cell cell, const CounterRng& rng) {
  if (!field.reachable(cell))
    throw UnreachableCell("cell (" + std::to_string(cell.row) + "," + std::to_string(cell.col) +
                          ") has no distance to the goal");
  const std::uint64_t counter =
      ((static_cast<std::uint64_t>(cell.row) << 24) | static_cast<std::uint64_t>(cell.col)) << 1;
  return {axis_sign(delta(field, cell, Action::Left), delta(field, cell, Action::Right), rng, counter),
          axis_sign(delta(field, cell, Action::Up), delta(field, cell, Action::Down), rng, counter | 1U)};
}

LabelField build_label(const GridMap& map, std::span<const Cell> current, std::span<const Cell> next, int t) {
  if (current.size() != next.size()) throw InvalidTransition("position arrays differ in length");
  LabelField label(map.height(), map.width(), t);
  for (std::size_t i = 0; i < current.size(); ++i) {
    const Action a = action_between(current[i], next[i]);
    if (a == Action::Free || !map.is_free(current[i]) || !map.is_free(next[i]))
      throw InvalidTransition("agent " + std::to_string(i) + " makes an invalid move at t=" + std::to_string(t));
    label.set(current[i], a);
  }
  const auto collisions = detect_collisions(current, next, t);
  if (!collisions.empty())
    throw InvalidTransition(std::string(collision_kind_name(collisions.front().kind)) + " collision between agents " +
                            std::to_string(collisions.front().a) + " and " + std::to_string(collisions.front().b));
  return label;
}

GridMap pad_to_valid(const GridMap& map, int multiple) {
  if (multiple < 1) throw DimensionMismatch("padding multiple must be >= 1");
  const int h = (map.height() + multiple - 1) / multiple * multiple;
  const int w = (map.width() + multiple - 1) / multiple * multiple;
  GridMap::Mask cells = GridMap::Mask::Ones(h, w);
  cells.topLeftCorner(map.height(), map.width()) = map.cells();
  return GridMap(std::move(cells));
}

}  // namespace gridflow
