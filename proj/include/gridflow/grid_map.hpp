#pragma once

#include "gridflow/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridflow {

/// Static obstacle grid. Vertices are free cells; edges join 4-adjacent free
/// cells, and every free cell has a self-loop (wait).
class GridMap {
 public:
  using Mask = Grid<std::uint8_t>;

  GridMap() = default;
  /// All-free map.
  GridMap(int height, int width);
  /// `cells(r, c) != 0` marks an obstacle.
  explicit GridMap(Mask cells);

  int height() const { return static_cast<int>(cells_.rows()); }
  int width() const { return static_cast<int>(cells_.cols()); }
  int size() const { return height() * width(); }

  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.col >= 0 && c.row < height() && c.col < width();
  }
  bool is_obstacle(Cell c) const { return cells_(c.row, c.col) != 0; }
  bool is_free(Cell c) const { return in_bounds(c) && !is_obstacle(c); }

  void set_obstacle(Cell c, bool obstacle) { cells_(c.row, c.col) = obstacle ? 1 : 0; }

  int index(Cell c) const { return c.row * width() + c.col; }
  Cell cell(int index) const { return {index / width(), index % width()}; }

  const Mask& cells() const { return cells_; }

  int free_count() const;
  std::vector<Cell> free_cells() const;

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.height() == b.height() && a.width() == b.width() && (a.cells_ == b.cells_).all();
  }

 private:
  Mask cells_;
};

/// Parses either a MovingAI map ("type octile" / "height H" / "width W" /
/// "map" followed by H rows; '.' free, '@' 'T' 'O' obstacle) or the compact
/// format (first line "H W", then H rows of '.' and '#').
GridMap parse_map(std::string_view text);

/// MovingAI text with '.' and '@'.
std::string render_map(const GridMap& map);

/// Compact "H W" text with '.' and '#'.
std::string render_compact(const GridMap& map);

/// Row-major '.'/'#' string without separators, as sent in the step protocol.
std::string map_string(const GridMap& map);

/// Shortest-path distances to a goal over 4-connected free cells.
struct DistanceField {
  static constexpr std::int32_t kUnreachable = -1;

  Cell goal;
  Grid<std::int32_t> dist;

  bool reachable(Cell c) const {
    return c.row >= 0 && c.col >= 0 && c.row < dist.rows() && c.col < dist.cols() &&
           dist(c.row, c.col) != kUnreachable;
  }
  std::optional<int> at(Cell c) const {
    if (!reachable(c)) return std::nullopt;
    return dist(c.row, c.col);
  }
};

DistanceField bfs_distance(const GridMap& map, Cell goal);

/// Wait first, then each of Up/Down/Left/Right whose destination is free.
std::vector<std::pair<Action, Cell>> neighbors(const GridMap& map, Cell cell);

}  // namespace gridflow
