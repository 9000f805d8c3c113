#include "gridflow/grid_map.hpp"

#include <charconv>
#include <deque>
#include <sstream>

namespace gridflow {

const char* action_name(Action a) {
  switch (a) {
    case Action::Wait: return "wait";
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Free: return "free";
  }
  return "?";
}

GridMap::GridMap(int height, int width) {
  if (height <= 0 || width <= 0) throw DimensionMismatch("map dimensions must be positive");
  cells_ = Mask::Zero(height, width);
}

GridMap::GridMap(Mask cells) : cells_(std::move(cells)) {
  if (cells_.rows() <= 0 || cells_.cols() <= 0) throw DimensionMismatch("map dimensions must be positive");
}

int GridMap::free_count() const { return static_cast<int>((cells_ == 0).count()); }

std::vector<Cell> GridMap::free_cells() const {
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(free_count()));
  for (int r = 0; r < height(); ++r)
    for (int c = 0; c < width(); ++c)
      if (cells_(r, c) == 0) out.push_back({r, c});
  return out;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

int parse_positive(std::string_view s, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v <= 0)
    throw DimensionMismatch(std::string("bad ") + what + ": '" + std::string(s) + "'");
  return v;
}

std::pair<std::string_view, std::string_view> key_value(std::string_view line) {
  const auto sp = line.find(' ');
  if (sp == std::string_view::npos) return {line, {}};
  std::string_view value = line.substr(sp + 1);
  while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
  while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
  return {line.substr(0, sp), value};
}

GridMap parse_rows(const std::vector<std::string_view>& lines, std::size_t first, int height, int width,
                   bool moving_ai) {
  if (lines.size() - first != static_cast<std::size_t>(height))
    throw DimensionMismatch("expected " + std::to_string(height) + " rows, found " +
                            std::to_string(lines.size() - first));
  GridMap::Mask cells(height, width);
  for (int r = 0; r < height; ++r) {
    const auto row = lines[first + static_cast<std::size_t>(r)];
    if (row.size() != static_cast<std::size_t>(width))
      throw DimensionMismatch("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                              " columns, expected " + std::to_string(width));
    for (int c = 0; c < width; ++c) {
      const char g = row[static_cast<std::size_t>(c)];
      if (g == '.') {
        cells(r, c) = 0;
      } else if (moving_ai ? (g == '@' || g == 'T' || g == 'O') : g == '#') {
        cells(r, c) = 1;
      } else {
        throw UnknownGlyph("unknown glyph '" + std::string(1, g) + "' at row " + std::to_string(r) +
                           ", col " + std::to_string(c));
      }
    }
  }
  return GridMap(std::move(cells));
}

}  // namespace

GridMap parse_map(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw DimensionMismatch("empty map text");

  const auto [k0, v0] = key_value(lines[0]);
  if (k0 == "type" || k0 == "height" || k0 == "width") {
    int height = 0, width = 0;
    std::size_t i = 0;
    for (; i < lines.size(); ++i) {
      const auto [key, value] = key_value(lines[i]);
      if (key == "map") break;
      if (key == "height") height = parse_positive(value, "height");
      else if (key == "width") width = parse_positive(value, "width");
      else if (key != "type") throw DimensionMismatch("unexpected header line '" + std::string(lines[i]) + "'");
    }
    if (i == lines.size()) throw DimensionMismatch("missing 'map' line");
    if (height == 0 || width == 0) throw DimensionMismatch("missing height or width header");
    return parse_rows(lines, i + 1, height, width, true);
  }

  // compact: "H W"
  std::istringstream header{std::string(lines[0])};
  std::string hs, ws, extra;
  if (!(header >> hs >> ws) || (header >> extra))
    throw DimensionMismatch("unrecognized map header '" + std::string(lines[0]) + "'");
  return parse_rows(lines, 1, parse_positive(hs, "height"), parse_positive(ws, "width"), false);
}

std::string render_map(const GridMap& map) {
  std::string out = "type octile\nheight " + std::to_string(map.height()) + "\nwidth " +
                    std::to_string(map.width()) + "\nmap\n";
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) out += map.is_obstacle({r, c}) ? '@' : '.';
    out += '\n';
  }
  return out;
}

std::string render_compact(const GridMap& map) {
  std::string out = std::to_string(map.height()) + " " + std::to_string(map.width()) + "\n";
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) out += map.is_obstacle({r, c}) ? '#' : '.';
    out += '\n';
  }
  return out;
}

std::string map_string(const GridMap& map) {
  std::string out;
  out.reserve(static_cast<std::size_t>(map.size()));
  for (int r = 0; r < map.height(); ++r)
    for (int c = 0; c < map.width(); ++c) out += map.is_obstacle({r, c}) ? '#' : '.';
  return out;
}

DistanceField bfs_distance(const GridMap& map, Cell goal) {
  if (!map.in_bounds(goal) || map.is_obstacle(goal))
    throw GoalOnObstacle("goal (" + std::to_string(goal.row) + "," + std::to_string(goal.col) +
                         ") is not a free cell");
  DistanceField field{goal, Grid<std::int32_t>::Constant(map.height(), map.width(), DistanceField::kUnreachable)};
  std::deque<Cell> open{goal};
  field.dist(goal.row, goal.col) = 0;
  while (!open.empty()) {
    const Cell u = open.front();
    open.pop_front();
    const int du = field.dist(u.row, u.col);
    for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right}) {
      const Cell v = step(u, a);
      if (!map.is_free(v) || field.dist(v.row, v.col) != DistanceField::kUnreachable) continue;
      field.dist(v.row, v.col) = du + 1;
      open.push_back(v);
    }
  }
  return field;
}

std::vector<std::pair<Action, Cell>> neighbors(const GridMap& map, Cell cell) {
  if (!map.is_free(cell))
    throw CellOnObstacle("cell (" + std::to_string(cell.row) + "," + std::to_string(cell.col) +
                         ") is not a free cell");
  std::vector<std::pair<Action, Cell>> out{{Action::Wait, cell}};
  for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right}) {
    const Cell v = step(cell, a);
    if (map.is_free(v)) out.emplace_back(a, v);
  }
  return out;
}

}  // namespace gridflow
