#include "gridflow/mapf.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gridflow {

namespace {

std::string str(Cell c) { return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")"; }

}  // namespace

void check_instance(const Instance& instance) {
  if (instance.starts.size() != instance.goals.size())
    throw InvalidInstance("starts and goals differ in length");
  std::unordered_set<Cell> starts, goals;
  for (std::size_t i = 0; i < instance.starts.size(); ++i) {
    const Cell s = instance.starts[i], g = instance.goals[i];
    if (!instance.map.is_free(s)) throw InvalidInstance("start of agent " + std::to_string(i) + " " + str(s) + " is not free");
    if (!instance.map.is_free(g)) throw InvalidInstance("goal of agent " + std::to_string(i) + " " + str(g) + " is not free");
    if (!starts.insert(s).second) throw InvalidInstance("duplicate start " + str(s));
    if (!goals.insert(g).second) throw InvalidInstance("duplicate goal " + str(g));
  }
}

int Solution::arrival(int agent) const {
  const Path& p = paths.at(static_cast<std::size_t>(agent));
  if (p.empty()) return 0;
  int t = static_cast<int>(p.size()) - 1;
  while (t > 0 && p[static_cast<std::size_t>(t - 1)] == p.back()) --t;
  return t;
}

Cell Solution::at(int agent, int t) const {
  const Path& p = paths.at(static_cast<std::size_t>(agent));
  return p[std::min(static_cast<std::size_t>(t), p.size() - 1)];
}

std::vector<Cell> Solution::positions(int t) const {
  std::vector<Cell> out;
  out.reserve(paths.size());
  for (int i = 0; i < num_agents(); ++i) out.push_back(at(i, t));
  return out;
}

int Solution::horizon() const {
  std::size_t len = 1;
  for (const auto& p : paths) len = std::max(len, p.size());
  return static_cast<int>(len) - 1;
}

Solution truncated(const Solution& solution) {
  Solution out = solution;
  for (int i = 0; i < out.num_agents(); ++i)
    out.paths[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(solution.arrival(i)) + 1);
  return out;
}

Solution extended(const Solution& solution, int length) {
  Solution out;
  out.paths.reserve(solution.paths.size());
  for (int i = 0; i < solution.num_agents(); ++i) {
    Path p;
    p.reserve(static_cast<std::size_t>(length));
    for (int t = 0; t < length; ++t) p.push_back(solution.at(i, t));
    out.paths.push_back(std::move(p));
  }
  return out;
}

const char* collision_kind_name(CollisionKind kind) {
  return kind == CollisionKind::Vertex ? "vertex" : "edge";
}

std::vector<Collision> detect_collisions(std::span<const Cell> before, std::span<const Cell> after, int t) {
  if (before.size() != after.size())
    throw LengthMismatch("position arrays differ in length: " + std::to_string(before.size()) + " vs " +
                         std::to_string(after.size()));
  const int n = static_cast<int>(after.size());
  std::vector<Collision> out;

  std::unordered_map<Cell, std::vector<int>> at_after, at_before;
  at_after.reserve(after.size());
  at_before.reserve(before.size());
  for (int i = 0; i < n; ++i) {
    at_after[after[static_cast<std::size_t>(i)]].push_back(i);
    at_before[before[static_cast<std::size_t>(i)]].push_back(i);
  }

  for (const auto& [cell, agents] : at_after)
    for (std::size_t x = 0; x < agents.size(); ++x)
      for (std::size_t y = x + 1; y < agents.size(); ++y)
        out.push_back({CollisionKind::Vertex, agents[x], agents[y], t, cell, cell});

  for (int i = 0; i < n; ++i) {
    const Cell from = before[static_cast<std::size_t>(i)], to = after[static_cast<std::size_t>(i)];
    if (from == to) continue;
    auto it = at_before.find(to);
    if (it == at_before.end()) continue;
    for (int j : it->second) {
      if (j <= i) continue;
      if (after[static_cast<std::size_t>(j)] == from && before[static_cast<std::size_t>(j)] != from)
        out.push_back({CollisionKind::Edge, i, j, t, from, to});
    }
  }
  std::sort(out.begin(), out.end(), [](const Collision& x, const Collision& y) {
    return std::tie(x.kind, x.a, x.b) < std::tie(y.kind, y.a, y.b);
  });
  return out;
}

ValidationReport validate(const Instance& instance, const Solution& solution) {
  ValidationReport report;
  auto fail = [&](std::string kind, int agent, int other, int t, std::string detail) {
    report.ok = false;
    report.violations.push_back({std::move(kind), agent, other, t, std::move(detail)});
  };

  const int n = instance.num_agents();
  if (solution.num_agents() != n) {
    fail("agent_count", -1, -1, -1,
         "expected " + std::to_string(n) + " paths, got " + std::to_string(solution.num_agents()));
    return report;
  }

  bool structurally_ok = true;
  for (int i = 0; i < n; ++i) {
    const Path& p = solution.paths[static_cast<std::size_t>(i)];
    if (p.empty()) {
      fail("start", i, -1, 0, "empty path");
      structurally_ok = false;
      continue;
    }
    if (p.front() != instance.starts[static_cast<std::size_t>(i)])
      fail("start", i, -1, 0, "path starts at " + str(p.front()) + ", start is " + str(instance.starts[static_cast<std::size_t>(i)]));
    if (p.back() != instance.goals[static_cast<std::size_t>(i)])
      fail("goal", i, -1, static_cast<int>(p.size()) - 1,
           "path ends at " + str(p.back()) + ", goal is " + str(instance.goals[static_cast<std::size_t>(i)]));
    for (std::size_t t = 0; t < p.size(); ++t) {
      if (!instance.map.is_free(p[t])) {
        fail("off_map", i, -1, static_cast<int>(t), str(p[t]) + " is not a free cell");
        structurally_ok = false;
      }
      if (t > 0 && action_between(p[t - 1], p[t]) == Action::Free)
        fail("disconnected", i, -1, static_cast<int>(t) - 1, str(p[t - 1]) + " -> " + str(p[t]) + " is not an edge");
    }
  }
  if (!structurally_ok) return report;

  const int horizon = solution.horizon();
  auto prev = solution.positions(0);
  for (const auto& c : detect_collisions(prev, prev, -1))
    fail("vertex_collision", c.a, c.b, 0, "agents share " + str(c.from) + " at t=0");
  for (int t = 0; t < horizon; ++t) {
    auto next = solution.positions(t + 1);
    for (const auto& c : detect_collisions(prev, next, t)) {
      if (c.kind == CollisionKind::Vertex)
        fail("vertex_collision", c.a, c.b, t + 1, "agents share " + str(c.from) + " at t=" + std::to_string(t + 1));
      else
        fail("edge_collision", c.a, c.b, t, "agents swap " + str(c.from) + " <-> " + str(c.to) + " at t=" + std::to_string(t));
    }
    prev = std::move(next);
  }
  return report;
}

long soc(const Solution& solution) {
  long total = 0;
  for (int i = 0; i < solution.num_agents(); ++i) total += solution.arrival(i);
  return total;
}

int makespan(const Solution& solution) {
  int out = 0;
  for (int i = 0; i < solution.num_agents(); ++i) out = std::max(out, solution.arrival(i));
  return out;
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::size_t line_index, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw MalformedScenario("line " + std::to_string(line_index) + ": bad " + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<ScenarioEntry> parse_scen(std::string_view text) {
  std::vector<ScenarioEntry> out;
  std::size_t pos = 0, line_index = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_index;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_index == 1 && line.starts_with("version")) continue;

    std::vector<std::string_view> cols;
    std::size_t p = 0;
    while (true) {
      const auto tab = line.find('\t', p);
      cols.push_back(line.substr(p, tab == std::string_view::npos ? std::string_view::npos : tab - p));
      if (tab == std::string_view::npos) break;
      p = tab + 1;
    }
    if (cols.size() != 9)
      throw MalformedScenario("line " + std::to_string(line_index) + ": expected 9 tab-separated columns, got " +
                              std::to_string(cols.size()));
    ScenarioEntry e;
    e.bucket = parse_number<int>(cols[0], line_index, "bucket");
    e.map_name = std::string(cols[1]);
    e.width = parse_number<int>(cols[2], line_index, "width");
    e.height = parse_number<int>(cols[3], line_index, "height");
    e.start = {parse_number<int>(cols[5], line_index, "start y"), parse_number<int>(cols[4], line_index, "start x")};
    e.goal = {parse_number<int>(cols[7], line_index, "goal y"), parse_number<int>(cols[6], line_index, "goal x")};
    e.optimal = parse_number<double>(cols[8], line_index, "optimal length");
    out.push_back(std::move(e));
  }
  return out;
}

std::string render_scen(std::span<const ScenarioEntry> entries) {
  std::string out = "version 1\n";
  char optimal[64];
  for (const auto& e : entries) {
    std::snprintf(optimal, sizeof optimal, "%.8f", e.optimal);
    out += std::to_string(e.bucket) + '\t' + e.map_name + '\t' + std::to_string(e.width) + '\t' +
           std::to_string(e.height) + '\t' + std::to_string(e.start.col) + '\t' + std::to_string(e.start.row) + '\t' +
           std::to_string(e.goal.col) + '\t' + std::to_string(e.goal.row) + '\t' + optimal + '\n';
  }
  return out;
}

Instance instance_from_scen(const GridMap& map, std::span<const ScenarioEntry> entries, int num_agents,
                            std::string id) {
  const std::size_t n = num_agents < 0 ? entries.size() : static_cast<std::size_t>(num_agents);
  if (n > entries.size())
    throw InvalidInstance("scenario has " + std::to_string(entries.size()) + " entries, " + std::to_string(n) +
                          " requested");
  Instance inst{map, {}, {}, std::move(id)};
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i].width != map.width() || entries[i].height != map.height())
      throw InvalidInstance("scenario entry " + std::to_string(i) + " dimensions disagree with the map");
    inst.starts.push_back(entries[i].start);
    inst.goals.push_back(entries[i].goal);
  }
  check_instance(inst);
  return inst;
}

std::vector<ScenarioEntry> scen_from_instance(const Instance& instance, const std::string& map_name) {
  std::vector<ScenarioEntry> out;
  for (int i = 0; i < instance.num_agents(); ++i) {
    const auto& s = instance.starts[static_cast<std::size_t>(i)];
    const auto& g = instance.goals[static_cast<std::size_t>(i)];
    const auto d = bfs_distance(instance.map, g).at(s);
    out.push_back({0, map_name, instance.map.width(), instance.map.height(), s, g, d ? static_cast<double>(*d) : -1.0});
  }
  return out;
}

}  // namespace gridflow
