#include "gridflow/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace gridflow {

namespace {

const char* collision_mode_name(CollisionMode m) { return m == CollisionMode::Strict ? "strict" : "tolerant"; }

std::vector<int> action_ids(const std::vector<Action>& actions) {
  std::vector<int> ids;
  for (Action a : actions) ids.push_back(static_cast<int>(a));
  return ids;
}

Collision collision_from_json(const Json& j) {
  Collision c{};
  c.kind = j.at("kind").get<std::string>() == "vertex" ? CollisionKind::Vertex : CollisionKind::Edge;
  c.a = j.at("agents").at(0).get<int>();
  c.b = j.at("agents").at(1).get<int>();
  c.t = j.at("t").get<int>();
  if (c.kind == CollisionKind::Vertex) {
    c.from = c.to = j.at("cell").get<Cell>();
  } else {
    c.from = j.at("edge").at(0).get<Cell>();
    c.to = j.at("edge").at(1).get<Cell>();
  }
  return c;
}

}  // namespace

void write_trace(std::ostream& out, const EpisodeTrace& trace) {
  const auto& inst = trace.instance;
  const auto& cfg = trace.config;
  out << Json{{"type", "header"},
              {"version", 1},
              {"instance_id", inst.id},
              {"map_name", trace.map_name},
              {"map_type", trace.map_type},
              {"policy", trace.policy},
              {"height", inst.map.height()},
              {"width", inst.map.width()},
              {"map", map_string(inst.map)},
              {"starts", inst.starts},
              {"goals", inst.goals},
              {"mode", mode_name(cfg.mode)},
              {"max_steps", cfg.max_steps},
              {"collision", collision_mode_name(cfg.collision)},
              {"select", selection_name(cfg.select)},
              {"seed", cfg.seed},
              {"goal_seed", cfg.goal_seed}}
             .dump()
      << '\n';
  for (const auto& s : trace.steps) {
    out << Json{{"type", "step"},
                {"t", s.t},
                {"positions", s.positions},
                {"goals", s.goals},
                {"actions", action_ids(s.actions)},
                {"collisions", s.collisions},
                {"invalid", s.invalid_actions},
                {"latency_ms", s.latency_ms},
                {"completed", s.completed}}
               .dump()
        << '\n';
  }
  Json summary{{"type", "summary"},
               {"success", trace.success},
               {"aborted", trace.aborted},
               {"steps", trace.length()},
               {"collisions", trace.total_collisions()},
               {"completions", trace.completions},
               {"final_positions", trace.final_positions},
               {"final_goals", trace.final_goals}};
  if (trace.success) {
    const auto sol = trace.induced_solution();
    summary["soc"] = soc(sol);
    summary["makespan"] = makespan(sol);
  }
  out << summary.dump() << '\n';
}

EpisodeTrace read_trace(std::istream& in) {
  EpisodeTrace trace;
  bool header = false, summary = false;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        const int h = j.at("height").get<int>(), w = j.at("width").get<int>();
        const auto text = j.at("map").get<std::string>();
        if (text.size() != static_cast<std::size_t>(h * w)) throw MalformedTrace("map string has the wrong length");
        GridMap::Mask cells(h, w);
        for (int i = 0; i < h * w; ++i) cells(i / w, i % w) = text[static_cast<std::size_t>(i)] == '#' ? 1 : 0;
        trace.instance.map = GridMap(std::move(cells));
        trace.instance.id = j.at("instance_id").get<std::string>();
        trace.instance.starts = j.at("starts").get<std::vector<Cell>>();
        trace.instance.goals = j.at("goals").get<std::vector<Cell>>();
        trace.map_name = j.value("map_name", "");
        trace.map_type = j.value("map_type", "");
        trace.policy = j.value("policy", "");
        trace.config.mode = parse_mode(j.at("mode").get<std::string>());
        trace.config.max_steps = j.at("max_steps").get<int>();
        trace.config.collision = j.at("collision").get<std::string>() == "strict" ? CollisionMode::Strict : CollisionMode::Tolerant;
        trace.config.select = parse_selection(j.value("select", "argmax"));
        trace.config.seed = j.value("seed", std::uint64_t{0});
        trace.config.goal_seed = j.value("goal_seed", std::uint64_t{0});
        header = true;
      } else if (type == "step") {
        if (!header) throw MalformedTrace("step before header");
        StepRecord s;
        s.t = j.at("t").get<int>();
        s.positions = j.at("positions").get<std::vector<Cell>>();
        s.goals = j.at("goals").get<std::vector<Cell>>();
        for (int id : j.at("actions").get<std::vector<int>>()) s.actions.push_back(static_cast<Action>(id));
        for (const auto& c : j.at("collisions")) s.collisions.push_back(collision_from_json(c));
        s.invalid_actions = j.at("invalid").get<int>();
        s.latency_ms = j.at("latency_ms").get<double>();
        s.completed = j.at("completed").get<std::vector<int>>();
        trace.steps.push_back(std::move(s));
      } else if (type == "summary") {
        trace.success = j.at("success").get<bool>();
        trace.aborted = j.at("aborted").get<bool>();
        trace.completions = j.at("completions").get<int>();
        trace.final_positions = j.at("final_positions").get<std::vector<Cell>>();
        trace.final_goals = j.at("final_goals").get<std::vector<Cell>>();
        summary = true;
      } else {
        throw MalformedTrace("unknown record type '" + type + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw MalformedTrace("line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!header || !summary) throw MalformedTrace("trace lacks a header or summary record");
  return trace;
}

EpisodeTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedTrace("cannot open " + path);
  return read_trace(in);
}

void save_trace(const std::string& path, const EpisodeTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("IoError", "cannot write " + path);
  write_trace(out, trace);
}

}  // namespace gridflow
