#include "gridflow/json_io.hpp"

#include <fstream>
#include <sstream>

namespace gridflow {

void to_json(Json& j, const Cell& c) { j = Json::array({c.row, c.col}); }

void from_json(const Json& j, Cell& c) {
  if (!j.is_array() || j.size() != 2) throw Json::type_error::create(302, "cell must be [row, col]", &j);
  c = {j[0].get<int>(), j[1].get<int>()};
}

void to_json(Json& j, const Collision& c) {
  j = Json{{"kind", collision_kind_name(c.kind)}, {"agents", {c.a, c.b}}, {"t", c.t}};
  if (c.kind == CollisionKind::Vertex) j["cell"] = c.from;
  else j["edge"] = Json::array({c.from, c.to});
}

void to_json(Json& j, const Violation& v) {
  j = Json{{"kind", v.kind}, {"detail", v.detail}};
  if (v.agent >= 0) j["agent"] = v.agent;
  if (v.other >= 0) j["other"] = v.other;
  if (v.t >= 0) j["t"] = v.t;
}

void to_json(Json& j, const ValidationReport& r) { j = Json{{"ok", r.ok}, {"violations", r.violations}}; }

Json solution_to_json(const std::string& instance_id, const Solution& solution) {
  return Json{{"instance_id", instance_id}, {"paths", solution.paths}};
}

Solution solution_from_json(const Json& j) {
  Solution s;
  s.paths = j.at("paths").get<std::vector<Path>>();
  return s;
}

Json solve_report_json(const Instance& instance, const Solution* solution, const ValidationReport& report) {
  Json j{{"instance_id", instance.id}, {"num_agents", instance.num_agents()}, {"validation", report}};
  if (solution) {
    j["soc"] = soc(*solution);
    j["makespan"] = makespan(*solution);
  }
  return j;
}

void to_json(Json& j, const ExpertConfig& c) {
  j = Json{{"timeout_ms", c.timeout_ms}, {"max_restarts", c.max_restarts}, {"seed", c.seed}};
}

void from_json(const Json& j, ExpertConfig& c) {
  c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
  c.max_restarts = j.value("max_restarts", c.max_restarts);
  c.seed = j.value("seed", c.seed);
}

void to_json(Json& j, const Recipe& r) {
  j = Json{{"seed", r.seed},
           {"maps",
            {{"count", r.maps.count},
             {"height", r.maps.height},
             {"width", r.maps.width},
             {"density", {r.maps.density_min, r.maps.density_max}},
             {"braid", {r.maps.braid_min, r.maps.braid_max}}}},
           {"map_files", r.map_files},
           {"scenarios", Json::array()},
           {"expert", r.expert},
           {"features", {{"normalize_indices", r.features.normalize_indices}}},
           {"max_failure_rate", r.max_failure_rate}};
  for (const auto& g : r.scenarios) j["scenarios"].push_back({{"count", g.count}, {"agents", g.agents}});
}

namespace {

void check_recipe(const Recipe& r) {
  auto unit_range = [](double lo, double hi) { return 0.0 <= lo && lo <= hi && hi <= 1.0; };
  if (r.map_files.empty() && (r.maps.count < 1 || r.maps.height < 4 || r.maps.width < 4))
    throw InvalidRecipe("maps need count >= 1 and height, width >= 4");
  if (!unit_range(r.maps.density_min, r.maps.density_max)) throw InvalidRecipe("density must be an ordered range in [0, 1]");
  if (!unit_range(r.maps.braid_min, r.maps.braid_max)) throw InvalidRecipe("braid must be an ordered range in [0, 1]");
  if (r.scenarios.empty()) throw InvalidRecipe("recipe has no scenario groups");
  for (const auto& g : r.scenarios)
    if (g.count < 0 || g.agents <= 0) throw InvalidRecipe("scenario groups need count >= 0 and agents > 0");
  if (r.max_failure_rate < 0.0 || r.max_failure_rate > 1.0) throw InvalidRecipe("max_failure_rate must lie in [0, 1]");
  if (r.jobs < 1) throw InvalidRecipe("jobs must be >= 1");
  if (r.expert.timeout_ms < 0 || r.expert.max_restarts < 0) throw InvalidRecipe("expert limits must be non-negative");
}

}  // namespace

Recipe recipe_from_json(const Json& j) {
  try {
    Recipe r;
    r.seed = j.value("seed", r.seed);
    if (j.contains("maps")) {
      const auto& m = j["maps"];
      r.maps.count = m.value("count", r.maps.count);
      r.maps.height = m.value("height", r.maps.height);
      r.maps.width = m.value("width", r.maps.width);
      if (m.contains("density")) {
        r.maps.density_min = m["density"].at(0).get<double>();
        r.maps.density_max = m["density"].at(1).get<double>();
      }
      if (m.contains("braid")) {
        r.maps.braid_min = m["braid"].at(0).get<double>();
        r.maps.braid_max = m["braid"].at(1).get<double>();
      }
    }
    r.map_files = j.value("map_files", r.map_files);
    for (const auto& g : j.at("scenarios")) r.scenarios.push_back({g.at("count").get<int>(), g.at("agents").get<int>()});
    if (j.contains("expert")) r.expert = j["expert"].get<ExpertConfig>();
    if (j.contains("features")) r.features.normalize_indices = j["features"].value("normalize_indices", false);
    r.max_failure_rate = j.value("max_failure_rate", r.max_failure_rate);
    r.jobs = j.value("jobs", r.jobs);
    check_recipe(r);
    return r;
  } catch (const Json::exception& e) {
    throw InvalidRecipe(std::string("bad recipe: ") + e.what());
  }
}

Json meta_to_json(const DatasetMeta& meta) {
  Json recipe = meta.recipe;
  Json j{
      {"format_version", DatasetMeta::kFormatVersion},
      {"action_encoding", {{"wait", 0}, {"up", 1}, {"down", 2}, {"left", 3}, {"right", 4}, {"masked", 255}}},
      {"channel_order", Json(std::vector<std::string>(kChannelOrder.begin(), kChannelOrder.end()))},
      {"k", kNumChannels},
      {"normalization",
       {{"cost_to_goal", "distance / (height + width), written at agent cells only"},
        {"gradient", "per-axis sign in {-1,0,1} at agent cells only"},
        {"agent_index_base", 1},
        {"normalize_indices", meta.recipe.features.normalize_indices}}},
      {"gradient_tie_break", "counter rng keyed by (recipe.seed, instance_id, t, cell)"},
      {"coordinates", "(row, col), row 0 at top; up decreases row"},
      {"record_layout", "little-endian: u32 record_len, u16 n, u16 m, u16 k, f32 features[n][m][k], u8 labels[n][m]"},
      {"recipe", recipe},
      {"maps", meta.map_names},
      {"scenario_counts",
       {{"attempted", meta.scenarios.size()},
        {"solved", meta.scenarios.size() - static_cast<std::size_t>(meta.failures)},
        {"failed", meta.failures}}},
      {"sample_count", meta.sample_count},
      {"scenarios", Json::array()}};
  for (const auto& s : meta.scenarios) {
    Json e{{"id", s.id}, {"map_index", s.map_index}, {"agents", s.agents}, {"solved", s.solved}};
    if (s.solved) {
      e["first_sample"] = s.first_sample;
      e["num_samples"] = s.num_samples;
      e["soc"] = s.soc;
      e["makespan"] = s.makespan;
    } else {
      e["failure"] = s.failure;
    }
    j["scenarios"].push_back(std::move(e));
  }
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IoError", "cannot write " + path);
  out << contents;
}

}  // namespace gridflow
