// gridflow command line: maps, scenarios, expert solving, dataset export,
// closed-loop evaluation, metric aggregation and replay rendering.

#include "gridflow/dataset.hpp"
#include "gridflow/json_io.hpp"
#include "gridflow/metrics.hpp"
#include "gridflow/render.hpp"
#include "gridflow/sim.hpp"
#include "gridflow/trace_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>

namespace fs = std::filesystem;
using namespace gridflow;

namespace {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  static const Level level = [] {
    const char* env = std::getenv("GRIDFLOW_LOG");
    const std::string v = env ? env : "warn";
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
  }();
  return level;
}

void log(Level level, const std::string& message) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level()) std::cerr << "[gridflow " << names[static_cast<int>(level)] << "] " << message << '\n';
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; results keep index order.
template <typename Fn>
auto parallel_map(std::size_t n, int jobs, Fn fn) {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out;
  out.reserve(n);
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t begin = 0; begin < n; begin += width) {
    std::vector<std::future<R>> running;
    for (std::size_t i = begin; i < std::min(n, begin + width); ++i)
      running.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, fn, i));
    for (auto& f : running) out.push_back(f.get());
  }
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) {
      const double v = std::stod(text);
      return {v, v};
    }
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error("InvalidArgument", "expected a number or 'lo,hi', got '" + text + "'");
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto token = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      out.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw Error("InvalidArgument", "expected a comma-separated integer list, got '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

CollisionMode parse_collision(const std::string& s) {
  if (s == "strict") return CollisionMode::Strict;
  if (s == "tolerant") return CollisionMode::Tolerant;
  throw Error("InvalidArgument", "unknown collision mode '" + s + "'");
}

void write_json_file(const fs::path& path, const Json& j) { write_file(path.string(), j.dump(2) + "\n"); }

struct Loaded {
  Instance instance;
  std::string map_name;
};

Loaded load_instance(const std::string& map_path, const std::string& scen_path, int agents) {
  const GridMap map = parse_map(read_file(map_path));
  const auto entries = parse_scen(read_file(scen_path));
  std::string id = fs::path(scen_path).stem().string();
  const int n = agents > 0 ? std::min<int>(agents, static_cast<int>(entries.size())) : static_cast<int>(entries.size());
  if (agents > 0) id += "-a" + std::to_string(n);
  return {instance_from_scen(map, entries, n, id), fs::path(map_path).stem().string()};
}

// ---- gen-maps ---------------------------------------------------------------

struct GenMapsArgs {
  int count = 1;
  int height = 32;
  int width = 32;
  std::string density = "0.3,0.8";
  std::string braid = "0.3,1.0";
  std::uint64_t seed = 0;
  std::string out_dir;
};

int gen_maps(const GenMapsArgs& a) {
  MazeRecipe m;
  m.count = a.count;
  m.height = a.height;
  m.width = a.width;
  std::tie(m.density_min, m.density_max) = parse_range(a.density);
  std::tie(m.braid_min, m.braid_max) = parse_range(a.braid);
  Recipe r;
  r.seed = a.seed;
  r.maps = m;
  std::vector<std::string> names;
  const auto maps = recipe_maps(r, &names);
  fs::create_directories(a.out_dir);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    write_file((fs::path(a.out_dir) / (names[i] + ".map")).string(), render_map(maps[i]));
    log(Level::Info, "wrote " + names[i] + ".map");
  }
  return 0;
}

// ---- gen-scens --------------------------------------------------------------

struct GenScensArgs {
  std::string map;
  int agents = 8;
  int count = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int gen_scens(const GenScensArgs& a) {
  const GridMap map = parse_map(read_file(a.map));
  const std::string stem = fs::path(a.map).stem().string();
  const bool single_file = a.count == 1 && fs::path(a.out).extension() == ".scen";
  if (!single_file) fs::create_directories(a.out);
  for (int i = 0; i < a.count; ++i) {
    const std::string id = stem + "-" + std::to_string(i);
    const Instance inst = generate_scenario(map, a.agents, splitmix64(a.seed ^ hash_string(id)), id);
    const auto text = render_scen(scen_from_instance(inst, fs::path(a.map).filename().string()));
    const fs::path path = single_file ? fs::path(a.out) : fs::path(a.out) / (id + ".scen");
    write_file(path.string(), text);
    log(Level::Info, "wrote " + path.string());
  }
  return 0;
}

// ---- solve ------------------------------------------------------------------

struct SolveArgs {
  std::string map;
  std::vector<std::string> scens;
  int agents = -1;
  ExpertConfig expert;
  std::string out;
  int jobs = 1;
};

int solve(const SolveArgs& a) {
  struct Result {
    Json line;
    bool ok;
  };
  const auto results = parallel_map(a.scens.size(), a.jobs, [&](std::size_t i) {
    const auto [inst, map_name] = load_instance(a.map, a.scens[i], a.agents);
    Json line;
    try {
      const Solution s = solve_prioritized(inst, a.expert);
      const auto report = validate(inst, s);
      line = solution_to_json(inst.id, s);
      line.update(solve_report_json(inst, &s, report));
      line["map_name"] = map_name;
      return Result{line, report.ok};
    } catch (const Error& e) {
      line = solve_report_json(inst, nullptr, ValidationReport{false, {}});
      line["map_name"] = map_name;
      line["error"] = {{"kind", e.kind()}, {"message", e.what()}};
      return Result{line, false};
    }
  });
  std::string text;
  bool all_ok = true;
  for (const auto& r : results) {
    text += r.line.dump() + "\n";
    all_ok = all_ok && r.ok;
    if (!r.ok) log(Level::Warn, r.line["instance_id"].get<std::string>() + " was not solved");
  }
  if (a.out.empty() || a.out == "-") std::cout << text;
  else write_file(a.out, text);
  return all_ok ? 0 : 1;
}

// ---- export-dataset ---------------------------------------------------------

struct ExportArgs {
  std::string recipe;
  std::string out_dir;
  int jobs = 0;
};

int export_dataset_cmd(const ExportArgs& a) {
  Recipe r;
  if (a.recipe == "desk") r = desk_recipe();
  else if (a.recipe == "full") r = full_recipe();
  else r = recipe_from_json(Json::parse(read_file(a.recipe)));
  if (a.jobs > 0) r.jobs = a.jobs;
  const auto meta = export_dataset(r, a.out_dir);
  log(Level::Info, std::to_string(meta.sample_count) + " samples from " + std::to_string(meta.scenarios.size()) +
                       " scenarios (" + std::to_string(meta.failures) + " failed)");
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string map;
  std::vector<std::string> scens;
  int agents = -1;
  std::vector<std::string> policies;
  std::string mode = "mapf";
  int max_steps = 0;
  std::string collision = "strict";
  std::string select = "argmax";
  std::uint64_t seed = 0;
  std::uint64_t goal_seed = 0;
  int timeout_ms = 30000;
  ExpertConfig expert;
  std::string out;
  int jobs = 1;
};

std::string file_safe(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  return s;
}

void write_summaries(const fs::path& out, std::vector<MetricReport>& reports) {
  set_bests(reports);
  Json all = Json::array();
  for (const auto& r : reports) all.push_back(report_json(r));
  write_json_file(out / "metrics.json", all);
  const auto rows = aggregate(reports, Grouping::PolicyMapTypeAgents);
  write_file((out / "summary.csv").string(), summary_csv(rows));
  write_json_file(out / "summary.json", summary_json(rows));
}

int evaluate(const EvaluateArgs& a) {
  EpisodeConfig cfg;
  cfg.mode = parse_mode(a.mode);
  cfg.max_steps = a.max_steps;
  cfg.collision = parse_collision(a.collision);
  cfg.select = parse_selection(a.select);
  cfg.seed = a.seed;
  cfg.goal_seed = a.goal_seed;
  cfg.policy_timeout_ms = a.timeout_ms;

  const fs::path out(a.out);
  fs::create_directories(out / "traces");
  std::vector<Loaded> loaded;
  for (const auto& s : a.scens) loaded.push_back(load_instance(a.map, s, a.agents));

  const std::size_t episodes = loaded.size() * a.policies.size();
  auto reports = parallel_map(episodes, a.jobs, [&](std::size_t k) {
    const auto& l = loaded[k / a.policies.size()];
    const auto& policy_spec = a.policies[k % a.policies.size()];
    auto policy = make_policy(policy_spec, a.expert);
    EpisodeTrace trace = run_episode(l.instance, *policy, cfg);
    trace.map_name = l.map_name;
    trace.map_type = map_type_of(l.map_name);
    save_trace((out / "traces" / (file_safe(policy_spec) + "__" + l.instance.id + ".jsonl")).string(), trace);
    log(Level::Info, policy_spec + " on " + l.instance.id + ": " + (trace.success ? "solved" : "not solved") + " in " +
                         std::to_string(trace.length()) + " steps");
    return episode_metrics(trace);
  });
  write_summaries(out, reports);
  return 0;
}

// ---- bench-scalability ------------------------------------------------------

struct BenchArgs {
  std::string map;
  std::string policy = "builtin:expert_replay";
  std::string agents = "8,16";
  int episodes = 3;
  int max_steps = 0;
  std::uint64_t seed = 0;
  ExpertConfig expert;
  std::string out;
};

int bench_scalability(const BenchArgs& a) {
  const GridMap map = parse_map(read_file(a.map));
  auto counts = parse_int_list(a.agents);
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  EpisodeConfig cfg;
  cfg.max_steps = a.max_steps;
  cfg.collision = CollisionMode::Tolerant;
  cfg.seed = a.seed;

  std::vector<double> runtime;
  for (const int n : counts) {
    double total = 0.0;
    long steps = 0;
    for (int e = 0; e < a.episodes; ++e) {
      const std::string id = "bench-a" + std::to_string(n) + "-e" + std::to_string(e);
      const Instance inst = generate_scenario(map, n, splitmix64(a.seed ^ hash_string(id)), id);
      auto policy = make_policy(a.policy, a.expert);
      const auto trace = run_episode(inst, *policy, cfg);
      for (const auto& s : trace.steps) total += s.latency_ms;
      steps += trace.length();
    }
    runtime.push_back(steps > 0 ? total / static_cast<double>(steps) : 0.0);
    log(Level::Info, std::to_string(n) + " agents: " + std::to_string(runtime.back()) + " ms per step");
  }

  std::string csv = "agents,mean_step_ms,scalability_vs_previous,scalability_vs_first\n";
  Json rows = Json::array();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::optional<double> prev, first;
    if (i > 0 && runtime[i] > 0 && runtime[i - 1] > 0) {
      prev = scalability(runtime[i - 1], counts[i - 1], runtime[i], counts[i]);
      first = scalability(runtime[0], counts[0], runtime[i], counts[i]);
    }
    char line[160];
    std::snprintf(line, sizeof line, "%d,%.6g,%s,%s\n", counts[i], runtime[i],
                  prev ? std::to_string(*prev).c_str() : "", first ? std::to_string(*first).c_str() : "");
    csv += line;
    rows.push_back({{"agents", counts[i]},
                    {"mean_step_ms", runtime[i]},
                    {"scalability_vs_previous", prev ? Json(*prev) : Json(nullptr)},
                    {"scalability_vs_first", first ? Json(*first) : Json(nullptr)}});
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << csv;
  } else {
    fs::create_directories(a.out);
    write_file((fs::path(a.out) / "scalability.csv").string(), csv);
    write_json_file(fs::path(a.out) / "scalability.json", Json{{"policy", a.policy}, {"map", a.map}, {"rows", rows}});
  }
  return 0;
}

// ---- aggregate --------------------------------------------------------------

int aggregate_cmd(const std::string& traces, const std::string& out) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(traces))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<MetricReport> reports;
  for (const auto& f : files) reports.push_back(episode_metrics(load_trace(f.string())));
  fs::create_directories(out);
  write_summaries(out, reports);
  log(Level::Info, "aggregated " + std::to_string(reports.size()) + " traces");
  return 0;
}

// ---- render -----------------------------------------------------------------

int render_cmd(const std::string& trace, const std::string& format, const std::string& out_dir) {
  FrameFormat f;
  if (format == "svg") f = FrameFormat::Svg;
  else if (format == "ascii") f = FrameFormat::Ascii;
  else throw Error("InvalidArgument", "unknown frame format '" + format + "'");
  const int frames = render_trace(load_trace(trace), f, out_dir);
  log(Level::Info, "wrote " + std::to_string(frames) + " frames");
  return 0;
}

// ---- serve-builtin ----------------------------------------------------------

int serve_builtin(const std::string& name, const ExpertConfig& expert) {
  auto policy = make_policy("builtin:" + name, expert);
  std::ios::sync_with_stdio(false);
  serve_policy(*policy, std::cin, std::cout);
  return 0;
}

void add_expert_flags(CLI::App* cmd, ExpertConfig& e) {
  cmd->add_option("--timeout-ms", e.timeout_ms, "Expert time budget per instance")->capture_default_str();
  cmd->add_option("--restarts", e.max_restarts, "Random priority restarts")->capture_default_str();
  cmd->add_option("--expert-seed", e.seed, "Expert priority-order seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridflow: grid MAPF action-field engine"};
  app.require_subcommand(1);

  GenMapsArgs gm;
  auto* c_maps = app.add_subcommand("gen-maps", "Generate maze maps in MovingAI format");
  c_maps->add_option("--count", gm.count)->capture_default_str();
  c_maps->add_option("--height", gm.height)->capture_default_str();
  c_maps->add_option("--width", gm.width)->capture_default_str();
  c_maps->add_option("--density", gm.density, "Wall density, a value or 'lo,hi'")->capture_default_str();
  c_maps->add_option("--braid", gm.braid, "Braid probability, a value or 'lo,hi'")->capture_default_str();
  c_maps->add_option("--seed", gm.seed)->capture_default_str();
  c_maps->add_option("--out-dir", gm.out_dir)->required();

  GenScensArgs gs;
  auto* c_scens = app.add_subcommand("gen-scens", "Generate MovingAI scenario files for a map");
  c_scens->add_option("--map", gs.map)->required()->check(CLI::ExistingFile);
  c_scens->add_option("--agents", gs.agents)->capture_default_str();
  c_scens->add_option("--count", gs.count)->capture_default_str();
  c_scens->add_option("--seed", gs.seed)->capture_default_str();
  c_scens->add_option("--out", gs.out, "A .scen file when count is 1, otherwise a directory")->required();

  SolveArgs sv;
  auto* c_solve = app.add_subcommand("solve", "Solve scenarios with the prioritized expert and validate");
  c_solve->add_option("--map", sv.map)->required()->check(CLI::ExistingFile);
  c_solve->add_option("--scen", sv.scens)->required()->check(CLI::ExistingFile);
  c_solve->add_option("--agents", sv.agents, "Use the first N agents of each scenario");
  add_expert_flags(c_solve, sv.expert);
  c_solve->add_option("--seed", sv.expert.seed, "Alias of --expert-seed");
  c_solve->add_option("--out", sv.out, "JSON lines output; '-' for stdout");
  c_solve->add_option("--jobs", sv.jobs)->capture_default_str();

  ExportArgs ex;
  auto* c_export = app.add_subcommand("export-dataset", "Build a training dataset from a recipe");
  c_export->add_option("--recipe", ex.recipe, "recipe.json, or 'desk' / 'full'")->required();
  c_export->add_option("--out-dir", ex.out_dir)->required();
  c_export->add_option("--jobs", ex.jobs, "Overrides the recipe's job count");

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Run policies in closed loop and report metrics");
  c_eval->add_option("--map", ev.map)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--scen", ev.scens)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--agents", ev.agents, "Use the first N agents of each scenario");
  c_eval->add_option("--policy", ev.policies, "builtin:NAME or a shell command; repeatable")->required();
  c_eval->add_option("--mode", ev.mode)->check(CLI::IsMember({"mapf", "lmapf"}))->capture_default_str();
  c_eval->add_option("--max-steps", ev.max_steps, "0 means 4 * (height + width)")->capture_default_str();
  c_eval->add_option("--collision", ev.collision)->check(CLI::IsMember({"strict", "tolerant"}))->capture_default_str();
  c_eval->add_option("--select", ev.select)->check(CLI::IsMember({"argmax", "sample"}))->capture_default_str();
  c_eval->add_option("--seed", ev.seed)->capture_default_str();
  c_eval->add_option("--goal-seed", ev.goal_seed)->capture_default_str();
  c_eval->add_option("--policy-timeout-ms", ev.timeout_ms)->capture_default_str();
  add_expert_flags(c_eval, ev.expert);
  c_eval->add_option("--out", ev.out, "Output directory")->required();
  c_eval->add_option("--jobs", ev.jobs)->capture_default_str();

  BenchArgs bs;
  auto* c_bench = app.add_subcommand("bench-scalability", "Measure policy step latency against agent count");
  c_bench->add_option("--map", bs.map)->required()->check(CLI::ExistingFile);
  c_bench->add_option("--policy", bs.policy)->capture_default_str();
  c_bench->add_option("--agents", bs.agents, "Comma-separated agent counts")->capture_default_str();
  c_bench->add_option("--episodes", bs.episodes, "Episodes per agent count")->capture_default_str();
  c_bench->add_option("--max-steps", bs.max_steps)->capture_default_str();
  c_bench->add_option("--seed", bs.seed)->capture_default_str();
  add_expert_flags(c_bench, bs.expert);
  c_bench->add_option("--out", bs.out, "Output directory; stdout when omitted");

  std::string agg_traces, agg_out;
  auto* c_agg = app.add_subcommand("aggregate", "Summarize a directory of episode traces");
  c_agg->add_option("--traces", agg_traces)->required()->check(CLI::ExistingDirectory);
  c_agg->add_option("--out", agg_out, "Output directory")->required();

  std::string r_trace, r_format = "svg", r_out;
  auto* c_render = app.add_subcommand("render", "Render a trace as per-step frames");
  c_render->add_option("--trace", r_trace)->required()->check(CLI::ExistingFile);
  c_render->add_option("--format", r_format)->check(CLI::IsMember({"svg", "ascii"}))->capture_default_str();
  c_render->add_option("--out-dir", r_out)->required();

  std::string sb_name;
  ExpertConfig sb_expert;
  auto* c_serve = app.add_subcommand("serve-builtin", "Serve a builtin policy over stdin/stdout");
  c_serve->add_option("name", sb_name)->required()->check(CLI::IsMember(builtin_policy_names()));
  add_expert_flags(c_serve, sb_expert);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_maps) return gen_maps(gm);
    if (*c_scens) return gen_scens(gs);
    if (*c_solve) return solve(sv);
    if (*c_export) return export_dataset_cmd(ex);
    if (*c_eval) return evaluate(ev);
    if (*c_bench) return bench_scalability(bs);
    if (*c_agg) return aggregate_cmd(agg_traces, agg_out);
    if (*c_render) return render_cmd(r_trace, r_format, r_out);
    if (*c_serve) return serve_builtin(sb_name, sb_expert);
  } catch (const Error& e) {
    std::cerr << Json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return 0;
}
