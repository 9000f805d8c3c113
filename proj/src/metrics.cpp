#include "gridflow/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

namespace gridflow {

double performance(long soc, std::optional<long> soc_best, bool solved, EpisodeMode mode, double throughput,
                   std::optional<double> throughput_best) {
  if (mode == EpisodeMode::LMAPF) {
    if (!throughput_best) throw MissingBest("lifelong performance needs throughput_best");
    if (*throughput_best <= 0.0) return 0.0;
    return throughput / *throughput_best;
  }
  if (!solved) return 0.0;
  if (!soc_best) throw MissingBest("performance of a solved episode needs soc_best");
  if (soc == 0) return 1.0;
  return static_cast<double>(*soc_best) / static_cast<double>(soc);
}

double coordination(long num_collisions, int num_agents, int episode_length) {
  const double denom = static_cast<double>(num_agents) * static_cast<double>(episode_length);
  if (denom <= 0.0) return 1.0;
  return 1.0 - static_cast<double>(num_collisions) / denom;
}

double scalability(double runtime_1, int agents_1, double runtime_2, int agents_2) {
  if (agents_1 >= agents_2)
    throw OrderViolation("scalability needs agents_1 < agents_2, got " + std::to_string(agents_1) + " and " +
                         std::to_string(agents_2));
  if (agents_1 <= 0 || runtime_1 <= 0.0 || runtime_2 <= 0.0)
    throw OrderViolation("scalability needs positive agent counts and runtimes");
  return (runtime_1 / runtime_2) / (static_cast<double>(agents_1) / static_cast<double>(agents_2));
}

double pathfinding(long single_agent_soc, long optimal_soc, bool found) {
  if (!found) return 0.0;
  if (single_agent_soc <= 0) return 1.0;
  return static_cast<double>(optimal_soc) / static_cast<double>(single_agent_soc);
}

std::string map_type_of(const std::string& map_name) {
  std::string s = map_name;
  while (!s.empty() && (std::isdigit(static_cast<unsigned char>(s.back())) || s.back() == '-' || s.back() == '_'))
    s.pop_back();
  return s.empty() ? map_name : s;
}

MetricReport episode_metrics(const EpisodeTrace& trace) {
  MetricReport r;
  r.instance_id = trace.instance.id;
  r.map_name = trace.map_name;
  r.map_type = trace.map_type.empty() ? map_type_of(trace.map_name) : trace.map_type;
  r.policy = trace.policy;
  r.mode = trace.config.mode;
  r.agents = trace.instance.num_agents();
  r.steps = trace.length();
  r.collisions = trace.total_collisions();
  r.completions = trace.completions;
  for (const auto& s : trace.steps) {
    r.invalid_actions += s.invalid_actions;
    r.total_latency_ms += s.latency_ms;
  }
  r.mean_latency_ms = r.steps > 0 ? r.total_latency_ms / r.steps : 0.0;
  r.coordination = coordination(r.collisions, r.agents, std::max(1, r.steps));

  if (r.mode == EpisodeMode::MAPF) {
    r.solved = trace.success;
    if (r.solved) {
      const auto sol = trace.induced_solution();
      r.soc = soc(sol);
      r.makespan = makespan(sol);
    }
    if (r.agents == 1) {
      const auto optimal = bfs_distance(trace.instance.map, trace.instance.goals[0]).at(trace.instance.starts[0]);
      r.pathfinding = pathfinding(r.soc, optimal.value_or(0), r.solved);
    }
  } else {
    r.throughput = static_cast<double>(r.completions) / static_cast<double>(std::max(1, trace.config.max_steps));
  }
  return r;
}

void set_bests(std::span<MetricReport> reports) {
  std::map<std::string, std::optional<long>> soc_best;
  std::map<std::string, double> tp_best;
  for (const auto& r : reports) {
    if (r.mode == EpisodeMode::MAPF) {
      auto& best = soc_best[r.instance_id];
      if (r.solved && (!best || r.soc < *best)) best = r.soc;
    } else {
      auto [it, inserted] = tp_best.try_emplace(r.instance_id, r.throughput);
      if (!inserted) it->second = std::max(it->second, r.throughput);
    }
  }
  for (auto& r : reports) {
    if (r.mode == EpisodeMode::MAPF) {
      r.soc_best = soc_best[r.instance_id];
      r.performance = r.solved ? performance(r.soc, r.soc_best, true, r.mode, 0.0, std::nullopt) : 0.0;
    } else {
      r.throughput_best = tp_best[r.instance_id];
      r.performance = performance(0, std::nullopt, false, r.mode, r.throughput, r.throughput_best);
    }
  }
}

std::vector<SummaryRow> aggregate(std::span<const MetricReport> reports, Grouping grouping) {
  if (reports.empty()) throw EmptyGroup("no episodes to aggregate");
  using Key = std::tuple<std::string, std::string, int>;
  std::map<Key, std::vector<const MetricReport*>> groups;
  for (const auto& r : reports) {
    const bool by_type = grouping == Grouping::PolicyMapTypeAgents || grouping == Grouping::PolicyMapType;
    const bool by_agents = grouping == Grouping::PolicyMapTypeAgents || grouping == Grouping::PolicyAgents;
    groups[{r.policy, by_type ? r.map_type : std::string("*"), by_agents ? r.agents : -1}].push_back(&r);
  }

  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    std::tie(row.policy, row.map_type, row.agents) = key;
    row.episodes = static_cast<int>(members.size());
    int solved = 0, mapf = 0, lmapf = 0, with_perf = 0;
    double soc_sum = 0, makespan_sum = 0, tp_sum = 0, coord_sum = 0, perf_sum = 0, latency_sum = 0;
    for (const auto* r : members) {
      coord_sum += r->coordination;
      latency_sum += r->mean_latency_ms;
      if (r->performance) {
        perf_sum += *r->performance;
        ++with_perf;
      }
      if (r->mode == EpisodeMode::MAPF) {
        ++mapf;
        if (r->solved) {
          ++solved;
          soc_sum += static_cast<double>(r->soc);
          makespan_sum += r->makespan;
        }
      } else {
        ++lmapf;
        tp_sum += r->throughput;
      }
    }
    row.csr = mapf > 0 ? static_cast<double>(solved) / mapf : 0.0;
    if (solved > 0) {
      row.mean_soc = soc_sum / solved;
      row.mean_makespan = makespan_sum / solved;
    }
    if (lmapf > 0) row.mean_throughput = tp_sum / lmapf;
    row.mean_coordination = coord_sum / row.episodes;
    if (with_perf > 0) row.mean_performance = perf_sum / with_perf;
    row.mean_latency_ms = latency_sum / row.episodes;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string fmt(std::optional<double> v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

Json opt(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "policy,map_type,agents,episodes,csr,mean_soc,mean_makespan,mean_throughput,mean_coordination,mean_performance,mean_latency_ms\n";
  for (const auto& r : rows) {
    out += r.policy + ',' + r.map_type + ',' + (r.agents >= 0 ? std::to_string(r.agents) : "*") + ',' +
           std::to_string(r.episodes) + ',' + fmt(r.csr) + ',' + fmt(r.mean_soc) + ',' + fmt(r.mean_makespan) + ',' +
           fmt(r.mean_throughput) + ',' + fmt(r.mean_coordination) + ',' + fmt(r.mean_performance) + ',' +
           fmt(r.mean_latency_ms) + '\n';
  }
  return out;
}

Json summary_json(std::span<const SummaryRow> rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"policy", r.policy},
                   {"map_type", r.map_type},
                   {"agents", r.agents >= 0 ? Json(r.agents) : Json("*")},
                   {"episodes", r.episodes},
                   {"csr", r.csr},
                   {"mean_soc", opt(r.mean_soc)},
                   {"mean_makespan", opt(r.mean_makespan)},
                   {"mean_throughput", opt(r.mean_throughput)},
                   {"mean_coordination", r.mean_coordination},
                   {"mean_performance", opt(r.mean_performance)},
                   {"mean_latency_ms", r.mean_latency_ms}});
  }
  return out;
}

Json report_json(const MetricReport& r) {
  Json j{{"instance_id", r.instance_id},
         {"map_name", r.map_name},
         {"map_type", r.map_type},
         {"policy", r.policy},
         {"mode", mode_name(r.mode)},
         {"agents", r.agents},
         {"csr", r.mode == EpisodeMode::MAPF ? Json(r.solved ? 1 : 0) : Json(nullptr)},
         {"steps", r.steps},
         {"collisions", r.collisions},
         {"invalid_actions", r.invalid_actions},
         {"coordination", r.coordination},
         {"performance", opt(r.performance)},
         {"pathfinding", opt(r.pathfinding)},
         {"mean_latency_ms", r.mean_latency_ms},
         {"total_latency_ms", r.total_latency_ms}};
  if (r.mode == EpisodeMode::MAPF) {
    j["soc"] = r.solved ? Json(r.soc) : Json(nullptr);
    j["makespan"] = r.solved ? Json(r.makespan) : Json(nullptr);
    j["soc_best"] = r.soc_best ? Json(*r.soc_best) : Json(nullptr);
  } else {
    j["completions"] = r.completions;
    j["throughput"] = r.throughput;
    j["throughput_best"] = opt(r.throughput_best);
  }
  return j;
}

}  // namespace gridflow
