#pragma once

#include "gridflow/sim.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gridflow {

/// SoC_best / SoC when a MAPF episode is solved, 0 when it is not, and
/// throughput / throughput_best for lifelong runs. Throws MissingBest when
/// the needed best value is absent.
double performance(long soc, std::optional<long> soc_best, bool solved, EpisodeMode mode, double throughput,
                   std::optional<double> throughput_best);

/// 1 - collisions / (agents * episode_length).
double coordination(long num_collisions, int num_agents, int episode_length);

/// (runtime_1 / runtime_2) / (agents_1 / agents_2); requires agents_1 <
/// agents_2 and positive runtimes (OrderViolation otherwise).
double scalability(double runtime_1, int agents_1, double runtime_2, int agents_2);

/// optimal / actual so that 1 is a shortest path; 0 when not found.
double pathfinding(long single_agent_soc, long optimal_soc, bool found);

struct MetricReport {
  std::string instance_id;
  std::string map_name;
  std::string map_type;
  std::string policy;
  EpisodeMode mode = EpisodeMode::MAPF;
  int agents = 0;
  bool solved = false;
  long soc = 0;        // solved episodes only
  int makespan = 0;    // solved episodes only
  int steps = 0;
  long collisions = 0;
  long invalid_actions = 0;
  int completions = 0;
  double throughput = 0.0;
  double coordination = 1.0;
  std::optional<double> performance;
  std::optional<long> soc_best;
  std::optional<double> throughput_best;
  std::optional<double> pathfinding;  // single-agent episodes
  double mean_latency_ms = 0.0;
  double total_latency_ms = 0.0;
};

/// Everything computable from one trace; performance needs set_bests.
MetricReport episode_metrics(const EpisodeTrace& trace);

/// Fills soc_best / throughput_best / performance for every report, taking
/// the bests over all reports sharing an instance_id.
void set_bests(std::span<MetricReport> reports);

enum class Grouping { PolicyMapTypeAgents, PolicyAgents, PolicyMapType, Policy };

struct SummaryRow {
  std::string policy;
  std::string map_type;
  int agents = -1;  // -1 when not grouped by agents
  int episodes = 0;
  double csr = 0.0;
  std::optional<double> mean_soc;       // over solved MAPF episodes
  std::optional<double> mean_makespan;  // over solved MAPF episodes
  std::optional<double> mean_throughput;
  double mean_coordination = 0.0;
  std::optional<double> mean_performance;
  double mean_latency_ms = 0.0;
};

/// Rows sorted by their group key. Throws EmptyGroup on no reports.
std::vector<SummaryRow> aggregate(std::span<const MetricReport> reports, Grouping grouping);

std::string summary_csv(std::span<const SummaryRow> rows);
Json summary_json(std::span<const SummaryRow> rows);
Json report_json(const MetricReport& report);

/// Map-type label from a map name: the name with trailing digits and
/// separators removed ("maze-003" -> "maze").
std::string map_type_of(const std::string& map_name);

}  // namespace gridflow
