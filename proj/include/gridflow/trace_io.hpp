#pragma once

// EpisodeTrace as JSON lines:
//   {"type":"header","version":1,"instance_id","map_name","map_type","policy","height","width",
//    "map":"<row-major '.'/'#'>","starts":[[r,c],...],"goals":[...],"mode","max_steps",
//    "collision","select","seed","goal_seed"}
//   {"type":"step","t","positions","goals","actions":[ids],"collisions":[...],"invalid",
//    "latency_ms","completed":[ids]}                                   (one per step)
//   {"type":"summary","success","aborted","steps","collisions","completions",
//    "final_positions","final_goals","soc","makespan"}              (soc/makespan on success)

#include "gridflow/sim.hpp"

#include <iosfwd>
#include <string>

namespace gridflow {

void write_trace(std::ostream& out, const EpisodeTrace& trace);
/// Throws MalformedTrace.
EpisodeTrace read_trace(std::istream& in);

EpisodeTrace load_trace(const std::string& path);
void save_trace(const std::string& path, const EpisodeTrace& trace);

}  // namespace gridflow
