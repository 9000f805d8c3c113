#pragma once

#include "gridflow/dataset.hpp"
#include "gridflow/mapf.hpp"

#include <json.hpp>

#include <string>

namespace gridflow {

using Json = nlohmann::json;

void to_json(Json& j, const Cell& c);     // [row, col]
void from_json(const Json& j, Cell& c);
void to_json(Json& j, const Collision& c);
void to_json(Json& j, const Violation& v);
void to_json(Json& j, const ValidationReport& r);

/// {"instance_id": ..., "paths": [[[r, c], ...], ...]}
Json solution_to_json(const std::string& instance_id, const Solution& solution);
Solution solution_from_json(const Json& j);

/// {"map_name", "num_agents", "soc", "makespan", "report": ValidationReport}
Json solve_report_json(const Instance& instance, const Solution* solution, const ValidationReport& report);

void to_json(Json& j, const ExpertConfig& c);
void from_json(const Json& j, ExpertConfig& c);
void to_json(Json& j, const Recipe& r);
/// Missing keys keep their defaults. Throws InvalidRecipe.
Recipe recipe_from_json(const Json& j);
Json meta_to_json(const DatasetMeta& meta);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace gridflow
