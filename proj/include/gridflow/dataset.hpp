#pragma once

#include "gridflow/expert.hpp"
#include "gridflow/features.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gridflow {

/// Fraction of cells that are obstacles when wall_density is 1. A perfect
/// maze on the even-coordinate lattice sits near this value.
inline constexpr double kMaxObstacleFraction = 0.5;

/// Obstacle fraction the maze generator aims for.
inline double target_obstacle_fraction(double wall_density) { return wall_density * kMaxObstacleFraction; }

/// Recursive-backtracker maze with braiding and density adjustment. All free
/// cells are mutually reachable. `braid` is the probability of opening a
/// dead end into a loop; `wall_density` in [0, 1] sets the obstacle target.
/// Requires height, width >= 4.
GridMap generate_maze(int height, int width, double wall_density, double braid, std::uint64_t seed);

/// Starts and goals drawn uniformly without replacement from free cells,
/// each goal in its start's connected region. Throws TooManyAgents.
Instance generate_scenario(const GridMap& map, int num_agents, std::uint64_t seed, std::string id = {});

/// Number of cells in each 4-connected free region, largest first.
std::vector<int> free_components(const GridMap& map);

/// One training pair: input tensor and per-cell labels (255 = masked).
struct Sample {
  std::string instance_id;
  int t = 0;
  FeatureTensor<float> features;
  Grid<std::uint8_t> labels;
};

/// Serialized layout of one samples.bin record, all little-endian:
///   u32 record_len   bytes that follow this field (6 + 4*n*m*k + n*m)
///   u16 n, u16 m, u16 k
///   f32 F_in[n][m][k]
///   u8  labels[n][m]
std::string encode_sample(const Sample& sample);
/// Decodes one record starting at `offset`; advances `offset`.
Sample decode_sample(std::string_view bytes, std::size_t& offset);

class SampleSink {
 public:
  virtual ~SampleSink() = default;
  virtual void write(const Sample& sample) = 0;
};

/// Appends encoded records to a file. Throws SinkFull past `capacity_bytes`.
class FileSampleSink : public SampleSink {
 public:
  explicit FileSampleSink(const std::filesystem::path& path, std::uint64_t capacity_bytes = UINT64_MAX);
  void write(const Sample& sample) override;
  std::uint64_t bytes_written() const { return written_; }

 private:
  std::ofstream out_;
  std::uint64_t capacity_;
  std::uint64_t written_ = 0;
};

class MemorySampleSink : public SampleSink {
 public:
  explicit MemorySampleSink(std::size_t capacity_samples = SIZE_MAX) : capacity_(capacity_samples) {}
  void write(const Sample& sample) override;
  std::vector<Sample> samples;

 private:
  std::size_t capacity_;
};

struct MazeRecipe {
  int count = 10;
  int height = 16;
  int width = 16;
  double density_min = 0.3;
  double density_max = 0.8;
  double braid_min = 0.3;
  double braid_max = 1.0;
};

struct ScenarioGroup {
  int count = 0;
  int agents = 0;
};

struct Recipe {
  std::uint64_t seed = 0;
  MazeRecipe maps;
  /// Existing map files; used instead of generated mazes when non-empty.
  std::vector<std::string> map_files;
  std::vector<ScenarioGroup> scenarios;
  ExpertConfig expert;
  FeatureOptions features;
  /// Build fails when failed / attempted scenarios exceeds this.
  double max_failure_rate = 0.1;
  int jobs = 1;
};

/// The recipe used for desk-scale runs: 10 mazes 16x16, {2,2,2} scenarios
/// with {4,8,12} agents.
Recipe desk_recipe(std::uint64_t seed = 1);
/// Full-scale recipe: 180 mazes 32x32, {2,5,20,40,60} scenarios with
/// {16,32,64,96,128} agents.
Recipe full_recipe(std::uint64_t seed = 1);

struct ScenarioRecord {
  std::string id;
  int map_index = 0;
  int agents = 0;
  bool solved = false;
  std::string failure;  // error kind + message when unsolved
  std::uint64_t first_sample = 0;
  int num_samples = 0;
  long soc = 0;
  int makespan = 0;
};

struct DatasetMeta {
  static constexpr int kFormatVersion = 1;
  Recipe recipe;
  std::vector<std::string> map_names;
  std::vector<ScenarioRecord> scenarios;
  std::uint64_t sample_count = 0;
  int failures = 0;
};

/// Generates maps and scenarios, solves each with the expert, and streams
/// one sample per timestep of every solved scenario. Failures are recorded
/// in the meta and reported through `log`.
DatasetMeta build_dataset(const Recipe& recipe, SampleSink& sink,
                          const std::function<void(const std::string&)>& log = {});

/// Writes meta.json, samples.bin, build.log and maps/ into `dir`.
DatasetMeta export_dataset(const Recipe& recipe, const std::filesystem::path& dir);

/// The generated (or loaded) maps of a recipe, in build order.
std::vector<GridMap> recipe_maps(const Recipe& recipe, std::vector<std::string>* names = nullptr);

}  // namespace gridflow
