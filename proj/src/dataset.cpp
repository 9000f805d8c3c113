#include "gridflow/dataset.hpp"

#include "gridflow/json_io.hpp"

#include <bit>
#include <cstdio>
#include <future>

namespace gridflow {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>((v >> 8) & 0xFF);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out += static_cast<char>((v >> s) & 0xFF);
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int s = 0; s < 4; ++s) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + static_cast<std::size_t>(s)])) << (8 * s);
  return v;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::string scenario_id(int map_index, int agents, int group, int s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "maze-%03d-g%d-a%d-s%d", map_index, group, agents, s);
  return buf;
}

struct Task {
  int map_index;
  int group;
  int agents;
  Instance instance;
};

struct Outcome {
  ScenarioRecord record;
  std::vector<Sample> samples;
};

Outcome run_task(const Task& task, const Recipe& recipe) {
  Outcome out;
  out.record.id = task.instance.id;
  out.record.map_index = task.map_index;
  out.record.agents = task.agents;

  ExpertConfig cfg = recipe.expert;
  cfg.seed = splitmix64(recipe.expert.seed ^ hash_string(task.instance.id));
  Solution solution;
  try {
    solution = solve_prioritized(task.instance, cfg);
  } catch (const Error& e) {
    out.record.failure = e.kind() + ": " + e.what();
    return out;
  }
  const auto report = validate(task.instance, solution);
  if (!report.ok) {
    out.record.failure = "InvalidSolution: " + report.violations.front().detail;
    return out;
  }

  const auto& map = task.instance.map;
  std::vector<DistanceField> distances;
  for (const Cell g : task.instance.goals) distances.push_back(bfs_distance(map, g));
  const int span = makespan(solution);
  for (int t = 0; t < span; ++t) {
    const auto now = solution.positions(t);
    const auto next = solution.positions(t + 1);
    Sample s;
    s.instance_id = task.instance.id;
    s.t = t;
    s.features = build_features<float>(map, now, task.instance.goals, distances,
                                       state_rng(recipe.seed, task.instance.id, t), recipe.features);
    s.labels = build_label(map, now, next, t).actions;
    out.samples.push_back(std::move(s));
  }
  out.record.solved = true;
  out.record.num_samples = span;
  out.record.soc = soc(solution);
  out.record.makespan = span;
  return out;
}

}  // namespace

std::string encode_sample(const Sample& sample) {
  const int n = sample.features.height(), m = sample.features.width(), k = sample.features.channels();
  if (sample.labels.rows() != n || sample.labels.cols() != m)
    throw DimensionMismatch("labels and features disagree in shape");
  std::string out;
  const std::size_t body = 6 + 4 * static_cast<std::size_t>(n * m * k) + static_cast<std::size_t>(n * m);
  out.reserve(4 + body);
  put_u32(out, static_cast<std::uint32_t>(body));
  put_u16(out, static_cast<std::uint16_t>(n));
  put_u16(out, static_cast<std::uint16_t>(m));
  put_u16(out, static_cast<std::uint16_t>(k));
  for (float v : sample.features.flat()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) out += static_cast<char>(sample.labels(r, c));
  return out;
}

Sample decode_sample(std::string_view bytes, std::size_t& offset) {
  if (offset + 10 > bytes.size()) throw DimensionMismatch("truncated sample header");
  const std::uint32_t len = get_u32(bytes, offset);
  const int n = get_u16(bytes, offset + 4), m = get_u16(bytes, offset + 6), k = get_u16(bytes, offset + 8);
  const std::size_t expected = 6 + 4 * static_cast<std::size_t>(n * m * k) + static_cast<std::size_t>(n * m);
  if (len != expected || offset + 4 + len > bytes.size()) throw DimensionMismatch("sample record length mismatch");
  Sample s;
  s.features = FeatureTensor<float>(n, m, k);
  std::size_t at = offset + 10;
  float* data = s.features.data().data();
  for (int i = 0; i < n * m * k; ++i, at += 4) data[i] = std::bit_cast<float>(get_u32(bytes, at));
  s.labels.resize(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) s.labels(r, c) = static_cast<std::uint8_t>(bytes[at++]);
  offset += 4 + len;
  return s;
}

FileSampleSink::FileSampleSink(const std::filesystem::path& path, std::uint64_t capacity_bytes)
    : out_(path, std::ios::binary | std::ios::trunc), capacity_(capacity_bytes) {
  if (!out_) throw SinkFull("cannot open " + path.string() + " for writing");
}

void FileSampleSink::write(const Sample& sample) {
  const auto bytes = encode_sample(sample);
  if (written_ + bytes.size() > capacity_)
    throw SinkFull("sample sink capacity of " + std::to_string(capacity_) + " bytes exceeded");
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw SinkFull("write to sample file failed");
  written_ += bytes.size();
}

void MemorySampleSink::write(const Sample& sample) {
  if (samples.size() >= capacity_) throw SinkFull("memory sink holds at most " + std::to_string(capacity_) + " samples");
  samples.push_back(sample);
}

Recipe desk_recipe(std::uint64_t seed) {
  Recipe r;
  r.seed = seed;
  r.maps = MazeRecipe{10, 16, 16, 0.3, 0.8, 0.3, 1.0};
  r.scenarios = {{2, 4}, {2, 8}, {2, 12}};
  r.expert = ExpertConfig{2000, 50, seed};
  return r;
}

Recipe full_recipe(std::uint64_t seed) {
  Recipe r;
  r.seed = seed;
  r.maps = MazeRecipe{180, 32, 32, 0.2, 1.0, 0.0, 1.0};
  r.scenarios = {{2, 16}, {5, 32}, {20, 64}, {40, 96}, {60, 128}};
  r.expert = ExpertConfig{10000, 100, seed};
  return r;
}

std::vector<GridMap> recipe_maps(const Recipe& recipe, std::vector<std::string>* names) {
  std::vector<GridMap> maps;
  if (!recipe.map_files.empty()) {
    for (const auto& file : recipe.map_files) {
      maps.push_back(parse_map(read_file(file)));
      if (names) names->push_back(std::filesystem::path(file).stem().string());
    }
    return maps;
  }
  const auto& m = recipe.maps;
  for (int i = 0; i < m.count; ++i) {
    Engine rng(splitmix64(recipe.seed ^ (0x100000001b3ULL * static_cast<std::uint64_t>(i + 1))));
    const double density = m.density_min + (m.density_max - m.density_min) * uniform_real(rng);
    const double braid = m.braid_min + (m.braid_max - m.braid_min) * uniform_real(rng);
    maps.push_back(generate_maze(m.height, m.width, density, braid, rng()));
    if (names) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "maze-%03d", i);
      names->push_back(buf);
    }
  }
  return maps;
}

DatasetMeta build_dataset(const Recipe& recipe, SampleSink& sink, const std::function<void(const std::string&)>& log) {
  if (recipe.scenarios.empty()) throw InvalidRecipe("recipe has no scenario groups");
  for (const auto& g : recipe.scenarios)
    if (g.count < 0 || g.agents <= 0) throw InvalidRecipe("scenario groups need count >= 0 and agents > 0");

  DatasetMeta meta;
  meta.recipe = recipe;
  const auto maps = recipe_maps(recipe, &meta.map_names);

  std::vector<Task> tasks;
  for (int mi = 0; mi < static_cast<int>(maps.size()); ++mi) {
    for (int gi = 0; gi < static_cast<int>(recipe.scenarios.size()); ++gi) {
      const auto& group = recipe.scenarios[static_cast<std::size_t>(gi)];
      for (int s = 0; s < group.count; ++s) {
        auto id = scenario_id(mi, group.agents, gi, s);
        const std::uint64_t seed = splitmix64(recipe.seed ^ hash_string(id));
        tasks.push_back({mi, gi, group.agents, generate_scenario(maps[static_cast<std::size_t>(mi)], group.agents, seed, id)});
      }
    }
  }

  const std::size_t jobs = static_cast<std::size_t>(std::max(1, recipe.jobs));
  for (std::size_t begin = 0; begin < tasks.size(); begin += jobs) {
    const std::size_t end = std::min(tasks.size(), begin + jobs);
    std::vector<std::future<Outcome>> running;
    for (std::size_t i = begin; i < end; ++i)
      running.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_task,
                                   std::cref(tasks[i]), std::cref(recipe)));
    for (auto& f : running) {
      Outcome o = f.get();
      o.record.first_sample = meta.sample_count;
      for (const auto& s : o.samples) sink.write(s);
      meta.sample_count += o.samples.size();
      if (!o.record.solved) {
        ++meta.failures;
        if (log) log("expert failed on " + o.record.id + ": " + o.record.failure);
      }
      meta.scenarios.push_back(std::move(o.record));
    }
  }

  const double rate = tasks.empty() ? 0.0 : static_cast<double>(meta.failures) / static_cast<double>(tasks.size());
  if (log) {
    log("scenarios: " + std::to_string(tasks.size()) + ", failed: " + std::to_string(meta.failures) +
        ", samples: " + std::to_string(meta.sample_count));
  }
  if (rate > recipe.max_failure_rate)
    throw ExpertFailureRateExceeded("expert failed on " + std::to_string(meta.failures) + " of " +
                                    std::to_string(tasks.size()) + " scenarios (threshold " +
                                    std::to_string(recipe.max_failure_rate) + ")");
  return meta;
}

DatasetMeta export_dataset(const Recipe& recipe, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "maps");
  std::ofstream log_file(dir / "build.log", std::ios::trunc);
  auto log = [&](const std::string& line) { log_file << line << '\n'; };

  std::vector<std::string> names;
  const auto maps = recipe_maps(recipe, &names);
  for (std::size_t i = 0; i < maps.size(); ++i) write_file((dir / "maps" / (names[i] + ".map")).string(), render_map(maps[i]));

  DatasetMeta meta;
  {
    FileSampleSink sink(dir / "samples.bin");
    meta = build_dataset(recipe, sink, log);
  }
  write_file((dir / "meta.json").string(), meta_to_json(meta).dump(2) + "\n");
  return meta;
}

}  // namespace gridflow
