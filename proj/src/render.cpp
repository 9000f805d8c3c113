#include "gridflow/render.hpp"

#include "gridflow/json_io.hpp"

#include <cstdio>

namespace gridflow {

namespace {

constexpr char kGlyphs[] = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

std::string hue(std::size_t i, std::size_t n) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "hsl(%d,70%%,50%%)", static_cast<int>(360.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n, 1))));
  return buf;
}

}  // namespace

std::string ascii_frame(const GridMap& map, std::span<const Cell> positions, std::span<const Cell> goals, int t) {
  std::vector<std::string> rows(static_cast<std::size_t>(map.height()), std::string(static_cast<std::size_t>(map.width()), '.'));
  for (int r = 0; r < map.height(); ++r)
    for (int c = 0; c < map.width(); ++c)
      if (map.is_obstacle({r, c})) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = '#';
  for (const Cell g : goals) rows[static_cast<std::size_t>(g.row)][static_cast<std::size_t>(g.col)] = '+';
  for (std::size_t i = 0; i < positions.size(); ++i)
    rows[static_cast<std::size_t>(positions[i].row)][static_cast<std::size_t>(positions[i].col)] = kGlyphs[i % 62];
  std::string out = "t=" + std::to_string(t) + "\n";
  for (const auto& row : rows) out += row + "\n";
  return out;
}

std::string svg_frame(const GridMap& map, std::span<const Cell> positions, std::span<const Cell> goals, int t) {
  constexpr int s = 20;
  const int w = map.width() * s, h = map.height() * s;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
                    std::to_string(h + s) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h + s) + "\">\n";
  out += "<rect width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(h) + "\" fill=\"#ffffff\"/>\n";
  for (int r = 0; r < map.height(); ++r)
    for (int c = 0; c < map.width(); ++c)
      if (map.is_obstacle({r, c}))
        out += "<rect x=\"" + std::to_string(c * s) + "\" y=\"" + std::to_string(r * s) + "\" width=\"" +
               std::to_string(s) + "\" height=\"" + std::to_string(s) + "\" fill=\"#333333\"/>\n";
  for (std::size_t i = 0; i < goals.size(); ++i)
    out += "<rect x=\"" + std::to_string(goals[i].col * s + 6) + "\" y=\"" + std::to_string(goals[i].row * s + 6) +
           "\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"" + hue(i, goals.size()) + "\" stroke-width=\"2\"/>\n";
  for (std::size_t i = 0; i < positions.size(); ++i)
    out += "<circle cx=\"" + std::to_string(positions[i].col * s + s / 2) + "\" cy=\"" +
           std::to_string(positions[i].row * s + s / 2) + "\" r=\"" + std::to_string(s / 2 - 2) + "\" fill=\"" +
           hue(i, positions.size()) + "\"/>\n";
  out += "<text x=\"2\" y=\"" + std::to_string(h + s - 5) + "\" font-family=\"monospace\" font-size=\"14\">t=" +
         std::to_string(t) + "</text>\n</svg>\n";
  return out;
}

int render_trace(const EpisodeTrace& trace, FrameFormat format, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  int frames = 0;
  auto emit = [&](std::span<const Cell> positions, std::span<const Cell> goals, int t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.%s", t, format == FrameFormat::Svg ? "svg" : "txt");
    write_file((out_dir / name).string(), format == FrameFormat::Svg ? svg_frame(trace.instance.map, positions, goals, t)
                                                                     : ascii_frame(trace.instance.map, positions, goals, t));
    ++frames;
  };
  for (const auto& s : trace.steps) emit(s.positions, s.goals, s.t);
  emit(trace.final_positions, trace.final_goals, trace.length());
  return frames;
}

}  // namespace gridflow
