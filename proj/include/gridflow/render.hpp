#pragma once

#include "gridflow/sim.hpp"

#include <filesystem>
#include <string>

namespace gridflow {

/// ASCII frame: '#' obstacle, '.' free, '+' a goal, agents as 0-9a-zA-Z
/// (index modulo 62).
std::string ascii_frame(const GridMap& map, std::span<const Cell> positions, std::span<const Cell> goals, int t);

std::string svg_frame(const GridMap& map, std::span<const Cell> positions, std::span<const Cell> goals, int t);

enum class FrameFormat { Svg, Ascii };

/// One file per state (steps + final), frame_0000.svg / .txt. Returns the
/// number of frames written.
int render_trace(const EpisodeTrace& trace, FrameFormat format, const std::filesystem::path& out_dir);

}  // namespace gridflow
