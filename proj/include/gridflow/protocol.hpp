#pragma once

// Newline-delimited JSON step protocol between the engine and a policy.
//
//   engine -> policy  {"type":"init", "version":1, "mode":"mapf"|"lmapf", "height", "width",
//                      "map":"<row-major '.'/'#'>", "num_agents", "k", "channel_order":[...],
//                      "action_encoding":{"wait":0,...}, "features_available":true,
//                      "select":"argmax"|"sample", "seed"}
//   policy -> engine  {"type":"ready", "features":bool}
//   engine -> policy  {"type":"obs", "t", "agents":[{"id","r","c","gr","gc"}], "features":"<base64>"?}
//   policy -> engine  {"type":"act", "t", "field":[n*m ints]} or {"type":"act", "t", "actions":[N ints]}
//   engine -> policy  {"type":"end", "t", "success":bool}   (no reply)
//
// "features" in obs is present only when the policy asked for it in "ready";
// it carries the little-endian f32 (n, m, k) input tensor, channel-last.
// When a reply holds both "field" and "actions", "field" wins.

#include "gridflow/action_field.hpp"
#include "gridflow/features.hpp"
#include "gridflow/json_io.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridflow {

inline constexpr int kProtocolVersion = 1;

enum class EpisodeMode { MAPF, LMAPF };
enum class Selection { Argmax, Sample };

const char* mode_name(EpisodeMode mode);
EpisodeMode parse_mode(std::string_view s);
const char* selection_name(Selection s);
Selection parse_selection(std::string_view s);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

Json init_message(const GridMap& map, int num_agents, EpisodeMode mode, Selection select, std::uint64_t seed);
Json obs_message(int t, std::span<const Cell> positions, std::span<const Cell> goals,
                 const FeatureTensor<float>* features = nullptr);
Json end_message(int t, bool success);

/// Features carried by an obs message, if any.
std::optional<FeatureTensor<float>> obs_features(const Json& obs, int height, int width);

/// Checks a "ready" reply and returns whether the policy wants features.
bool parse_ready(const Json& reply);

/// Validates an "act" reply against the expected step and converts it to a
/// field: a full field is taken as-is (ids 0..4 or 255), per-agent actions
/// (ids 0..4) are written at the agents' cells. Throws ProtocolViolation.
ActionField parse_act(const Json& reply, int t, const GridMap& map, std::span<const Cell> positions);

/// Reply helpers for policy implementations.
Json act_field_message(int t, const ActionField& field);
Json act_actions_message(int t, std::span<const Action> actions);

/// Decoded view of an obs message.
struct Observation {
  int t = 0;
  std::vector<Cell> positions;
  std::vector<Cell> goals;
};
Observation parse_obs(const Json& obs);

}  // namespace gridflow
