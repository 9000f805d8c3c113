#include "gridflow/protocol.hpp"

#include <bit>

namespace gridflow {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

template <typename T>
T field_or_throw(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) throw ProtocolViolation(std::string(where) + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ProtocolViolation(std::string(where) + ": bad \"" + key + "\"");
  }
}

}  // namespace

const char* mode_name(EpisodeMode mode) { return mode == EpisodeMode::MAPF ? "mapf" : "lmapf"; }

EpisodeMode parse_mode(std::string_view s) {
  if (s == "mapf") return EpisodeMode::MAPF;
  if (s == "lmapf") return EpisodeMode::LMAPF;
  throw ProtocolViolation("unknown mode '" + std::string(s) + "'");
}

const char* selection_name(Selection s) { return s == Selection::Argmax ? "argmax" : "sample"; }

Selection parse_selection(std::string_view s) {
  if (s == "argmax") return Selection::Argmax;
  if (s == "sample") return Selection::Sample;
  throw ProtocolViolation("unknown action selection '" + std::string(s) + "'");
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    for (int s = 18; s >= 0; s -= 6) out += kAlphabet[(v >> s) & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ProtocolViolation("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      int d = 0;
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
      } else {
        if (pad) throw ProtocolViolation("bad base64 padding");
        d = decode_char(c);
        if (d < 0) throw ProtocolViolation("bad base64 character");
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  return out;
}

Json init_message(const GridMap& map, int num_agents, EpisodeMode mode, Selection select, std::uint64_t seed) {
  return Json{{"type", "init"},
              {"version", kProtocolVersion},
              {"mode", mode_name(mode)},
              {"height", map.height()},
              {"width", map.width()},
              {"map", map_string(map)},
              {"num_agents", num_agents},
              {"k", kNumChannels},
              {"channel_order", std::vector<std::string>(kChannelOrder.begin(), kChannelOrder.end())},
              {"action_encoding", {{"wait", 0}, {"up", 1}, {"down", 2}, {"left", 3}, {"right", 4}}},
              {"features_available", true},
              {"select", selection_name(select)},
              {"seed", seed}};
}

Json obs_message(int t, std::span<const Cell> positions, std::span<const Cell> goals,
                 const FeatureTensor<float>* features) {
  Json agents = Json::array();
  for (std::size_t i = 0; i < positions.size(); ++i)
    agents.push_back({{"id", i}, {"r", positions[i].row}, {"c", positions[i].col}, {"gr", goals[i].row}, {"gc", goals[i].col}});
  Json j{{"type", "obs"}, {"t", t}, {"agents", std::move(agents)}};
  if (features) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(features->flat().size() * 4);
    for (float v : features->flat()) {
      const auto u = std::bit_cast<std::uint32_t>(v);
      for (int s = 0; s < 32; s += 8) bytes.push_back(static_cast<std::uint8_t>((u >> s) & 0xFF));
    }
    j["features"] = base64_encode(bytes);
  }
  return j;
}

Json end_message(int t, bool success) { return Json{{"type", "end"}, {"t", t}, {"success", success}}; }

std::optional<FeatureTensor<float>> obs_features(const Json& obs, int height, int width) {
  if (!obs.contains("features")) return std::nullopt;
  const auto bytes = base64_decode(obs["features"].get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(height * width * kNumChannels) * 4)
    throw ProtocolViolation("features payload has the wrong size");
  FeatureTensor<float> f(height, width);
  float* data = f.data().data();
  for (std::size_t i = 0; i < bytes.size() / 4; ++i) {
    std::uint32_t u = 0;
    for (std::size_t s = 0; s < 4; ++s) u |= static_cast<std::uint32_t>(bytes[4 * i + s]) << (8 * s);
    data[i] = std::bit_cast<float>(u);
  }
  return f;
}

bool parse_ready(const Json& reply) {
  if (!reply.is_object() || reply.value("type", "") != "ready")
    throw ProtocolViolation("expected a \"ready\" reply to init");
  if (!reply.contains("features")) return false;
  if (!reply["features"].is_boolean()) throw ProtocolViolation("ready: \"features\" must be a boolean");
  return reply["features"].get<bool>();
}

ActionField parse_act(const Json& reply, int t, const GridMap& map, std::span<const Cell> positions) {
  if (!reply.is_object() || reply.value("type", "") != "act") throw ProtocolViolation("expected an \"act\" reply");
  const int rt = field_or_throw<int>(reply, "t", "act");
  if (rt != t) throw ProtocolViolation("act for t=" + std::to_string(rt) + ", expected t=" + std::to_string(t));

  if (reply.contains("field")) {
    const auto ids = field_or_throw<std::vector<int>>(reply, "field", "act");
    if (ids.size() != static_cast<std::size_t>(map.size()))
      throw ProtocolViolation("field has " + std::to_string(ids.size()) + " entries, expected " + std::to_string(map.size()));
    ActionField f(map.height(), map.width(), t);
    for (int i = 0; i < map.size(); ++i) {
      const int id = ids[static_cast<std::size_t>(i)];
      if (!is_move_action(id) && id != static_cast<int>(Action::Free))
        throw ProtocolViolation("field entry " + std::to_string(i) + " has unknown action id " + std::to_string(id));
      f.set(map.cell(i), static_cast<Action>(id));
    }
    return f;
  }
  if (reply.contains("actions")) {
    const auto ids = field_or_throw<std::vector<int>>(reply, "actions", "act");
    if (ids.size() != positions.size())
      throw ProtocolViolation("actions has " + std::to_string(ids.size()) + " entries, expected " +
                              std::to_string(positions.size()));
    std::vector<Action> actions;
    for (int id : ids) {
      if (!is_move_action(id)) throw ProtocolViolation("unknown action id " + std::to_string(id));
      actions.push_back(static_cast<Action>(id));
    }
    return field_from_actions(map, positions, actions, t);
  }
  throw ProtocolViolation("act reply has neither \"field\" nor \"actions\"");
}

Json act_field_message(int t, const ActionField& field) {
  std::vector<int> ids;
  ids.reserve(static_cast<std::size_t>(field.actions.size()));
  for (int r = 0; r < field.height(); ++r)
    for (int c = 0; c < field.width(); ++c) ids.push_back(field.actions(r, c));
  return Json{{"type", "act"}, {"t", t}, {"field", std::move(ids)}};
}

Json act_actions_message(int t, std::span<const Action> actions) {
  std::vector<int> ids;
  for (Action a : actions) ids.push_back(static_cast<int>(a));
  return Json{{"type", "act"}, {"t", t}, {"actions", std::move(ids)}};
}

Observation parse_obs(const Json& obs) {
  if (!obs.is_object() || obs.value("type", "") != "obs") throw ProtocolViolation("expected an \"obs\" message");
  Observation o;
  o.t = field_or_throw<int>(obs, "t", "obs");
  for (const auto& a : obs.at("agents")) {
    o.positions.push_back({a.at("r").get<int>(), a.at("c").get<int>()});
    o.goals.push_back({a.at("gr").get<int>(), a.at("gc").get<int>()});
  }
  return o;
}

}  // namespace gridflow
