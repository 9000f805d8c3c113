#include <doctest.h>

#include "gridflow/policies.hpp"
#include "gridflow/sim.hpp"
#include "support.hpp"

#include <sstream>

using namespace gridflow;

namespace {

const std::string kCli = GRIDFLOW_CLI;

Json init_for(const Instance& inst) {
  return init_message(inst.map, inst.num_agents(), EpisodeMode::MAPF, Selection::Argmax, 0);
}

// Checks an act reply against the protocol: type, step, and one legal id per cell.
void check_act_schema(const Json& reply, int t, const GridMap& map) {
  REQUIRE(reply.is_object());
  CHECK(reply["type"] == "act");
  CHECK(reply["t"] == t);
  REQUIRE(reply.contains("field"));
  REQUIRE(reply["field"].is_array());
  CHECK(reply["field"].size() == static_cast<std::size_t>(map.size()));
  for (const auto& v : reply["field"]) {
    REQUIRE(v.is_number_integer());
    const int id = v.get<int>();
    CHECK(((id >= 0 && id <= 4) || id == 255));
  }
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("base64 round trip") {
  for (std::size_t n = 0; n < 20; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (std::size_t i = 0; i < n; ++i) bytes[i] = static_cast<std::uint8_t>(i * 37 + 5);
    CHECK(base64_decode(base64_encode(bytes)) == bytes);
  }
  const std::string hello = "hello";
  CHECK(base64_encode(std::vector<std::uint8_t>(hello.begin(), hello.end())) == "aGVsbG8=");
  CHECK_THROWS_AS(base64_decode("abc"), ProtocolViolation);
  CHECK_THROWS_AS(base64_decode("ab!="), ProtocolViolation);
}

TEST_CASE("init message fields") {
  const Instance inst = testing::yield_instance();
  const Json j = init_for(inst);
  CHECK(j["type"] == "init");
  CHECK(j["map"] == "....#.##");
  CHECK(j["k"] == 6);
  CHECK(j["num_agents"] == 2);
  CHECK(j["action_encoding"]["right"] == 4);
  CHECK(j["channel_order"][0] == "map");
}

TEST_CASE("obs carries features on request") {
  const Instance inst = testing::yield_instance();
  std::vector<DistanceField> d;
  for (const Cell g : inst.goals) d.push_back(bfs_distance(inst.map, g));
  const auto f = build_features<float>(inst.map, inst.starts, inst.goals, d, CounterRng(2));
  const Json with = obs_message(0, inst.starts, inst.goals, &f);
  const Json without = obs_message(0, inst.starts, inst.goals);
  CHECK_FALSE(without.contains("features"));
  const auto back = obs_features(with, 2, 4);
  REQUIRE(back);
  CHECK(*back == f);
  CHECK_THROWS_AS(obs_features(with, 4, 4), ProtocolViolation);
  const auto o = parse_obs(with);
  CHECK(o.positions == inst.starts);
  CHECK(o.goals == inst.goals);
}

TEST_CASE("ready negotiation") {
  CHECK(parse_ready({{"type", "ready"}, {"features", true}}));
  CHECK_FALSE(parse_ready({{"type", "ready"}}));
  CHECK_THROWS_AS(parse_ready({{"type", "act"}}), ProtocolViolation);
  CHECK_THROWS_AS(parse_ready({{"type", "ready"}, {"features", "yes"}}), ProtocolViolation);
}

TEST_CASE("act parsing") {
  const Instance inst = testing::yield_instance();
  const std::vector<Action> acts{Action::Right, Action::Left};
  const auto f = parse_act(act_actions_message(3, acts), 3, inst.map, inst.starts);
  CHECK(f.t == 3);
  CHECK(f.at({0, 0}) == Action::Right);
  CHECK(f.at({0, 3}) == Action::Left);
  CHECK(f.at({0, 1}) == Action::Free);

  // field takes precedence over actions
  ActionField waits(2, 4, 3);
  waits.set({0, 0}, Action::Wait);
  Json both = act_field_message(3, waits);
  both["actions"] = {4, 3};
  CHECK(parse_act(both, 3, inst.map, inst.starts) == waits);

  CHECK_THROWS_AS(parse_act(act_actions_message(2, acts), 3, inst.map, inst.starts), ProtocolViolation);
  CHECK_THROWS_AS(parse_act(Json{{"type", "act"}, {"t", 0}, {"actions", {1}}}, 0, inst.map, inst.starts),
                  ProtocolViolation);
  CHECK_THROWS_AS(parse_act(Json{{"type", "act"}, {"t", 0}, {"actions", {1, 7}}}, 0, inst.map, inst.starts),
                  ProtocolViolation);
  CHECK_THROWS_AS(parse_act(Json{{"type", "act"}, {"t", 0}, {"field", {0, 0}}}, 0, inst.map, inst.starts),
                  ProtocolViolation);
  CHECK_THROWS_AS(parse_act(Json{{"type", "act"}, {"t", 0}}, 0, inst.map, inst.starts), ProtocolViolation);
  CHECK_THROWS_AS(parse_act(Json{{"type", "ready"}}, 0, inst.map, inst.starts), ProtocolViolation);
}

TEST_CASE("builtin policies reply with schema-valid fields") {
  for (const auto& name : builtin_policy_names()) {
    CAPTURE(name);
    auto policy = make_policy("builtin:" + name);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Instance inst = testing::maze_instance(seed, 12, 5);
      const Json ready = policy->request(init_for(inst), std::chrono::milliseconds(1000));
      CHECK(ready["type"] == "ready");
      const Json reply = policy->request(obs_message(0, inst.starts, inst.goals), std::chrono::milliseconds(1000));
      check_act_schema(reply, 0, inst.map);
      const ActionField f = parse_act(reply, 0, inst.map, inst.starts);
      for (const Cell c : inst.starts) CHECK(f.at(c) != Action::Free);
    }
  }
  CHECK_THROWS_AS(make_policy("builtin:nope"), ProtocolViolation);
}

TEST_CASE("random_valid never proposes a wall move") {
  auto policy = make_policy("builtin:random_valid");
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const GridMap m = testing::random_map(6, 6, 0.4, rng);
    auto free = m.free_cells();
    if (free.size() < 3) continue;
    std::shuffle(free.begin(), free.end(), rng);
    const std::vector<Cell> pos(free.begin(), free.begin() + 3);
    policy->request(init_message(m, 3, EpisodeMode::MAPF, Selection::Argmax, rng()), std::chrono::milliseconds(100));
    const Json reply = policy->request(obs_message(0, pos, pos), std::chrono::milliseconds(100));
    const ActionField f = parse_act(reply, 0, m, pos);
    for (const Cell c : pos) CHECK(m.is_free(step(c, f.at(c))));
  }
}

TEST_CASE("builtin policies reject out-of-order messages") {
  auto policy = make_policy("builtin:pibt_step");
  const Instance inst = testing::yield_instance();
  CHECK_THROWS_AS(policy->request(obs_message(0, inst.starts, inst.goals), std::chrono::milliseconds(10)),
                  ProtocolViolation);
  CHECK_THROWS_AS(policy->request(Json{{"type", "bogus"}}, std::chrono::milliseconds(10)), ProtocolViolation);
}

TEST_CASE("serve_policy answers line by line and stops at end") {
  const Instance inst = testing::yield_instance();
  std::stringstream in;
  in << init_for(inst).dump() << "\n"
     << obs_message(0, inst.starts, inst.goals).dump() << "\n"
     << end_message(1, false).dump() << "\n"
     << obs_message(1, inst.starts, inst.goals).dump() << "\n";
  std::stringstream out;
  ExpertReplayPolicy policy;
  CHECK(serve_policy(policy, in, out) == 3);
  std::string line;
  std::getline(out, line);
  CHECK(Json::parse(line)["type"] == "ready");
  std::getline(out, line);
  check_act_schema(Json::parse(line), 0, inst.map);
  CHECK_FALSE(std::getline(out, line));
}

TEST_CASE("subprocess policy speaks the protocol") {
  const Instance inst = testing::maze_instance(77, 12, 4);
  auto builtin = make_policy("builtin:expert_replay");
  auto process = make_policy(kCli + " serve-builtin expert_replay");
  EpisodeConfig cfg;
  const auto a = run_episode(inst, *builtin, cfg);
  const auto b = run_episode(inst, *process, cfg);
  CHECK(b.success);
  CHECK(a.induced_solution() == b.induced_solution());
}

TEST_CASE("subprocess timeout and early exit") {
  const Instance inst = testing::yield_instance();
  {
    ProcessPolicy slow("sleep 5");
    CHECK_THROWS_AS(slow.request(init_for(inst), std::chrono::milliseconds(100)), PolicyTimeout);
  }
  {
    ProcessPolicy gone("true");
    CHECK_THROWS_AS(gone.request(init_for(inst), std::chrono::milliseconds(2000)), ProtocolViolation);
  }
  {
    ProcessPolicy garbage("read line; echo not-json; sleep 1");
    CHECK_THROWS_AS(garbage.request(init_for(inst), std::chrono::milliseconds(2000)), ProtocolViolation);
  }
}

}  // TEST_SUITE
