#include "gridflow/policies.hpp"

#include <istream>
#include <ostream>

namespace gridflow {

Json BuiltinPolicy::request(const Json& message, std::chrono::milliseconds) {
  const std::string type = message.value("type", "");
  if (type == "init") {
    const int h = message.at("height").get<int>(), w = message.at("width").get<int>();
    const auto text = message.at("map").get<std::string>();
    if (text.size() != static_cast<std::size_t>(h * w)) throw ProtocolViolation("init: map string has the wrong length");
    GridMap::Mask cells(h, w);
    for (int i = 0; i < h * w; ++i) cells(i / w, i % w) = text[static_cast<std::size_t>(i)] == '#' ? 1 : 0;
    map_ = GridMap(std::move(cells));
    mode_ = parse_mode(message.value("mode", "mapf"));
    seed_ = message.value("seed", std::uint64_t{0});
    distances_.clear();
    initialized_ = true;
    reset();
    return Json{{"type", "ready"}, {"features", false}};
  }
  if (type == "obs") {
    if (!initialized_) throw ProtocolViolation("obs before init");
    const auto obs = parse_obs(message);
    const auto actions = act(obs);
    return act_field_message(obs.t, field_from_actions(map_, obs.positions, actions, obs.t));
  }
  throw ProtocolViolation("unexpected message type '" + type + "'");
}

const DistanceField& BuiltinPolicy::distance_to(Cell goal) {
  const int key = map_.index(goal);
  auto it = distances_.find(key);
  if (it == distances_.end()) it = distances_.emplace(key, bfs_distance(map_, goal)).first;
  return it->second;
}

namespace {

std::vector<Action> pibt_fallback(const GridMap& map, const Observation& obs,
                                  const std::function<const DistanceField&(Cell)>& distance_to) {
  std::vector<DistanceField> fields;
  std::vector<double> priorities;
  for (std::size_t i = 0; i < obs.positions.size(); ++i) {
    fields.push_back(distance_to(obs.goals[i]));
    priorities.push_back(fields.back().at(obs.positions[i]).value_or(0));
  }
  return solve_pibt_step(map, obs.positions, priorities, fields);
}

}  // namespace

void ExpertReplayPolicy::reset() {
  plan_.reset();
  plan_start_ = 0;
  plan_goals_.clear();
}

std::vector<Action> ExpertReplayPolicy::act(const Observation& obs) {
  const std::size_t n = obs.positions.size();
  bool on_plan = plan_ && plan_goals_ == obs.goals && obs.t >= plan_start_;
  for (std::size_t i = 0; on_plan && i < n; ++i)
    on_plan = plan_->at(static_cast<int>(i), obs.t - plan_start_) == obs.positions[i];

  if (!on_plan) {
    plan_.reset();
    plan_goals_ = obs.goals;
    plan_start_ = obs.t;
    try {
      plan_ = solve_prioritized(Instance{map_, obs.positions, obs.goals, "replay"}, config_);
    } catch (const Error&) {
      return pibt_fallback(map_, obs, [this](Cell g) -> const DistanceField& { return distance_to(g); });
    }
  }
  std::vector<Action> actions(n);
  const int k = obs.t - plan_start_;
  for (std::size_t i = 0; i < n; ++i)
    actions[i] = action_between(plan_->at(static_cast<int>(i), k), plan_->at(static_cast<int>(i), k + 1));
  return actions;
}

std::vector<Action> GreedyGradientPolicy::act(const Observation& obs) {
  const CounterRng rng = CounterRng(seed_).derive(static_cast<std::uint64_t>(obs.t));
  std::vector<Action> actions;
  for (std::size_t i = 0; i < obs.positions.size(); ++i) {
    const Cell at = obs.positions[i];
    const Gradient g = gradient_at(distance_to(obs.goals[i]), at, rng.derive(i));
    const Action horizontal = g.dx > 0 ? Action::Right : Action::Left;
    const Action vertical = g.dy > 0 ? Action::Down : Action::Up;
    if (g.dx != 0 && g.dy != 0) actions.push_back(rng.derive(i).sign(~0ULL) > 0 ? horizontal : vertical);
    else if (g.dx != 0) actions.push_back(horizontal);
    else if (g.dy != 0) actions.push_back(vertical);
    else actions.push_back(Action::Wait);
  }
  return actions;
}

void PibtStepPolicy::reset() {
  elapsed_.clear();
  last_goals_.clear();
}

std::vector<Action> PibtStepPolicy::act(const Observation& obs) {
  const std::size_t n = obs.positions.size();
  if (elapsed_.size() != n) {
    elapsed_.assign(n, 0.0);
    last_goals_ = obs.goals;
  }
  const CounterRng tie(seed_);
  std::vector<double> priorities(n);
  std::vector<DistanceField> fields;
  fields.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (last_goals_[i] != obs.goals[i]) elapsed_[i] = 0.0;
    fields.push_back(distance_to(obs.goals[i]));
    const double epsilon = static_cast<double>(tie.at(i) >> 11) * 0x1.0p-53;
    priorities[i] = (obs.positions[i] == obs.goals[i] ? 0.0 : elapsed_[i]) + epsilon;
  }
  last_goals_ = obs.goals;
  auto actions = solve_pibt_step(map_, obs.positions, priorities, fields);
  for (std::size_t i = 0; i < n; ++i) {
    const bool arrives = step(obs.positions[i], actions[i]) == obs.goals[i];
    elapsed_[i] = arrives ? 0.0 : elapsed_[i] + 1.0;
  }
  return actions;
}

void RandomValidPolicy::reset() { rng_.seed(splitmix64(seed_ ^ 0x7261'6e64ULL)); }

std::vector<Action> RandomValidPolicy::act(const Observation& obs) {
  std::vector<Action> actions;
  for (const Cell at : obs.positions) {
    const auto options = neighbors(map_, at);
    actions.push_back(options[static_cast<std::size_t>(uniform_index(rng_, options.size()))].first);
  }
  return actions;
}

std::vector<std::string> builtin_policy_names() {
  return {"expert_replay", "greedy_gradient", "pibt_step", "random_valid"};
}

std::unique_ptr<Policy> make_policy(const std::string& policy_spec, const ExpertConfig& expert) {
  constexpr std::string_view prefix = "builtin:";
  if (policy_spec.starts_with(prefix)) {
    const auto name = policy_spec.substr(prefix.size());
    if (name == "expert_replay") return std::make_unique<ExpertReplayPolicy>(expert);
    if (name == "greedy_gradient") return std::make_unique<GreedyGradientPolicy>();
    if (name == "pibt_step") return std::make_unique<PibtStepPolicy>();
    if (name == "random_valid") return std::make_unique<RandomValidPolicy>();
    throw ProtocolViolation("unknown builtin policy '" + name + "'");
  }
  return std::make_unique<ProcessPolicy>(policy_spec);
}

int serve_policy(Policy& policy, std::istream& in, std::ostream& out) {
  int handled = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json message;
    try {
      message = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ProtocolViolation(std::string("unparseable message: ") + e.what());
    }
    ++handled;
    if (message.value("type", "") == "end") {
      policy.notify(message);
      break;
    }
    out << policy.request(message, std::chrono::milliseconds::max()).dump() << '\n' << std::flush;
  }
  return handled;
}

}  // namespace gridflow
