#pragma once

#include "gridflow/expert.hpp"
#include "gridflow/protocol.hpp"

#include <chrono>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <sys/types.h>
#include <vector>

namespace gridflow {

/// Anything that speaks the step protocol.
class Policy {
 public:
  virtual ~Policy() = default;
  /// Sends `message` and returns the reply. Throws PolicyTimeout or
  /// ProtocolViolation.
  virtual Json request(const Json& message, std::chrono::milliseconds timeout) = 0;
  /// Sends a message that has no reply ("end").
  virtual void notify(const Json& message) = 0;
  virtual std::string name() const = 0;
};

/// Base for the in-process policies: handles init/ready and obs decoding.
class BuiltinPolicy : public Policy {
 public:
  Json request(const Json& message, std::chrono::milliseconds timeout) override;
  void notify(const Json&) override {}

 protected:
  virtual void reset() {}
  virtual std::vector<Action> act(const Observation& obs) = 0;

  /// Cached distance field for a goal.
  const DistanceField& distance_to(Cell goal);

  GridMap map_;
  EpisodeMode mode_ = EpisodeMode::MAPF;
  std::uint64_t seed_ = 0;

 private:
  std::map<int, DistanceField> distances_;
  bool initialized_ = false;
};

/// Plans with the prioritized expert and replays the plan; replans from the
/// current state whenever goals change or the state leaves the plan. Falls
/// back to a PIBT step if planning fails.
class ExpertReplayPolicy : public BuiltinPolicy {
 public:
  explicit ExpertReplayPolicy(ExpertConfig config = {}) : config_(config) {}
  std::string name() const override { return "builtin:expert_replay"; }

 protected:
  void reset() override;
  std::vector<Action> act(const Observation& obs) override;

 private:
  ExpertConfig config_;
  std::optional<Solution> plan_;
  int plan_start_ = 0;
  std::vector<Cell> plan_goals_;
};

/// Follows the cost-to-goal gradient of each agent independently; when both
/// axes improve, a seeded coin picks one.
class GreedyGradientPolicy : public BuiltinPolicy {
 public:
  std::string name() const override { return "builtin:greedy_gradient"; }

 protected:
  std::vector<Action> act(const Observation& obs) override;
};

/// One PIBT step per timestep; priority grows with the time since the agent
/// last received a goal and resets on arrival.
class PibtStepPolicy : public BuiltinPolicy {
 public:
  std::string name() const override { return "builtin:pibt_step"; }

 protected:
  void reset() override;
  std::vector<Action> act(const Observation& obs) override;

 private:
  std::vector<double> elapsed_;
  std::vector<Cell> last_goals_;
};

/// Uniform choice among wait and the moves into free cells.
class RandomValidPolicy : public BuiltinPolicy {
 public:
  std::string name() const override { return "builtin:random_valid"; }

 protected:
  void reset() override;
  std::vector<Action> act(const Observation& obs) override;

 private:
  Engine rng_;
};

std::vector<std::string> builtin_policy_names();

/// "builtin:NAME" or a shell command line run as a subprocess.
std::unique_ptr<Policy> make_policy(const std::string& policy_spec, const ExpertConfig& expert = {});

/// Runs `command` via /bin/sh with its stdin/stdout connected to the engine.
class ProcessPolicy : public Policy {
 public:
  explicit ProcessPolicy(std::string command);
  ~ProcessPolicy() override;
  ProcessPolicy(const ProcessPolicy&) = delete;
  ProcessPolicy& operator=(const ProcessPolicy&) = delete;

  Json request(const Json& message, std::chrono::milliseconds timeout) override;
  void notify(const Json& message) override;
  std::string name() const override { return command_; }

 private:
  void send(const Json& message);
  std::string read_line(std::chrono::milliseconds timeout);

  std::string command_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// Serves `policy` over line-delimited JSON until "end" or EOF. Returns the
/// number of messages handled.
int serve_policy(Policy& policy, std::istream& in, std::ostream& out);

}  // namespace gridflow
