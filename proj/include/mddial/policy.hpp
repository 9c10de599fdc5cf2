#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mddial/rng.hpp"
#include "mddial/state.hpp"

namespace mddial {

/// Linear action-value function: one weight vector per action,
/// Q(s,a) = theta_a . phi(s). Weights start at zero.
struct LinearQPolicy {
  AgentKind kind = AgentKind::OneDim;
  int action_count = 0;
  int feature_len = 0;
  std::vector<std::vector<double>> weights;  // [action][feature]

  LinearQPolicy() = default;
  LinearQPolicy(AgentKind kind, int action_count, int feature_len);
};

double q_value(const LinearQPolicy& policy, const FeatureVector& features, int action);

/// Epsilon-greedy selection. With probability epsilon a uniform action is
/// drawn; otherwise the greedy action, ties broken by lowest index. With
/// epsilon == 0 the stream is not consumed at all, so greedy evaluation is
/// reproducible independent of policy randomness.
int select_action(const LinearQPolicy& policy, const FeatureVector& features, double epsilon,
                  RandomStream& rng);

/// Discounted returns R_t = sum_{k=t}^{T-1} gamma^{k-t} r_k, computed in one
/// backward pass. Throws std::invalid_argument on an empty reward list.
std::vector<double> compute_returns(const std::vector<double>& rewards, double gamma);

/// One agent's step within an episode.
struct AgentStep {
  FeatureVector features;
  int action = 0;
};

/// Everything an episode contributes to learning: per system turn, one step
/// per agent plus the shared reward.
struct EpisodeTrace {
  std::vector<std::vector<AgentStep>> agent_steps;  // [agent][turn]
  std::vector<double> rewards;                      // [turn], shared
  double total_reward = 0.0;                        // undiscounted sum
};

/// Every-visit Monte Carlo update for one agent: for each step t in order,
/// theta_{a_t} += alpha * (R_t - Q(phi_t, a_t)) * phi_t with running weights.
void mc_update(LinearQPolicy& policy, const std::vector<AgentStep>& steps,
               const std::vector<double>& rewards, double alpha, double gamma);

/// Thrown by load_policy on any schema/shape/label mismatch.
struct PolicyCompatibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json save_policy(const LinearQPolicy& policy);
LinearQPolicy load_policy(const nlohmann::json& record);

/// Loads and additionally checks the record's agent label.
LinearQPolicy load_policy(const nlohmann::json& record, AgentKind expected);

// ---------------------------------------------------------------------------

/// Training hyperparameters and schedule.
struct TrainingConfig {
  double gamma = 0.95;
  double alpha = 0.001;
  double epsilon_start = 0.4;
  double epsilon_end = 0.0;
  int total_training_dialogues = 40000;
  int eval_dialogues_per_point = 3000;
  int checkpoint_interval = 5000;
  int runs = 10;
  double error_rate = 0.2;
  int max_system_turns = 30;
  std::uint64_t seed = 0;
  /// Initial value of every weight of a freshly trained policy. With the
  /// binary feature encoding this makes each unvisited (state pattern,
  /// action) pair look better than anything tried so far, so greedy
  /// selection sweeps the space as estimates decay toward reality. With all
  /// weights at zero, "close the dialogue immediately" (a constant -1) beats
  /// every unexplored alternative and training never discovers the task.
  double optimistic_init = 2.0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainingConfig from_json(const nlohmann::json& j);
};

/// Exploration rate for training dialogue `episode` of `total`: linear decay
/// from epsilon_start to epsilon_end over the run.
double epsilon_at(const TrainingConfig& cfg, int episode);

}  // namespace mddial
