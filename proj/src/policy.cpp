#include "mddial/policy.hpp"

#include <stdexcept>

namespace mddial {

LinearQPolicy::LinearQPolicy(AgentKind kind, int action_count, int feature_len)
    : kind(kind),
      action_count(action_count),
      feature_len(feature_len),
      weights(static_cast<std::size_t>(action_count),
              std::vector<double>(static_cast<std::size_t>(feature_len), 0.0)) {}

double q_value(const LinearQPolicy& policy, const FeatureVector& features, int action) {
  if (action < 0 || action >= policy.action_count) {
    throw std::invalid_argument("q_value: action index out of range");
  }
  if (static_cast<int>(features.values.size()) != policy.feature_len) {
    throw std::invalid_argument("q_value: feature length mismatch");
  }
  const auto& theta = policy.weights[static_cast<std::size_t>(action)];
  double q = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) q += theta[i] * features.values[i];
  return q;
}

int select_action(const LinearQPolicy& policy, const FeatureVector& features, double epsilon,
                  RandomStream& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0,1]");
  if (epsilon > 0.0 && rng.uniform01() < epsilon) {
    return static_cast<int>(rng.uniform_below(static_cast<std::size_t>(policy.action_count)));
  }
  int best = 0;
  double best_q = q_value(policy, features, 0);
  for (int a = 1; a < policy.action_count; ++a) {
    const double q = q_value(policy, features, a);
    if (q > best_q) {
      best_q = q;
      best = a;
    }
  }
  return best;
}

std::vector<double> compute_returns(const std::vector<double>& rewards, double gamma) {
  if (rewards.empty()) throw std::invalid_argument("compute_returns: empty reward list");
  std::vector<double> returns(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    returns[i] = acc;
  }
  return returns;
}

void mc_update(LinearQPolicy& policy, const std::vector<AgentStep>& steps,
               const std::vector<double>& rewards, double alpha, double gamma) {
  if (steps.empty()) throw std::invalid_argument("mc_update: empty trace");
  if (steps.size() != rewards.size()) {
    throw std::invalid_argument("mc_update: steps and rewards length mismatch");
  }
  const std::vector<double> returns = compute_returns(rewards, gamma);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const AgentStep& step = steps[t];
    const double error = returns[t] - q_value(policy, step.features, step.action);
    auto& theta = policy.weights[static_cast<std::size_t>(step.action)];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] += alpha * error * step.features.values[i];
    }
  }
}

nlohmann::json save_policy(const LinearQPolicy& policy) {
  return nlohmann::json{{"schema_version", "policy-v1"},
                        {"agent", to_string(policy.kind)},
                        {"feature_schema", feature_schema(policy.kind)},
                        {"action_count", policy.action_count},
                        {"feature_len", policy.feature_len},
                        {"weights", policy.weights}};
}

LinearQPolicy load_policy(const nlohmann::json& record) {
  if (record.value("schema_version", "") != "policy-v1") {
    throw PolicyCompatibilityError("policy record: unsupported schema_version");
  }
  LinearQPolicy policy;
  policy.kind = agent_kind_from_string(record.at("agent").get<std::string>());
  if (record.at("feature_schema").get<std::string>() != feature_schema(policy.kind)) {
    throw PolicyCompatibilityError("policy record: feature_schema mismatch for agent " +
                                   std::string(to_string(policy.kind)));
  }
  policy.action_count = record.at("action_count").get<int>();
  policy.feature_len = record.at("feature_len").get<int>();
  if (policy.feature_len != feature_length(policy.kind)) {
    throw PolicyCompatibilityError("policy record: feature_len does not match schema " +
                                   std::string(feature_schema(policy.kind)));
  }
  record.at("weights").get_to(policy.weights);
  if (static_cast<int>(policy.weights.size()) != policy.action_count) {
    throw PolicyCompatibilityError("policy record: weight row count != action_count");
  }
  for (const auto& row : policy.weights) {
    if (static_cast<int>(row.size()) != policy.feature_len) {
      throw PolicyCompatibilityError("policy record: weight row length != feature_len");
    }
  }
  return policy;
}

LinearQPolicy load_policy(const nlohmann::json& record, AgentKind expected) {
  LinearQPolicy policy = load_policy(record);
  if (policy.kind != expected) {
    throw PolicyCompatibilityError(std::string("policy record: agent label ") +
                                   to_string(policy.kind) + " does not match expected " +
                                   to_string(expected));
  }
  return policy;
}

void TrainingConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0)) {
    throw std::invalid_argument("require 0 <= epsilon_end <= epsilon_start <= 1");
  }
  if (total_training_dialogues < 0) throw std::invalid_argument("total_training_dialogues >= 0");
  if (eval_dialogues_per_point <= 0) throw std::invalid_argument("eval_dialogues_per_point > 0");
  if (checkpoint_interval <= 0) throw std::invalid_argument("checkpoint_interval > 0");
  if (runs <= 0) throw std::invalid_argument("runs > 0");
  if (error_rate < 0.0 || error_rate > 1.0) throw std::invalid_argument("error_rate in [0,1]");
  if (max_system_turns <= 0) throw std::invalid_argument("max_system_turns > 0");
  if (optimistic_init < 0.0) throw std::invalid_argument("optimistic_init >= 0");
}

nlohmann::json TrainingConfig::to_json() const {
  return nlohmann::json{{"gamma", gamma},
                        {"alpha", alpha},
                        {"epsilon_start", epsilon_start},
                        {"epsilon_end", epsilon_end},
                        {"total_training_dialogues", total_training_dialogues},
                        {"eval_dialogues_per_point", eval_dialogues_per_point},
                        {"checkpoint_interval", checkpoint_interval},
                        {"runs", runs},
                        {"error_rate", error_rate},
                        {"max_system_turns", max_system_turns},
                        {"seed", seed},
                        {"optimistic_init", optimistic_init}};
}

TrainingConfig TrainingConfig::from_json(const nlohmann::json& j) {
  TrainingConfig cfg;
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.epsilon_start = j.value("epsilon_start", cfg.epsilon_start);
  cfg.epsilon_end = j.value("epsilon_end", cfg.epsilon_end);
  cfg.total_training_dialogues = j.value("total_training_dialogues", cfg.total_training_dialogues);
  cfg.eval_dialogues_per_point = j.value("eval_dialogues_per_point", cfg.eval_dialogues_per_point);
  cfg.checkpoint_interval = j.value("checkpoint_interval", cfg.checkpoint_interval);
  cfg.runs = j.value("runs", cfg.runs);
  cfg.error_rate = j.value("error_rate", cfg.error_rate);
  cfg.max_system_turns = j.value("max_system_turns", cfg.max_system_turns);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.optimistic_init = j.value("optimistic_init", cfg.optimistic_init);
  cfg.validate();
  return cfg;
}

double epsilon_at(const TrainingConfig& cfg, int episode) {
  if (cfg.total_training_dialogues <= 0) return cfg.epsilon_end;
  const double frac = static_cast<double>(episode) / cfg.total_training_dialogues;
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
}

}  // namespace mddial
