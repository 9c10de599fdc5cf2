#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mddial/errormodel.hpp"
#include "mddial/manager.hpp"
#include "mddial/policy.hpp"
#include "mddial/usersim.hpp"

namespace mddial {

enum class ExperimentVariant { OneDim, MultiDim, MultiDimTransfer, MultiDimTransferAdapt };

const char* to_string(ExperimentVariant v);
ExperimentVariant experiment_variant_from_string(const std::string& s);

/// Pretrained domain-independent policy records for the transfer settings.
struct SourcePolicies {
  nlohmann::json autofeedback;
  nlohmann::json socialoblman;
};

struct ExperimentSpec {
  ExperimentVariant variant = ExperimentVariant::OneDim;
  TrainingConfig training;
  ErrorConfig error;
  std::optional<SourcePolicies> source;              // required for transfer variants
  std::optional<std::vector<bool>> freeze_override;  // per agent, replaces the variant default

  void validate() const;
  ManagerVariant manager_variant() const;
  /// Freeze mask per agent: transfer freezes AutoFeedback and SocialOblMan,
  /// transfer+adapt loads but keeps updating them.
  std::vector<bool> freeze_mask() const;

  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

/// Per-turn log sink (JSON-lines records).
using TurnLogger = std::function<void(const nlohmann::json&)>;

struct EpisodeOutcome {
  EpisodeTrace trace;
  double total_reward = 0.0;
  bool success = false;
  int length = 0;
};

/// One dialogue: alternate user act -> corrupt -> observe -> respond ->
/// reward until the system closes the dialogue or the turn cutoff forces
/// termination. Resets the manager's episode state on entry.
EpisodeOutcome run_episode(DialogueManager& manager, UserSimulator& sim, const ErrorConfig& err,
                           const Ontology& ont, double epsilon, int max_system_turns,
                           RandomStream& rng, const TurnLogger* logger = nullptr);

struct CheckpointStats {
  int dialogues = 0;
  double mean_reward = 0.0;
  double mean_success = 0.0;
  double mean_length = 0.0;
  double std_reward = 0.0;          // sample std-dev of per-run mean rewards
  std::vector<double> run_rewards;  // per-run mean rewards, run-index order
};

struct LearningCurve {
  std::vector<CheckpointStats> points;

  /// CSV with header dialogues,mean_reward,mean_success,mean_length,std_reward.
  std::string to_csv() const;
};

struct TrainResult {
  LearningCurve curve;
  /// Final policies, [run][agent]; agent order matches the manager's.
  std::vector<std::vector<LinearQPolicy>> final_policies;
};

struct TrainOptions {
  int threads = 0;  // 0 = hardware concurrency, capped at the number of runs
  TurnLogger sample_logger;  // receives run-0 episodes at log_every spacing
  int log_every = 5000;
};

/// Runs `runs` independent seeded training runs (possibly in parallel; the
/// result is identical either way), evaluating greedy policy snapshots at
/// each checkpoint, and aggregates the learning curve across runs.
TrainResult train(const ExperimentSpec& spec, const Ontology& ont, const Database& db,
                  const TrainOptions& options = {});

struct EvalMetrics {
  double mean_reward = 0.0;
  double success_rate = 0.0;
  double mean_length = 0.0;
  double se_reward = 0.0;
  double se_success = 0.0;
  int n = 0;

  nlohmann::json to_json() const;
};

/// Greedy (epsilon = 0) rollouts of a fixed policy set. Deterministic for a
/// given seed.
EvalMetrics evaluate(const Ontology& ont, const Database& db, ManagerVariant variant,
                     const std::vector<LinearQPolicy>& policies, const ErrorConfig& err,
                     int n_dialogues, int max_system_turns, std::uint64_t seed,
                     const TurnLogger* logger = nullptr);

/// Checkpoint schedule: 0, every multiple of checkpoint_interval, and the
/// final dialogue count.
std::vector<int> checkpoint_schedule(const TrainingConfig& cfg);

}  // namespace mddial
