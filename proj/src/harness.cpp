#include "mddial/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace mddial {

namespace {

constexpr std::uint64_t kTrainPhase = 0x747261696eULL;
constexpr std::uint64_t kEvalPhase = 0x6576616cULL;

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

const char* to_string(ExperimentVariant v) {
  switch (v) {
    case ExperimentVariant::OneDim: return "one-dim";
    case ExperimentVariant::MultiDim: return "multi-dim";
    case ExperimentVariant::MultiDimTransfer: return "multi-dim-transfer";
    case ExperimentVariant::MultiDimTransferAdapt: return "multi-dim-transfer-adapt";
  }
  throw std::logic_error("unknown experiment variant");
}

ExperimentVariant experiment_variant_from_string(const std::string& s) {
  if (s == "one-dim") return ExperimentVariant::OneDim;
  if (s == "multi-dim") return ExperimentVariant::MultiDim;
  if (s == "multi-dim-transfer") return ExperimentVariant::MultiDimTransfer;
  if (s == "multi-dim-transfer-adapt") return ExperimentVariant::MultiDimTransferAdapt;
  throw std::invalid_argument("unknown variant: " + s);
}

void ExperimentSpec::validate() const {
  training.validate();
  error.validate();
  const bool needs_source = variant == ExperimentVariant::MultiDimTransfer ||
                            variant == ExperimentVariant::MultiDimTransferAdapt;
  if (needs_source && !source) {
    throw std::invalid_argument(std::string(to_string(variant)) +
                                " requires AutoFeedback and SocialOblMan source policies");
  }
}

ManagerVariant ExperimentSpec::manager_variant() const {
  return variant == ExperimentVariant::OneDim ? ManagerVariant::OneDim : ManagerVariant::MultiDim;
}

std::vector<bool> ExperimentSpec::freeze_mask() const {
  const std::size_t agents = variant == ExperimentVariant::OneDim ? 1 : 3;
  if (freeze_override) {
    if (freeze_override->size() != agents) {
      throw std::invalid_argument("freeze override has the wrong number of agents");
    }
    return *freeze_override;
  }
  if (variant == ExperimentVariant::OneDim) return {false};
  if (variant == ExperimentVariant::MultiDimTransfer) return {false, true, true};
  return {false, false, false};
}

nlohmann::json ExperimentSpec::to_json() const {
  return nlohmann::json{{"schema_version", "experiment-v1"},
                        {"variant", to_string(variant)},
                        {"training", training.to_json()},
                        {"error", error.to_json()},
                        {"freeze", freeze_mask()}};
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  if (j.contains("variant")) spec.variant = experiment_variant_from_string(j.at("variant"));
  if (j.contains("training")) spec.training = TrainingConfig::from_json(j.at("training"));
  if (j.contains("error")) spec.error = ErrorConfig::from_json(j.at("error"));
  return spec;
}

std::vector<int> checkpoint_schedule(const TrainingConfig& cfg) {
  std::vector<int> cps = {0};
  for (int d = cfg.checkpoint_interval; d < cfg.total_training_dialogues;
       d += cfg.checkpoint_interval) {
    cps.push_back(d);
  }
  if (cfg.total_training_dialogues > 0) cps.push_back(cfg.total_training_dialogues);
  return cps;
}

EpisodeOutcome run_episode(DialogueManager& manager, UserSimulator& sim, const ErrorConfig& err,
                           const Ontology& ont, double epsilon, int max_system_turns,
                           RandomStream& rng, const TurnLogger* logger) {
  manager.start_episode();

  EpisodeOutcome outcome;
  outcome.trace.agent_steps.resize(manager.agent_count());

  for (int t = 0; t < max_system_turns; ++t) {
    const auto reaction = sim.react(manager.last_system_act(), rng);
    const NBestList nbest = corrupt(reaction.act, err, ont, rng);
    manager.observe(nbest);
    auto turn = manager.respond(epsilon, rng);

    const bool closed = turn.act && turn.act->function == ActFunction::ReturnGoodbye;
    const bool terminal = closed || t == max_system_turns - 1;
    const double reward = sim.turn_reward(terminal);

    for (std::size_t a = 0; a < turn.choices.size(); ++a) {
      outcome.trace.agent_steps[a].push_back(
          {std::move(turn.choices[a].features), turn.choices[a].action});
    }
    outcome.trace.rewards.push_back(reward);
    outcome.total_reward += reward;

    if (logger && *logger) {
      nlohmann::json nbest_j = nlohmann::json::array();
      for (const auto& h : nbest.hypotheses) {
        nbest_j.push_back({{"act", serialize(h.act)}, {"confidence", h.confidence}});
      }
      nlohmann::json agents_j = nlohmann::json::array();
      for (std::size_t a = 0; a < turn.choices.size(); ++a) {
        agents_j.push_back({{"agent", to_string(turn.choices[a].kind)},
                            {"action", outcome.trace.agent_steps[a].back().action},
                            {"q_values", turn.choices[a].q_values}});
      }
      (*logger)(nlohmann::json{
          {"turn", t},
          {"user_act", serialize(reaction.act)},
          {"nbest", std::move(nbest_j)},
          {"agents", std::move(agents_j)},
          {"resolved", turn.resolved ? nlohmann::json(to_string(turn.resolved->label))
                                     : nlohmann::json()},
          {"system_act", turn.act ? nlohmann::json(serialize(*turn.act)) : nlohmann::json()},
          {"degraded_from",
           turn.degraded_from ? nlohmann::json(to_string(*turn.degraded_from)) : nlohmann::json()},
          {"reward", reward},
          {"state", manager.state().summary_json(ont)},
      });
    }

    if (terminal) break;
  }

  outcome.trace.total_reward = outcome.total_reward;
  outcome.success = sim.is_success();
  outcome.length = static_cast<int>(outcome.trace.rewards.size());
  return outcome;
}

namespace {

struct RunPoint {
  double mean_reward = 0.0;
  double mean_success = 0.0;
  double mean_length = 0.0;
};

RunPoint eval_snapshot(DialogueManager& manager, const Ontology& ont, const Database& db,
                       const ErrorConfig& err, int n, int max_turns, std::uint64_t eval_seed) {
  RunPoint point;
  for (int i = 0; i < n; ++i) {
    RandomStream stream(mix_seed(eval_seed, kEvalPhase, static_cast<std::uint64_t>(i)));
    UserSimulator sim(ont, db, stream);
    const auto outcome = run_episode(manager, sim, err, ont, 0.0, max_turns, stream);
    point.mean_reward += outcome.total_reward;
    point.mean_success += outcome.success ? 1.0 : 0.0;
    point.mean_length += outcome.length;
  }
  point.mean_reward /= n;
  point.mean_success /= n;
  point.mean_length /= n;
  return point;
}

struct RunResult {
  std::vector<RunPoint> points;
  std::vector<LinearQPolicy> final_policies;
};

RunResult train_one_run(const ExperimentSpec& spec, const Ontology& ont, const Database& db,
                        int run_index, const std::vector<int>& checkpoints,
                        const TurnLogger* sample_logger, int log_every) {
  const TrainingConfig& cfg = spec.training;
  const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(run_index);

  DialogueManager manager(ont, db, spec.manager_variant());
  // Freshly trained agents start with randomized optimistic weights. The
  // optimism keeps greedy selection probing until estimates settle; the
  // randomization makes the early argmax vary across state patterns, so
  // early episodes mix actions instead of spamming whichever action is
  // globally ahead. The dialogue-closing action is the exception: closing
  // is one-step (the episode ends), its fresh-state value is -1 by
  // definition, and seeding it optimistically would end most early episodes
  // on the first turn. Its bias starts at that known value; the +29 it
  // earns in satisfied states is learnt from data.
  RandomStream init_stream(mix_seed(run_seed, 0x696e6974ULL));
  for (std::size_t a = 0; a < manager.agent_count(); ++a) {
    LinearQPolicy& policy = manager.policy(a);
    const auto& actions = policy.kind == AgentKind::OneDim
                              ? one_dim_actions()
                              : dimension_actions(static_cast<Dimension>(policy.kind));
    for (std::size_t act = 0; act < policy.weights.size(); ++act) {
      if (actions[act].label == SummaryLabel::ReturnGoodbye) {
        policy.weights[act].back() = -30.0;
      } else {
        for (auto& w : policy.weights[act]) {
          w = cfg.optimistic_init * (0.5 + init_stream.uniform01());
        }
      }
    }
  }
  const auto freeze = spec.freeze_mask();
  if (spec.source) {
    manager.set_policy(1, load_policy(spec.source->autofeedback, AgentKind::AutoFeedback),
                       freeze[1]);
    manager.set_policy(2, load_policy(spec.source->socialoblman, AgentKind::SocialOblMan),
                       freeze[2]);
  }

  RunResult result;
  std::size_t next_cp = 0;
  auto eval_if_due = [&](int dialogues_done) {
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == dialogues_done) {
      result.points.push_back(eval_snapshot(
          manager, ont, db, spec.error, cfg.eval_dialogues_per_point, cfg.max_system_turns,
          mix_seed(run_seed, static_cast<std::uint64_t>(dialogues_done))));
      ++next_cp;
    }
  };

  eval_if_due(0);
  for (int ep = 0; ep < cfg.total_training_dialogues; ++ep) {
    RandomStream stream(mix_seed(run_seed, kTrainPhase, static_cast<std::uint64_t>(ep)));
    UserSimulator sim(ont, db, stream);

    TurnLogger wrapped;
    const TurnLogger* episode_logger = nullptr;
    if (sample_logger && *sample_logger && run_index == 0 && log_every > 0 &&
        ep % log_every == 0) {
      wrapped = [&, ep](const nlohmann::json& record) {
        nlohmann::json r = record;
        r["episode"] = ep;
        (*sample_logger)(r);
      };
      episode_logger = &wrapped;
    }

    const auto outcome = run_episode(manager, sim, spec.error, ont, epsilon_at(cfg, ep),
                                     cfg.max_system_turns, stream, episode_logger);
    for (std::size_t a = 0; a < manager.agent_count(); ++a) {
      if (!manager.frozen(a)) {
        mc_update(manager.policy(a), outcome.trace.agent_steps[a], outcome.trace.rewards,
                  cfg.alpha, cfg.gamma);
      }
    }
    eval_if_due(ep + 1);
  }

  for (std::size_t a = 0; a < manager.agent_count(); ++a) {
    result.final_policies.push_back(manager.policy(a));
  }
  return result;
}

}  // namespace

TrainResult train(const ExperimentSpec& spec, const Ontology& ont, const Database& db,
                  const TrainOptions& options) {
  spec.validate();
  const auto checkpoints = checkpoint_schedule(spec.training);
  const int runs = spec.training.runs;

  std::vector<RunResult> run_results(static_cast<std::size_t>(runs));
  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, runs));

  if (threads == 1) {
    for (int r = 0; r < runs; ++r) {
      run_results[static_cast<std::size_t>(r)] = train_one_run(
          spec, ont, db, r, checkpoints, &options.sample_logger, options.log_every);
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next_run{0};
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const int r = next_run.fetch_add(1);
          if (r >= runs) return;
          run_results[static_cast<std::size_t>(r)] = train_one_run(
              spec, ont, db, r, checkpoints, &options.sample_logger, options.log_every);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  TrainResult result;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    CheckpointStats stats;
    stats.dialogues = checkpoints[c];
    for (const auto& run : run_results) {
      const RunPoint& p = run.points[c];
      stats.run_rewards.push_back(p.mean_reward);
      stats.mean_reward += p.mean_reward;
      stats.mean_success += p.mean_success;
      stats.mean_length += p.mean_length;
    }
    stats.mean_reward /= runs;
    stats.mean_success /= runs;
    stats.mean_length /= runs;
    if (runs > 1) {
      double acc = 0.0;
      for (double r : stats.run_rewards) acc += (r - stats.mean_reward) * (r - stats.mean_reward);
      stats.std_reward = std::sqrt(acc / (runs - 1));
    }
    result.curve.points.push_back(std::move(stats));
  }
  for (auto& run : run_results) result.final_policies.push_back(std::move(run.final_policies));
  return result;
}

std::string LearningCurve::to_csv() const {
  std::string csv = "dialogues,mean_reward,mean_success,mean_length,std_reward\n";
  for (const auto& p : points) {
    csv += std::to_string(p.dialogues) + "," + format_double(p.mean_reward) + "," +
           format_double(p.mean_success) + "," + format_double(p.mean_length) + "," +
           format_double(p.std_reward) + "\n";
  }
  return csv;
}

nlohmann::json EvalMetrics::to_json() const {
  return nlohmann::json{{"mean_reward", mean_reward}, {"success_rate", success_rate},
                        {"mean_length", mean_length}, {"se_reward", se_reward},
                        {"se_success", se_success},   {"n", n}};
}

EvalMetrics evaluate(const Ontology& ont, const Database& db, ManagerVariant variant,
                     const std::vector<LinearQPolicy>& policies, const ErrorConfig& err,
                     int n_dialogues, int max_system_turns, std::uint64_t seed,
                     const TurnLogger* logger) {
  if (n_dialogues <= 0) throw std::invalid_argument("evaluate: n_dialogues must be positive");
  DialogueManager manager(ont, db, variant);
  if (policies.size() != manager.agent_count()) {
    throw std::invalid_argument("evaluate: wrong number of policies for variant");
  }
  for (std::size_t a = 0; a < policies.size(); ++a) manager.set_policy(a, policies[a], true);

  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(n_dialogues));
  double successes = 0.0;
  double lengths = 0.0;
  for (int i = 0; i < n_dialogues; ++i) {
    RandomStream stream(mix_seed(seed, kEvalPhase, static_cast<std::uint64_t>(i)));
    UserSimulator sim(ont, db, stream);
    const auto outcome =
        run_episode(manager, sim, err, ont, 0.0, max_system_turns, stream, logger);
    rewards.push_back(outcome.total_reward);
    successes += outcome.success ? 1.0 : 0.0;
    lengths += outcome.length;
  }

  EvalMetrics m;
  m.n = n_dialogues;
  for (double r : rewards) m.mean_reward += r;
  m.mean_reward /= n_dialogues;
  m.success_rate = successes / n_dialogues;
  m.mean_length = lengths / n_dialogues;
  if (n_dialogues > 1) {
    double acc = 0.0;
    for (double r : rewards) acc += (r - m.mean_reward) * (r - m.mean_reward);
    m.se_reward = std::sqrt(acc / (n_dialogues - 1)) / std::sqrt(n_dialogues);
    m.se_success = std::sqrt(m.success_rate * (1.0 - m.success_rate) / n_dialogues);
  }
  return m;
}

}  // namespace mddial
