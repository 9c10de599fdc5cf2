#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mddial/acts.hpp"
#include "mddial/ontology.hpp"
#include "mddial/policy.hpp"
#include "mddial/state.hpp"

namespace mddial {

enum class ManagerVariant { OneDim, MultiDim };

/// Statistical dialogue manager: probabilistic state monitoring plus either a
/// single 7-action MDP agent or three coordinated per-dimension agents whose
/// candidate acts are resolved by the combination rules. Holds the policies;
/// one manager instance serves one episode at a time.
class DialogueManager {
 public:
  DialogueManager(const Ontology& ont, const Database& db, ManagerVariant variant);

  /// Replaces an agent's policy (label-checked) and optionally freezes it:
  /// frozen agents always select greedily and receive no updates.
  void set_policy(std::size_t agent, LinearQPolicy policy, bool frozen);

  ManagerVariant variant() const { return variant_; }
  std::size_t agent_count() const { return policies_.size(); }
  LinearQPolicy& policy(std::size_t agent) { return policies_[agent]; }
  const LinearQPolicy& policy(std::size_t agent) const { return policies_[agent]; }
  bool frozen(std::size_t agent) const { return frozen_[agent]; }

  void start_episode();
  const DialogueState& state() const { return state_; }

  /// Folds one n-best list into the dialogue state: belief update, grounding
  /// FSM, request tracking, database match recomputation, history.
  void observe(const NBestList& nbest);

  struct AgentChoice {
    AgentKind kind;
    FeatureVector features;
    int action = 0;
    std::vector<double> q_values;
  };

  struct SystemTurn {
    std::vector<AgentChoice> choices;            // 1 or 3 entries
    std::optional<SummaryAction> resolved;       // one-dim row; nullopt = pass
    std::optional<DialogueAct> act;              // emitted act; nullopt = pass
    std::optional<SummaryLabel> degraded_from;   // mapping fallback, when taken
  };

  /// One system turn: epsilon-greedy selection per agent (frozen agents
  /// greedy), combination (multi-dim), then mapping of the resolved summary
  /// action to a full dialogue act. Increments the turn counter.
  SystemTurn respond(double epsilon, RandomStream& rng);

  /// The per-slot user-goal hypothesis used for database filtering: the
  /// grounding hypothesis of every slot that is user_informed or
  /// system_confirmed.
  std::map<std::string, std::string> goal_hypothesis() const;

  const std::optional<DialogueAct>& last_system_act() const { return last_system_act_; }

 private:
  struct Mapped {
    DialogueAct act;
    std::optional<SummaryLabel> degraded_from;
  };
  Mapped map_summary_to_act(const SummaryAction& action);
  DialogueAct ask_slot_act() const;

  const Ontology& ont_;
  const Database& db_;
  ManagerVariant variant_;
  std::vector<LinearQPolicy> policies_;
  std::vector<bool> frozen_;
  DialogueState state_;
  std::optional<DialogueAct> last_system_act_;
};

}  // namespace mddial
