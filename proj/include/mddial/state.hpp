#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mddial/acts.hpp"
#include "mddial/ontology.hpp"

namespace mddial {

struct UserActHypothesis {
  DialogueAct act;
  double confidence = 0.0;  // (0, 1]
};

/// Ranked user-act hypotheses, descending confidence, total mass <= 1.
struct NBestList {
  std::vector<UserActHypothesis> hypotheses;

  const UserActHypothesis& top() const { return hypotheses.front(); }
  void validate() const;  // throws std::invalid_argument
};

/// Raw per-slot evidence scores. A pair's score is set to the observed
/// confidence mass on first evidence and multiplied by it on every repeat;
/// pairs without evidence never appear. Requestable slots carry a
/// requested-probability updated as max(previous, confidence mass).
struct BeliefState {
  std::map<std::string, std::map<std::string, double>> slot_scores;
  std::map<std::string, double> requested;

  double raw_score(const std::string& slot, const std::string& value) const;
};

/// Folds one n-best list into the belief state. Evidence for an informable
/// pair (s,v) is the summed confidence of hypotheses whose inform content
/// asserts it; evidence for a requestable slot is the summed confidence of
/// hypotheses requesting it. Pairs without evidence this turn are unchanged.
BeliefState update_beliefs(BeliefState beliefs, const NBestList& nbest);

/// A slot's distribution over observed values plus a residual `unknown`
/// hypothesis: each raw score divided by (sum of raw scores + 1).
struct NormalizedBelief {
  std::vector<std::pair<std::string, double>> values;  // observed values, input order
  double unknown = 1.0;

  /// Argmax over observed values; nullopt when no evidence. Ties break on
  /// lexicographically smallest value.
  std::optional<std::pair<std::string, double>> top() const;
};

NormalizedBelief normalized_belief(const BeliefState& beliefs, const std::string& slot);

// ---------------------------------------------------------------------------
// Grounding

enum class GroundingStatus { Unmentioned, UserInformed, SystemConfirmed, Denied };

const char* to_string(GroundingStatus s);

/// Per-slot grounding: the lifecycle status of the slot's current value
/// hypothesis, together with that hypothesis. The hypothesis is replaced
/// whenever the user (re-)informs the slot.
struct SlotGrounding {
  GroundingStatus status = GroundingStatus::Unmentioned;
  std::string hypothesis;

  bool operator==(const SlotGrounding&) const = default;
};

using GroundingState = std::map<std::string, SlotGrounding>;

struct GroundingUpdate {
  GroundingState grounding;
  BeliefState beliefs;  // deny halves the denied value's raw score
};

/// Finite-state transitions, driven by the top user-act hypothesis and the
/// previous system act:
///   - user inform(s=v): (any) -> user_informed with hypothesis v
///   - affirm after propQuestionFeedback(s=v): -> system_confirmed(v)
///   - deny after propQuestionFeedback(s=v): -> denied(v), raw score halved
///   - a system act that verbalized s=v (recommend/answer content), followed
///     by a user turn with no deny, upgrades user_informed(v) ->
///     system_confirmed(v)
GroundingUpdate update_grounding(GroundingState grounding, BeliefState beliefs,
                                 const DialogueAct& user_act,
                                 const std::optional<DialogueAct>& last_system_act);

// ---------------------------------------------------------------------------
// Dialogue state

struct DialogueState {
  BeliefState beliefs;
  GroundingState grounding;
  std::vector<std::pair<std::string, DialogueAct>> history;  // speaker: "usr"/"sys"
  std::vector<int> db_matches;
  std::optional<int> entity_under_discussion;
  int turn_count = 0;
  double last_top_confidence = 0.0;

  // Request bookkeeping for answer actions and features.
  std::set<std::string> answered_requests;
  std::optional<std::string> last_requested_slot;
  bool user_said_bye = false;  // top hypothesis of the most recent user turn

  nlohmann::json summary_json(const Ontology& ont) const;
};

DialogueState initial_state(const Ontology& ont, const Database& db);

// ---------------------------------------------------------------------------
// Features

enum class AgentKind { Task = 0, AutoFeedback = 1, SocialOblMan = 2, OneDim = 3 };

const char* to_string(AgentKind k);
AgentKind agent_kind_from_string(const std::string& s);

/// Version tag of an agent's feature layout; persisted with policies.
const char* feature_schema(AgentKind k);

/// Number of features per agent: Task 42, AutoFeedback 10, SocialOblMan 3,
/// OneDim 55 (the concatenation of the three).
int feature_length(AgentKind k);

/// Stable feature names, index-aligned with extract_features output.
const std::vector<std::string>& feature_names(AgentKind k);

struct FeatureVector {
  AgentKind kind = AgentKind::Task;
  std::vector<double> values;  // all binary, bias included
};

/// All features are binary indicators:
///   Task: per informable slot 4 belief bins of the top normalized belief
///     {unknown, (0,.5], (.5,.8], (.8,1]} and 4 grounding-status bins; 4
///     db-match-count bins {0, 1, 2-4, >=5}; recommendation-made flag; 4
///     outstanding-request flags (requestables except name); bias.
///   AutoFeedback: 4 bins of last_top_confidence {[0,.3], (.3,.5], (.5,.8],
///     (.8,1]}; one-hot count (capped at 4) of user_informed-but-unconfirmed
///     slots; bias.
///   SocialOblMan: user-said-bye flag; task-complete flag; bias.
///   OneDim: concatenation Task + AutoFeedback + SocialOblMan.
FeatureVector extract_features(const DialogueState& state, const Ontology& ont, AgentKind kind);

/// Requested-probability threshold above which a requestable slot counts as
/// requested (features, answer targeting).
inline constexpr double kRequestedThreshold = 0.3;

}  // namespace mddial
