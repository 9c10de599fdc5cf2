#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mddial/ontology.hpp"

namespace mddial {

/// Communicative dimensions used by this system. The ISO taxonomy defines
/// more; only these three carry actions here. Ordering is fixed and used for
/// canonical serialization and agent indexing.
enum class Dimension { Task = 0, AutoFeedback = 1, SocialOblMan = 2 };

const char* to_string(Dimension d);
Dimension dimension_from_string(const std::string& s);

enum class ActFunction {
  Inform,
  SetQuestion,
  PropQuestion,
  AnswerSet,
  AnswerProp,
  Recommend,
  NegativeFeedback,
  PropQuestionFeedback,
  ReturnGoodbye,
  Greet,
  Affirm,
  Deny,
  Request,
  Bye,
  Null,
};

const char* to_string(ActFunction f);
ActFunction function_from_string(const std::string& s);

/// The dimension a communicative function belongs to.
Dimension function_dimension(ActFunction f);

/// One content item. `value` is empty for bare-slot content such as
/// `request(phonenumber)` or `setQuestion(foodtype)`.
struct SlotValue {
  std::string slot;
  std::string value;

  bool operator==(const SlotValue&) const = default;
};

/// A dialogue act: dimension + communicative function + semantic content.
/// `entity_ref` is the database entity a system act talks about; it is
/// carried in serialized form as a leading `name=venue-<id>` content pair.
struct DialogueAct {
  Dimension dimension = Dimension::Task;
  ActFunction function = ActFunction::Null;
  std::vector<SlotValue> content;
  std::optional<int> entity_ref;

  bool operator==(const DialogueAct&) const = default;
};

/// Builds an act with the dimension implied by the function.
DialogueAct make_act(ActFunction f, std::vector<SlotValue> content = {},
                     std::optional<int> entity_ref = std::nullopt);

/// Canonical textual form `function(slot=value,...)`; stable across versions.
std::string serialize(const DialogueAct& act);

/// Parses the canonical notation. Whitespace-insensitive. Slot names,
/// informable values and the function are validated against the ontology;
/// errors name the offending token. `name=venue-<id>` pairs also populate
/// entity_ref.
DialogueAct parse_act(const std::string& text, const Ontology& ont);

// ---------------------------------------------------------------------------
// Summary actions

/// Policy-level abstract actions, instantiated into full dialogue acts from
/// state. Labels cover the union of both system variants.
enum class SummaryLabel {
  NegativeFeedback,
  PropQFeedback,
  AnswerSet,
  AnswerProp,
  Recommend,
  ReturnGoodbye,
  AskSlot,
  Null,
};

const char* to_string(SummaryLabel l);

struct SummaryAction {
  int index = 0;
  Dimension dimension = Dimension::Task;
  SummaryLabel label = SummaryLabel::Null;

  bool operator==(const SummaryAction&) const = default;
};

/// The 7 actions of the one-dimensional system, in action-index order:
/// 0 negativeFeedback, 1 propQFeedback, 2 answerSet, 3 answerProp,
/// 4 recommend, 5 returnGoodbye, 6 askSlot.
const std::vector<SummaryAction>& one_dim_actions();

/// Per-dimension action sets of the multi-dimensional system:
/// Task {askSlot, recommend, answerSet, answerProp, null},
/// AutoFeedback {negativeFeedback, propQFeedback, null},
/// SocialOblMan {returnGoodbye, null}.
const std::vector<SummaryAction>& dimension_actions(Dimension d);

/// Resolves one candidate per dimension into the single output action, by
/// precedence: negativeFeedback cancels everything; otherwise a substantive
/// task act wins; otherwise returnGoodbye requires a null task; otherwise
/// propQFeedback; otherwise no output (the system passes the turn).
/// The result is expressed as a one-dimensional action (its index is the
/// output row), or nullopt for the all-null triple.
/// Throws std::invalid_argument if a candidate is not a member of its
/// dimension's action set.
std::optional<SummaryAction> combine_candidate_acts(const SummaryAction& task,
                                                    const SummaryAction& feedback,
                                                    const SummaryAction& social);

/// Applies combine_candidate_acts to all 5*3*2 = 30 triples and tallies the
/// outputs by output-action index, with key "null" for the pass outcome.
std::map<std::string, int> enumerate_combination_table();

}  // namespace mddial
