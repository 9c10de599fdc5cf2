#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mddial/acts.hpp"
#include "mddial/ontology.hpp"
#include "mddial/rng.hpp"

namespace mddial {

/// What the simulated user wants: a satisfiable constraint for every
/// informable slot (value of a seed entity or dontcare) and 1-3 requestable
/// slots to ask about once a venue has been recommended.
struct UserGoal {
  std::map<std::string, std::string> constraints;  // every informable slot
  std::set<std::string> requests;                  // subset of requestables minus name
  int seed_entity = -1;

  /// The non-dontcare part, i.e. what a matching entity must satisfy.
  std::map<std::string, std::string> hard_constraints() const;
};

/// Draws a goal seeded from a uniformly random database entity: each slot
/// keeps the entity's value with probability 0.7 (else dontcare); 1-3
/// requests are drawn without replacement.
UserGoal sample_goal(const Database& db, const Ontology& ont, RandomStream& rng);

/// Agenda-based simulated user. Holds a stack of pending dialogue acts
/// (goodbye pinned at the bottom); reacts to each system act by stack
/// operations, then emits the next pending act. Also the reward source.
class UserSimulator {
 public:
  /// Samples goal and initial agenda: optional greet (probability 0.5), then
  /// inform acts for all non-dontcare constraints in random order.
  UserSimulator(const Ontology& ont, const Database& db, RandomStream& rng);

  /// Fixed goal/greet variant for tests.
  UserSimulator(const Ontology& ont, const Database& db, UserGoal goal, bool greet_first);

  struct Reaction {
    DialogueAct act;
    bool dialogue_over = false;
  };

  /// Processes the system's act (nullopt = the system passed the turn) and
  /// emits the user's next act. Total: never throws for in-domain acts.
  Reaction react(const std::optional<DialogueAct>& system_act, RandomStream& rng);

  /// -1 per system turn, plus +30 at the terminal turn if the goal was
  /// satisfied.
  double turn_reward(bool terminal) const;

  /// Goal satisfied: a constraint-matching recommendation was received and
  /// every requested slot was answered.
  bool is_success() const;

  const UserGoal& goal() const { return goal_; }
  bool recommendation_received() const { return received_recommendation_.has_value(); }
  std::size_t agenda_size() const { return agenda_.size(); }

 private:
  void init_agenda(bool greet_first, RandomStream* rng);
  Reaction emit(DialogueAct act, bool over = false);
  bool entity_matches_goal(const Entity& e) const;

  const Ontology& ont_;
  const Database& db_;
  UserGoal goal_;
  std::vector<DialogueAct> agenda_;  // back = top; front = goodbye
  std::optional<DialogueAct> last_emitted_;
  std::optional<int> received_recommendation_;
  std::set<std::string> satisfied_requests_;
};

}  // namespace mddial
