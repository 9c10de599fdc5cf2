#include "mddial/usersim.hpp"

#include <algorithm>

namespace mddial {

namespace {

const std::vector<std::string> kRequestCandidates = {"phonenumber", "address", "price", "postcode"};

}  // namespace

std::map<std::string, std::string> UserGoal::hard_constraints() const {
  std::map<std::string, std::string> hard;
  for (const auto& [slot, value] : constraints) {
    if (value != kDontCare) hard[slot] = value;
  }
  return hard;
}

UserGoal sample_goal(const Database& db, const Ontology& ont, RandomStream& rng) {
  UserGoal goal;
  goal.seed_entity = static_cast<int>(rng.uniform_below(static_cast<std::size_t>(db.size())));
  const Entity& seed = db.entity(goal.seed_entity);
  for (const auto& slot : ont.informable_slots) {
    goal.constraints[slot] = rng.bernoulli(0.7) ? seed.informable.at(slot) : kDontCare;
  }
  const std::size_t n_requests = 1 + rng.uniform_below(3);
  std::vector<std::string> candidates = kRequestCandidates;
  rng.shuffle(candidates);
  goal.requests.insert(candidates.begin(), candidates.begin() + static_cast<long>(n_requests));
  return goal;
}

UserSimulator::UserSimulator(const Ontology& ont, const Database& db, RandomStream& rng)
    : ont_(ont), db_(db), goal_(sample_goal(db, ont, rng)) {
  init_agenda(rng.bernoulli(0.5), &rng);
}

UserSimulator::UserSimulator(const Ontology& ont, const Database& db, UserGoal goal,
                             bool greet_first)
    : ont_(ont), db_(db), goal_(std::move(goal)) {
  init_agenda(greet_first, nullptr);
}

void UserSimulator::init_agenda(bool greet_first, RandomStream* rng) {
  agenda_.push_back(make_act(ActFunction::Bye));  // goodbye stays at the bottom
  std::vector<DialogueAct> informs;
  for (const auto& slot : ont_.informable_slots) {
    const auto& value = goal_.constraints.at(slot);
    if (value != kDontCare) informs.push_back(make_act(ActFunction::Inform, {{slot, value}}));
  }
  if (rng) rng->shuffle(informs);
  for (auto it = informs.rbegin(); it != informs.rend(); ++it) agenda_.push_back(*it);
  if (greet_first) agenda_.push_back(make_act(ActFunction::Greet));
}

UserSimulator::Reaction UserSimulator::emit(DialogueAct act, bool over) {
  last_emitted_ = act;
  return {std::move(act), over};
}

bool UserSimulator::entity_matches_goal(const Entity& e) const {
  for (const auto& [slot, value] : goal_.hard_constraints()) {
    if (e.informable.at(slot) != value) return false;
  }
  return true;
}

UserSimulator::Reaction UserSimulator::react(const std::optional<DialogueAct>& system_act,
                                             RandomStream& rng) {
  if (system_act && system_act->function == ActFunction::ReturnGoodbye) {
    return emit(make_act(ActFunction::Bye), true);
  }

  if (system_act) {
    switch (system_act->function) {
      case ActFunction::NegativeFeedback:
        if (last_emitted_) agenda_.push_back(*last_emitted_);
        break;
      case ActFunction::SetQuestion:
        if (!system_act->content.empty()) {
          const auto& slot = system_act->content.front().slot;
          auto it = goal_.constraints.find(slot);
          if (it != goal_.constraints.end()) {
            agenda_.push_back(make_act(ActFunction::Inform, {{slot, it->second}}));
          }
        }
        break;
      case ActFunction::PropQuestion:
      case ActFunction::PropQuestionFeedback:
        if (!system_act->content.empty()) {
          const auto& sv = system_act->content.front();
          auto it = goal_.constraints.find(sv.slot);
          if (it != goal_.constraints.end() && it->second == sv.value) {
            agenda_.push_back(make_act(ActFunction::Affirm));
          } else if (it != goal_.constraints.end()) {
            // Deny now, correct next turn.
            agenda_.push_back(make_act(ActFunction::Inform, {{sv.slot, it->second}}));
            agenda_.push_back(make_act(ActFunction::Deny));
          }
        }
        break;
      case ActFunction::Recommend: {
        if (!system_act->entity_ref) break;
        const Entity& e = db_.entity(*system_act->entity_ref);
        std::vector<std::string> violated;
        for (const auto& [slot, value] : goal_.hard_constraints()) {
          if (e.informable.at(slot) != value) violated.push_back(slot);
        }
        if (!violated.empty()) {
          const std::string& slot = rng.pick(violated);
          agenda_.push_back(make_act(ActFunction::Inform, {{slot, goal_.constraints.at(slot)}}));
        } else {
          received_recommendation_ = e.id;
          for (auto it = kRequestCandidates.rbegin(); it != kRequestCandidates.rend(); ++it) {
            if (goal_.requests.count(*it) && !satisfied_requests_.count(*it)) {
              agenda_.push_back(make_act(ActFunction::Request, {{*it, ""}}));
            }
          }
        }
        break;
      }
      case ActFunction::Inform:
      case ActFunction::AnswerSet: {
        if (system_act->content.empty()) {
          // "Nothing matches": the goal is satisfiable, so restate a constraint.
          std::vector<std::string> hard;
          for (const auto& [slot, value] : goal_.hard_constraints()) hard.push_back(slot);
          if (!hard.empty()) {
            const std::string& slot = rng.pick(hard);
            agenda_.push_back(make_act(ActFunction::Inform, {{slot, goal_.constraints.at(slot)}}));
          }
        } else {
          for (const auto& sv : system_act->content) {
            if (goal_.requests.count(sv.slot)) satisfied_requests_.insert(sv.slot);
          }
        }
        break;
      }
      default:
        break;
    }
  }

  // Emit the next pending act.
  if (received_recommendation_ && satisfied_requests_ == goal_.requests) {
    agenda_.resize(1);  // flush everything above goodbye
    return emit(make_act(ActFunction::Bye));
  }
  if (agenda_.size() > 1) {
    DialogueAct act = agenda_.back();
    agenda_.pop_back();
    return emit(std::move(act));
  }
  // Agenda exhausted but goal unmet: re-raise whatever is still open.
  if (received_recommendation_) {
    for (auto it = kRequestCandidates.rbegin(); it != kRequestCandidates.rend(); ++it) {
      if (goal_.requests.count(*it) && !satisfied_requests_.count(*it)) {
        agenda_.push_back(make_act(ActFunction::Request, {{*it, ""}}));
      }
    }
    DialogueAct act = agenda_.back();
    agenda_.pop_back();
    return emit(std::move(act));
  }
  std::vector<std::string> hard;
  for (const auto& [slot, value] : goal_.hard_constraints()) hard.push_back(slot);
  if (!hard.empty()) {
    const std::string& slot = rng.pick(hard);
    return emit(make_act(ActFunction::Inform, {{slot, goal_.constraints.at(slot)}}));
  }
  return emit(make_act(ActFunction::Bye));
}

double UserSimulator::turn_reward(bool terminal) const {
  return -1.0 + ((terminal && is_success()) ? 30.0 : 0.0);
}

bool UserSimulator::is_success() const {
  return received_recommendation_.has_value() && satisfied_requests_ == goal_.requests;
}

}  // namespace mddial
