#include "mddial/manager.hpp"

#include <algorithm>
#include <stdexcept>

namespace mddial {

DialogueManager::DialogueManager(const Ontology& ont, const Database& db, ManagerVariant variant)
    : ont_(ont), db_(db), variant_(variant) {
  if (variant == ManagerVariant::OneDim) {
    policies_.emplace_back(AgentKind::OneDim, static_cast<int>(one_dim_actions().size()),
                           feature_length(AgentKind::OneDim));
  } else {
    policies_.emplace_back(AgentKind::Task,
                           static_cast<int>(dimension_actions(Dimension::Task).size()),
                           feature_length(AgentKind::Task));
    policies_.emplace_back(AgentKind::AutoFeedback,
                           static_cast<int>(dimension_actions(Dimension::AutoFeedback).size()),
                           feature_length(AgentKind::AutoFeedback));
    policies_.emplace_back(AgentKind::SocialOblMan,
                           static_cast<int>(dimension_actions(Dimension::SocialOblMan).size()),
                           feature_length(AgentKind::SocialOblMan));
  }
  frozen_.assign(policies_.size(), false);
  start_episode();
}

void DialogueManager::set_policy(std::size_t agent, LinearQPolicy policy, bool frozen) {
  if (agent >= policies_.size()) throw std::invalid_argument("agent index out of range");
  if (policy.kind != policies_[agent].kind) {
    throw PolicyCompatibilityError("policy agent label does not match manager slot");
  }
  policies_[agent] = std::move(policy);
  frozen_[agent] = frozen;
}

void DialogueManager::start_episode() {
  state_ = initial_state(ont_, db_);
  last_system_act_.reset();
}

std::map<std::string, std::string> DialogueManager::goal_hypothesis() const {
  std::map<std::string, std::string> constraints;
  for (const auto& [slot, g] : state_.grounding) {
    if (g.status == GroundingStatus::UserInformed || g.status == GroundingStatus::SystemConfirmed) {
      constraints[slot] = g.hypothesis;
    }
  }
  return constraints;
}

void DialogueManager::observe(const NBestList& nbest) {
  nbest.validate();
  const DialogueAct& top = nbest.top().act;

  state_.last_top_confidence = nbest.top().confidence;
  state_.beliefs = update_beliefs(std::move(state_.beliefs), nbest);

  auto update = update_grounding(std::move(state_.grounding), std::move(state_.beliefs), top,
                                 last_system_act_);
  state_.grounding = std::move(update.grounding);
  state_.beliefs = std::move(update.beliefs);

  // Request recency: the strongest requested slot this turn, if convincing,
  // becomes the answer target and reopens if it was already answered.
  std::map<std::string, double> request_mass;
  for (const auto& h : nbest.hypotheses) {
    if (h.act.function == ActFunction::Request) {
      for (const auto& sv : h.act.content) request_mass[sv.slot] += h.confidence;
    }
  }
  std::optional<std::pair<std::string, double>> best_request;
  for (const auto& [slot, mass] : request_mass) {
    if (!best_request || mass > best_request->second) best_request = {{slot, mass}};
  }
  if (best_request && best_request->second > kRequestedThreshold) {
    state_.last_requested_slot = best_request->first;
    state_.answered_requests.erase(best_request->first);
  }

  state_.user_said_bye = top.function == ActFunction::Bye;
  state_.db_matches = query_matches(db_, ont_, goal_hypothesis());
  state_.history.push_back({"usr", top});
}

DialogueAct DialogueManager::ask_slot_act() const {
  for (const auto& slot : ont_.informable_slots) {
    if (state_.grounding.at(slot).status == GroundingStatus::Unmentioned) {
      return make_act(ActFunction::SetQuestion, {{slot, ""}});
    }
  }
  // All slots mentioned: ask the one with the weakest top belief.
  std::string target = ont_.informable_slots.front();
  double lowest = 2.0;
  for (const auto& slot : ont_.informable_slots) {
    const auto top = normalized_belief(state_.beliefs, slot).top();
    const double p = top ? top->second : 0.0;
    if (p < lowest) {
      lowest = p;
      target = slot;
    }
  }
  return make_act(ActFunction::SetQuestion, {{target, ""}});
}

DialogueManager::Mapped DialogueManager::map_summary_to_act(const SummaryAction& action) {
  switch (action.label) {
    case SummaryLabel::NegativeFeedback:
      return {make_act(ActFunction::NegativeFeedback), std::nullopt};

    case SummaryLabel::ReturnGoodbye:
      return {make_act(ActFunction::ReturnGoodbye), std::nullopt};

    case SummaryLabel::PropQFeedback: {
      // Confirm the least-believed pair the user has asserted.
      std::optional<std::pair<std::string, std::string>> target;
      double lowest = 2.0;
      for (const auto& slot : ont_.informable_slots) {
        const auto& g = state_.grounding.at(slot);
        if (g.status != GroundingStatus::UserInformed) continue;
        const double score = state_.beliefs.raw_score(slot, g.hypothesis);
        if (score < lowest) {
          lowest = score;
          target = {{slot, g.hypothesis}};
        }
      }
      if (!target) return {ask_slot_act(), SummaryLabel::PropQFeedback};
      return {make_act(ActFunction::PropQuestionFeedback, {{target->first, target->second}}),
              std::nullopt};
    }

    case SummaryLabel::Recommend: {
      if (state_.db_matches.empty()) {
        return {make_act(ActFunction::Inform), std::nullopt};  // no matching venue
      }
      const Entity& e = db_.entity(state_.db_matches.front());
      std::vector<SlotValue> content;
      for (const auto& slot : ont_.informable_slots) {
        if (goal_hypothesis().count(slot)) content.push_back({slot, e.informable.at(slot)});
      }
      state_.entity_under_discussion = e.id;
      return {make_act(ActFunction::Recommend, std::move(content), e.id), std::nullopt};
    }

    case SummaryLabel::AnswerSet: {
      if (!state_.entity_under_discussion) return {ask_slot_act(), SummaryLabel::AnswerSet};
      std::optional<std::string> target;
      if (state_.last_requested_slot &&
          !state_.answered_requests.count(*state_.last_requested_slot)) {
        target = state_.last_requested_slot;
      } else {
        for (const auto& slot : ont_.requestable_slots) {
          auto it = state_.beliefs.requested.find(slot);
          if (it != state_.beliefs.requested.end() && it->second > kRequestedThreshold &&
              !state_.answered_requests.count(slot)) {
            target = slot;
            break;
          }
        }
      }
      if (!target) return {ask_slot_act(), SummaryLabel::AnswerSet};
      const Entity& e = db_.entity(*state_.entity_under_discussion);
      state_.answered_requests.insert(*target);
      return {make_act(ActFunction::Inform, {{*target, e.value(*target)}}, e.id), std::nullopt};
    }

    case SummaryLabel::AnswerProp: {
      // Only meaningful when the user posed a propositional question about
      // the entity under discussion; otherwise fall back to asking.
      if (!state_.entity_under_discussion || state_.history.empty()) {
        return {ask_slot_act(), SummaryLabel::AnswerProp};
      }
      const DialogueAct& last_user = state_.history.back().second;
      if (last_user.function != ActFunction::PropQuestion || last_user.content.empty() ||
          !ont_.is_informable(last_user.content.front().slot)) {
        return {ask_slot_act(), SummaryLabel::AnswerProp};
      }
      const auto& sv = last_user.content.front();
      const Entity& e = db_.entity(*state_.entity_under_discussion);
      if (e.informable.at(sv.slot) == sv.value) {
        return {make_act(ActFunction::Affirm, {{sv.slot, sv.value}}, e.id), std::nullopt};
      }
      return {make_act(ActFunction::Deny, {{sv.slot, e.informable.at(sv.slot)}}, e.id),
              std::nullopt};
    }

    case SummaryLabel::AskSlot:
      return {ask_slot_act(), std::nullopt};

    case SummaryLabel::Null:
      break;
  }
  throw std::invalid_argument("map_summary_to_act: not a mapped output action");
}

DialogueManager::SystemTurn DialogueManager::respond(double epsilon, RandomStream& rng) {
  SystemTurn turn;
  state_.turn_count += 1;

  if (variant_ == ManagerVariant::OneDim) {
    AgentChoice choice;
    choice.kind = AgentKind::OneDim;
    choice.features = extract_features(state_, ont_, AgentKind::OneDim);
    const double eps = frozen_[0] ? 0.0 : epsilon;
    choice.action = select_action(policies_[0], choice.features, eps, rng);
    for (int a = 0; a < policies_[0].action_count; ++a) {
      choice.q_values.push_back(q_value(policies_[0], choice.features, a));
    }
    turn.resolved = one_dim_actions()[static_cast<std::size_t>(choice.action)];
    turn.choices.push_back(std::move(choice));
  } else {
    static const AgentKind kKinds[] = {AgentKind::Task, AgentKind::AutoFeedback,
                                       AgentKind::SocialOblMan};
    static const Dimension kDims[] = {Dimension::Task, Dimension::AutoFeedback,
                                      Dimension::SocialOblMan};
    std::vector<SummaryAction> selected;
    for (std::size_t i = 0; i < 3; ++i) {
      AgentChoice choice;
      choice.kind = kKinds[i];
      choice.features = extract_features(state_, ont_, kKinds[i]);
      const double eps = frozen_[i] ? 0.0 : epsilon;
      choice.action = select_action(policies_[i], choice.features, eps, rng);
      for (int a = 0; a < policies_[i].action_count; ++a) {
        choice.q_values.push_back(q_value(policies_[i], choice.features, a));
      }
      selected.push_back(dimension_actions(kDims[i])[static_cast<std::size_t>(choice.action)]);
      turn.choices.push_back(std::move(choice));
    }
    turn.resolved = combine_candidate_acts(selected[0], selected[1], selected[2]);
  }

  if (turn.resolved) {
    Mapped mapped = map_summary_to_act(*turn.resolved);
    turn.act = std::move(mapped.act);
    turn.degraded_from = mapped.degraded_from;
    state_.history.push_back({"sys", *turn.act});
    last_system_act_ = turn.act;
  } else {
    last_system_act_.reset();  // passed the turn
  }
  return turn;
}

}  // namespace mddial
