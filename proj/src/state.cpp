#include "mddial/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mddial {

void NBestList::validate() const {
  if (hypotheses.empty()) throw std::invalid_argument("n-best list must not be empty");
  double sum = 0.0;
  double prev = 1.0;
  for (const auto& h : hypotheses) {
    if (h.confidence <= 0.0 || h.confidence > 1.0) {
      throw std::invalid_argument("hypothesis confidence must be in (0,1]");
    }
    if (h.confidence > prev + 1e-12) {
      throw std::invalid_argument("n-best confidences must be descending");
    }
    prev = h.confidence;
    sum += h.confidence;
  }
  if (sum > 1.0 + 1e-9) throw std::invalid_argument("n-best confidences must sum to <= 1");
}

double BeliefState::raw_score(const std::string& slot, const std::string& value) const {
  auto s = slot_scores.find(slot);
  if (s == slot_scores.end()) return 0.0;
  auto v = s->second.find(value);
  return v == s->second.end() ? 0.0 : v->second;
}

BeliefState update_beliefs(BeliefState beliefs, const NBestList& nbest) {
  nbest.validate();

  // Confidence mass per asserted informable pair and per requested slot.
  std::map<std::pair<std::string, std::string>, double> inform_mass;
  std::map<std::string, double> request_mass;
  for (const auto& h : nbest.hypotheses) {
    if (h.act.function == ActFunction::Inform) {
      for (const auto& sv : h.act.content) {
        if (!sv.value.empty()) inform_mass[{sv.slot, sv.value}] += h.confidence;
      }
    } else if (h.act.function == ActFunction::Request) {
      for (const auto& sv : h.act.content) request_mass[sv.slot] += h.confidence;
    }
  }

  for (const auto& [pair, c] : inform_mass) {
    auto& score = beliefs.slot_scores[pair.first][pair.second];
    score = (score == 0.0) ? c : c * score;  // first evidence stores c, repeats multiply
  }
  for (const auto& [slot, c] : request_mass) {
    auto& p = beliefs.requested[slot];
    p = std::max(p, c);
  }
  return beliefs;
}

std::optional<std::pair<std::string, double>> NormalizedBelief::top() const {
  std::optional<std::pair<std::string, double>> best;
  for (const auto& v : values) {
    if (!best || v.second > best->second) best = v;
  }
  return best;
}

NormalizedBelief normalized_belief(const BeliefState& beliefs, const std::string& slot) {
  NormalizedBelief out;
  auto it = beliefs.slot_scores.find(slot);
  double sum = 0.0;
  if (it != beliefs.slot_scores.end()) {
    for (const auto& [value, score] : it->second) sum += score;
    const double denom = sum + 1.0;
    for (const auto& [value, score] : it->second) out.values.push_back({value, score / denom});
  }
  out.unknown = 1.0 / (sum + 1.0);
  return out;
}

const char* to_string(GroundingStatus s) {
  switch (s) {
    case GroundingStatus::Unmentioned: return "unmentioned";
    case GroundingStatus::UserInformed: return "user_informed";
    case GroundingStatus::SystemConfirmed: return "system_confirmed";
    case GroundingStatus::Denied: return "denied";
  }
  throw std::logic_error("unknown grounding status");
}

GroundingUpdate update_grounding(GroundingState grounding, BeliefState beliefs,
                                 const DialogueAct& user_act,
                                 const std::optional<DialogueAct>& last_system_act) {
  const bool sys_propqf =
      last_system_act && last_system_act->function == ActFunction::PropQuestionFeedback &&
      !last_system_act->content.empty();

  if (user_act.function == ActFunction::Inform) {
    for (const auto& sv : user_act.content) {
      if (sv.value.empty()) continue;
      grounding[sv.slot] = {GroundingStatus::UserInformed, sv.value};
    }
  } else if (user_act.function == ActFunction::Affirm && sys_propqf) {
    const auto& sv = last_system_act->content.front();
    grounding[sv.slot] = {GroundingStatus::SystemConfirmed, sv.value};
  } else if (user_act.function == ActFunction::Deny && sys_propqf) {
    const auto& sv = last_system_act->content.front();
    grounding[sv.slot] = {GroundingStatus::Denied, sv.value};
    auto slot_it = beliefs.slot_scores.find(sv.slot);
    if (slot_it != beliefs.slot_scores.end()) {
      auto val_it = slot_it->second.find(sv.value);
      if (val_it != slot_it->second.end()) val_it->second *= 0.5;
    }
  }

  // Implicit confirmation: values the system verbalized last turn stand
  // confirmed unless the user objected or replaced them this turn.
  if (last_system_act && user_act.function != ActFunction::Deny &&
      (last_system_act->function == ActFunction::Recommend ||
       last_system_act->function == ActFunction::Inform ||
       last_system_act->function == ActFunction::AnswerSet)) {
    for (const auto& sv : last_system_act->content) {
      if (sv.value.empty()) continue;
      auto it = grounding.find(sv.slot);
      if (it != grounding.end() && it->second.status == GroundingStatus::UserInformed &&
          it->second.hypothesis == sv.value) {
        it->second.status = GroundingStatus::SystemConfirmed;
      }
    }
  }

  return {std::move(grounding), std::move(beliefs)};
}

DialogueState initial_state(const Ontology& ont, const Database& db) {
  DialogueState state;
  for (const auto& slot : ont.informable_slots) state.grounding[slot] = SlotGrounding{};
  state.db_matches = query_matches(db, ont, {});
  return state;
}

nlohmann::json DialogueState::summary_json(const Ontology& ont) const {
  nlohmann::json beliefs_j = nlohmann::json::object();
  nlohmann::json grounding_j = nlohmann::json::object();
  for (const auto& slot : ont.informable_slots) {
    const auto nb = normalized_belief(beliefs, slot);
    nlohmann::json slot_j = nlohmann::json::object();
    for (const auto& [value, p] : nb.values) slot_j[value] = p;
    slot_j["unknown"] = nb.unknown;
    beliefs_j[slot] = std::move(slot_j);
    const auto& g = grounding.at(slot);
    grounding_j[slot] = {{"status", to_string(g.status)}, {"hypothesis", g.hypothesis}};
  }
  nlohmann::json requested_j = nlohmann::json::object();
  for (const auto& [slot, p] : beliefs.requested) requested_j[slot] = p;
  return nlohmann::json{
      {"turn", turn_count},
      {"db_matches", db_matches.size()},
      {"entity_under_discussion",
       entity_under_discussion ? nlohmann::json(*entity_under_discussion) : nlohmann::json()},
      {"last_top_confidence", last_top_confidence},
      {"user_said_bye", user_said_bye},
      {"beliefs", std::move(beliefs_j)},
      {"grounding", std::move(grounding_j)},
      {"requested", std::move(requested_j)},
  };
}

// ---------------------------------------------------------------------------
// Features

const char* to_string(AgentKind k) {
  switch (k) {
    case AgentKind::Task: return "task";
    case AgentKind::AutoFeedback: return "autofeedback";
    case AgentKind::SocialOblMan: return "socialoblman";
    case AgentKind::OneDim: return "onedim";
  }
  throw std::logic_error("unknown agent kind");
}

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "task") return AgentKind::Task;
  if (s == "autofeedback") return AgentKind::AutoFeedback;
  if (s == "socialoblman") return AgentKind::SocialOblMan;
  if (s == "onedim") return AgentKind::OneDim;
  throw std::invalid_argument("unknown agent kind: " + s);
}

const char* feature_schema(AgentKind k) {
  switch (k) {
    case AgentKind::Task: return "task-v1";
    case AgentKind::AutoFeedback: return "autofeedback-v1";
    case AgentKind::SocialOblMan: return "socialoblman-v1";
    case AgentKind::OneDim: return "onedim-v1";
  }
  throw std::logic_error("unknown agent kind");
}

namespace {

const std::vector<std::string> kBeliefBins = {"unknown", "le50", "le80", "hi"};
const std::vector<std::string> kGroundBins = {"unmentioned", "user_informed", "system_confirmed", "denied"};
const std::vector<std::string> kDbBins = {"none", "one", "few", "many"};
const std::vector<std::string> kConfBins = {"le30", "le50", "le80", "hi"};
const std::vector<std::string> kRequestFlags = {"phonenumber", "address", "price", "postcode"};

std::vector<std::string> build_names(AgentKind k) {
  std::vector<std::string> names;
  const auto slots = Ontology::restaurant_domain().informable_slots;
  switch (k) {
    case AgentKind::Task:
      for (const auto& slot : slots) {
        for (const auto& b : kBeliefBins) names.push_back("belief." + slot + "." + b);
        for (const auto& g : kGroundBins) names.push_back("grounding." + slot + "." + g);
      }
      for (const auto& b : kDbBins) names.push_back("db." + b);
      names.push_back("recommended");
      for (const auto& r : kRequestFlags) names.push_back("requested." + r);
      names.push_back("bias");
      break;
    case AgentKind::AutoFeedback:
      for (const auto& b : kConfBins) names.push_back("conf." + b);
      for (int i = 0; i <= 4; ++i) names.push_back("unconfirmed." + std::to_string(i));
      names.push_back("bias");
      break;
    case AgentKind::SocialOblMan:
      names = {"user_said_bye", "task_complete", "bias"};
      break;
    case AgentKind::OneDim:
      for (auto part : {AgentKind::Task, AgentKind::AutoFeedback, AgentKind::SocialOblMan}) {
        for (const auto& n : build_names(part)) {
          names.push_back(std::string(to_string(part)) + "." + n);
        }
      }
      break;
  }
  return names;
}

}  // namespace

const std::vector<std::string>& feature_names(AgentKind k) {
  static const std::vector<std::string> task = build_names(AgentKind::Task);
  static const std::vector<std::string> feedback = build_names(AgentKind::AutoFeedback);
  static const std::vector<std::string> social = build_names(AgentKind::SocialOblMan);
  static const std::vector<std::string> onedim = build_names(AgentKind::OneDim);
  switch (k) {
    case AgentKind::Task: return task;
    case AgentKind::AutoFeedback: return feedback;
    case AgentKind::SocialOblMan: return social;
    case AgentKind::OneDim: return onedim;
  }
  throw std::logic_error("unknown agent kind");
}

int feature_length(AgentKind k) { return static_cast<int>(feature_names(k).size()); }

namespace {

bool request_outstanding(const DialogueState& state, const std::string& slot) {
  auto it = state.beliefs.requested.find(slot);
  const double p = it == state.beliefs.requested.end() ? 0.0 : it->second;
  return p > kRequestedThreshold && !state.answered_requests.count(slot);
}

std::vector<double> task_features(const DialogueState& state, const Ontology& ont) {
  std::vector<double> f;
  f.reserve(42);
  for (const auto& slot : ont.informable_slots) {
    const auto top = normalized_belief(state.beliefs, slot).top();
    int bin = 0;  // unknown
    if (top) {
      const double p = top->second;
      bin = p <= 0.5 ? 1 : (p <= 0.8 ? 2 : 3);
    }
    for (int i = 0; i < 4; ++i) f.push_back(i == bin ? 1.0 : 0.0);
    const int g = static_cast<int>(state.grounding.at(slot).status);
    for (int i = 0; i < 4; ++i) f.push_back(i == g ? 1.0 : 0.0);
  }
  const std::size_t n = state.db_matches.size();
  const int db_bin = n == 0 ? 0 : (n == 1 ? 1 : (n <= 4 ? 2 : 3));
  for (int i = 0; i < 4; ++i) f.push_back(i == db_bin ? 1.0 : 0.0);
  f.push_back(state.entity_under_discussion ? 1.0 : 0.0);
  for (const auto& slot : kRequestFlags) f.push_back(request_outstanding(state, slot) ? 1.0 : 0.0);
  f.push_back(1.0);
  return f;
}

std::vector<double> feedback_features(const DialogueState& state) {
  std::vector<double> f;
  f.reserve(10);
  const double c = state.last_top_confidence;
  const int bin = c <= 0.3 ? 0 : (c <= 0.5 ? 1 : (c <= 0.8 ? 2 : 3));
  for (int i = 0; i < 4; ++i) f.push_back(i == bin ? 1.0 : 0.0);
  int unconfirmed = 0;
  for (const auto& [slot, g] : state.grounding) {
    if (g.status == GroundingStatus::UserInformed) ++unconfirmed;
  }
  unconfirmed = std::min(unconfirmed, 4);
  for (int i = 0; i <= 4; ++i) f.push_back(i == unconfirmed ? 1.0 : 0.0);
  f.push_back(1.0);
  return f;
}

std::vector<double> social_features(const DialogueState& state) {
  bool requests_answered = true;
  for (const auto& [slot, p] : state.beliefs.requested) {
    if (p > kRequestedThreshold && !state.answered_requests.count(slot)) {
      requests_answered = false;
      break;
    }
  }
  const bool task_complete = state.entity_under_discussion.has_value() && requests_answered;
  return {state.user_said_bye ? 1.0 : 0.0, task_complete ? 1.0 : 0.0, 1.0};
}

}  // namespace

FeatureVector extract_features(const DialogueState& state, const Ontology& ont, AgentKind kind) {
  FeatureVector fv;
  fv.kind = kind;
  switch (kind) {
    case AgentKind::Task:
      fv.values = task_features(state, ont);
      break;
    case AgentKind::AutoFeedback:
      fv.values = feedback_features(state);
      break;
    case AgentKind::SocialOblMan:
      fv.values = social_features(state);
      break;
    case AgentKind::OneDim: {
      fv.values = task_features(state, ont);
      const auto af = feedback_features(state);
      fv.values.insert(fv.values.end(), af.begin(), af.end());
      const auto so = social_features(state);
      fv.values.insert(fv.values.end(), so.begin(), so.end());
      break;
    }
  }
  return fv;
}

}  // namespace mddial
