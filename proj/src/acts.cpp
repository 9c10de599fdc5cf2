#include "mddial/acts.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace mddial {

namespace {

struct FunctionInfo {
  ActFunction function;
  const char* name;
  Dimension dimension;
};

// clang-format off
const FunctionInfo kFunctions[] = {
    {ActFunction::Inform,               "inform",               Dimension::Task},
    {ActFunction::SetQuestion,          "setQuestion",          Dimension::Task},
    {ActFunction::PropQuestion,         "propQuestion",         Dimension::Task},
    {ActFunction::AnswerSet,            "answerSet",            Dimension::Task},
    {ActFunction::AnswerProp,           "answerProp",           Dimension::Task},
    {ActFunction::Recommend,            "recommend",            Dimension::Task},
    {ActFunction::NegativeFeedback,     "negativeFeedback",     Dimension::AutoFeedback},
    {ActFunction::PropQuestionFeedback, "propQuestionFeedback", Dimension::AutoFeedback},
    {ActFunction::ReturnGoodbye,        "returnGoodbye",        Dimension::SocialOblMan},
    {ActFunction::Greet,                "greet",                Dimension::SocialOblMan},
    {ActFunction::Affirm,               "affirm",               Dimension::Task},
    {ActFunction::Deny,                 "deny",                 Dimension::Task},
    {ActFunction::Request,              "request",              Dimension::Task},
    {ActFunction::Bye,                  "bye",                  Dimension::SocialOblMan},
    {ActFunction::Null,                 "null",                 Dimension::Task},
};
// clang-format on

const FunctionInfo& info(ActFunction f) {
  for (const auto& fi : kFunctions) {
    if (fi.function == f) return fi;
  }
  throw std::logic_error("unknown act function");
}

}  // namespace

const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::Task: return "Task";
    case Dimension::AutoFeedback: return "AutoFeedback";
    case Dimension::SocialOblMan: return "SocialOblMan";
  }
  throw std::logic_error("unknown dimension");
}

Dimension dimension_from_string(const std::string& s) {
  if (s == "Task") return Dimension::Task;
  if (s == "AutoFeedback") return Dimension::AutoFeedback;
  if (s == "SocialOblMan") return Dimension::SocialOblMan;
  throw std::invalid_argument("unknown dimension: " + s);
}

const char* to_string(ActFunction f) { return info(f).name; }

ActFunction function_from_string(const std::string& s) {
  for (const auto& fi : kFunctions) {
    if (s == fi.name) return fi.function;
  }
  throw std::invalid_argument("unknown act function: " + s);
}

Dimension function_dimension(ActFunction f) { return info(f).dimension; }

DialogueAct make_act(ActFunction f, std::vector<SlotValue> content,
                     std::optional<int> entity_ref) {
  DialogueAct act;
  act.function = f;
  act.dimension = function_dimension(f);
  act.content = std::move(content);
  act.entity_ref = entity_ref;
  return act;
}

std::string serialize(const DialogueAct& act) {
  std::string out = to_string(act.function);
  out += '(';
  bool first = true;
  if (act.entity_ref) {
    out += "name=venue-" + std::to_string(*act.entity_ref);
    first = false;
  }
  for (const auto& sv : act.content) {
    if (!first) out += ',';
    first = false;
    out += sv.slot;
    if (!sv.value.empty()) {
      out += '=';
      out += sv.value;
    }
  }
  out += ')';
  return out;
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

DialogueAct parse_act(const std::string& text, const Ontology& ont) {
  const std::string trimmed = strip(text);
  const std::size_t open = trimmed.find('(');
  if (open == std::string::npos || trimmed.back() != ')') {
    throw std::invalid_argument("parse error: expected function(...) in '" + text + "'");
  }
  const std::string fname = strip(trimmed.substr(0, open));
  ActFunction function = function_from_string(fname);  // throws naming the token

  DialogueAct act = make_act(function);
  const std::string body = trimmed.substr(open + 1, trimmed.size() - open - 2);

  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    const std::string item = strip(body.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;

    const std::size_t eq = item.find('=');
    std::string slot = strip(eq == std::string::npos ? item : item.substr(0, eq));
    std::string value = eq == std::string::npos ? "" : strip(item.substr(eq + 1));

    if (!ont.is_slot(slot)) {
      throw std::invalid_argument("parse error: unknown slot '" + slot + "'");
    }
    if (slot == "name" && value.rfind("venue-", 0) == 0) {
      // Entity reference in textual form.
      try {
        act.entity_ref = std::stoi(value.substr(6));
      } catch (const std::exception&) {
        throw std::invalid_argument("parse error: bad entity name '" + value + "'");
      }
      continue;
    }
    if (!value.empty() && ont.is_informable(slot) && !ont.is_valid_value(slot, value)) {
      throw std::invalid_argument("parse error: unknown value '" + value + "' for slot '" + slot + "'");
    }
    act.content.push_back({std::move(slot), std::move(value)});
  }
  return act;
}

const std::vector<SummaryAction>& one_dim_actions() {
  static const std::vector<SummaryAction> kActions = {
      {0, Dimension::AutoFeedback, SummaryLabel::NegativeFeedback},
      {1, Dimension::AutoFeedback, SummaryLabel::PropQFeedback},
      {2, Dimension::Task, SummaryLabel::AnswerSet},
      {3, Dimension::Task, SummaryLabel::AnswerProp},
      {4, Dimension::Task, SummaryLabel::Recommend},
      {5, Dimension::SocialOblMan, SummaryLabel::ReturnGoodbye},
      {6, Dimension::Task, SummaryLabel::AskSlot},
  };
  return kActions;
}

const std::vector<SummaryAction>& dimension_actions(Dimension d) {
  static const std::vector<SummaryAction> kTask = {
      {0, Dimension::Task, SummaryLabel::AskSlot},
      {1, Dimension::Task, SummaryLabel::Recommend},
      {2, Dimension::Task, SummaryLabel::AnswerSet},
      {3, Dimension::Task, SummaryLabel::AnswerProp},
      {4, Dimension::Task, SummaryLabel::Null},
  };
  static const std::vector<SummaryAction> kFeedback = {
      {0, Dimension::AutoFeedback, SummaryLabel::NegativeFeedback},
      {1, Dimension::AutoFeedback, SummaryLabel::PropQFeedback},
      {2, Dimension::AutoFeedback, SummaryLabel::Null},
  };
  static const std::vector<SummaryAction> kSocial = {
      {0, Dimension::SocialOblMan, SummaryLabel::ReturnGoodbye},
      {1, Dimension::SocialOblMan, SummaryLabel::Null},
  };
  switch (d) {
    case Dimension::Task: return kTask;
    case Dimension::AutoFeedback: return kFeedback;
    case Dimension::SocialOblMan: return kSocial;
  }
  throw std::logic_error("unknown dimension");
}

const char* to_string(SummaryLabel l) {
  switch (l) {
    case SummaryLabel::NegativeFeedback: return "negativeFeedback";
    case SummaryLabel::PropQFeedback: return "propQFeedback";
    case SummaryLabel::AnswerSet: return "answerSet";
    case SummaryLabel::AnswerProp: return "answerProp";
    case SummaryLabel::Recommend: return "recommend";
    case SummaryLabel::ReturnGoodbye: return "returnGoodbye";
    case SummaryLabel::AskSlot: return "askSlot";
    case SummaryLabel::Null: return "null";
  }
  throw std::logic_error("unknown summary label");
}

namespace {

void check_member(const SummaryAction& a, Dimension d) {
  const auto& set = dimension_actions(d);
  if (a.index < 0 || a.index >= static_cast<int>(set.size()) ||
      !(set[static_cast<std::size_t>(a.index)] == a)) {
    throw std::invalid_argument(std::string("candidate act does not belong to the ") +
                                to_string(d) + " action set");
  }
}

const SummaryAction& one_dim_by_label(SummaryLabel l) {
  for (const auto& a : one_dim_actions()) {
    if (a.label == l) return a;
  }
  throw std::logic_error("label has no one-dimensional action");
}

}  // namespace

std::optional<SummaryAction> combine_candidate_acts(const SummaryAction& task,
                                                    const SummaryAction& feedback,
                                                    const SummaryAction& social) {
  check_member(task, Dimension::Task);
  check_member(feedback, Dimension::AutoFeedback);
  check_member(social, Dimension::SocialOblMan);

  if (feedback.label == SummaryLabel::NegativeFeedback) {
    return one_dim_by_label(SummaryLabel::NegativeFeedback);
  }
  if (task.label != SummaryLabel::Null) {
    return one_dim_by_label(task.label);
  }
  if (social.label == SummaryLabel::ReturnGoodbye) {
    return one_dim_by_label(SummaryLabel::ReturnGoodbye);
  }
  if (feedback.label == SummaryLabel::PropQFeedback) {
    return one_dim_by_label(SummaryLabel::PropQFeedback);
  }
  return std::nullopt;
}

std::map<std::string, int> enumerate_combination_table() {
  std::map<std::string, int> counts;
  for (const auto& a : one_dim_actions()) counts[std::to_string(a.index)] = 0;
  counts["null"] = 0;
  for (const auto& task : dimension_actions(Dimension::Task)) {
    for (const auto& feedback : dimension_actions(Dimension::AutoFeedback)) {
      for (const auto& social : dimension_actions(Dimension::SocialOblMan)) {
        const auto out = combine_candidate_acts(task, feedback, social);
        if (out) {
          ++counts[std::to_string(out->index)];
        } else {
          ++counts["null"];
        }
      }
    }
  }
  return counts;
}

}  // namespace mddial
