#include "mddial/errormodel.hpp"

#include <algorithm>
#include <stdexcept>

namespace mddial {

void ErrorConfig::validate() const {
  if (error_rate < 0.0 || error_rate > 1.0) throw std::invalid_argument("error_rate in [0,1]");
  if (nbest_len < 1) throw std::invalid_argument("nbest_len >= 1");
  if (confidence_concentration <= 0.0) {
    throw std::invalid_argument("confidence_concentration > 0");
  }
}

nlohmann::json ErrorConfig::to_json() const {
  return nlohmann::json{{"error_rate", error_rate},
                        {"nbest_len", nbest_len},
                        {"confidence_concentration", confidence_concentration}};
}

ErrorConfig ErrorConfig::from_json(const nlohmann::json& j) {
  ErrorConfig cfg;
  cfg.error_rate = j.value("error_rate", cfg.error_rate);
  cfg.nbest_len = j.value("nbest_len", cfg.nbest_len);
  cfg.confidence_concentration = j.value("confidence_concentration", cfg.confidence_concentration);
  cfg.validate();
  return cfg;
}

namespace {

// User-side functions a confusion may swap to, per original function.
std::vector<ActFunction> swap_targets(ActFunction f) {
  static const std::vector<ActFunction> kContentless = {
      ActFunction::Affirm, ActFunction::Deny, ActFunction::Greet, ActFunction::Bye,
      ActFunction::Null};
  std::vector<ActFunction> out;
  for (ActFunction g : kContentless) {
    if (g != f) out.push_back(g);
  }
  return out;
}

DialogueAct swap_function(const DialogueAct& act, RandomStream& rng) {
  const auto targets = swap_targets(act.function);
  return make_act(rng.pick(targets));
}

bool substitutable(const DialogueAct& act, const Ontology& ont) {
  if (act.function == ActFunction::Inform) {
    for (const auto& sv : act.content) {
      if (ont.is_informable(sv.slot) && !sv.value.empty()) return true;
    }
    return false;
  }
  return act.function == ActFunction::Request && !act.content.empty();
}

DialogueAct substitute(const DialogueAct& act, const Ontology& ont, RandomStream& rng) {
  DialogueAct out = act;
  if (act.function == ActFunction::Request) {
    // Substitute the requested slot by another non-name requestable.
    const std::size_t idx = rng.uniform_below(out.content.size());
    std::vector<std::string> alternatives;
    for (const auto& slot : ont.requestable_slots) {
      if (slot != "name" && slot != out.content[idx].slot) alternatives.push_back(slot);
    }
    out.content[idx].slot = rng.pick(alternatives);
    return out;
  }
  // Inform: substitute one value within its slot (dontcare included).
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < out.content.size(); ++i) {
    if (ont.is_informable(out.content[i].slot) && !out.content[i].value.empty()) {
      candidates.push_back(i);
    }
  }
  const std::size_t idx = candidates[rng.uniform_below(candidates.size())];
  std::vector<std::string> alternatives;
  for (const auto& v : ont.values.at(out.content[idx].slot)) {
    if (v != out.content[idx].value) alternatives.push_back(v);
  }
  if (out.content[idx].value != kDontCare) alternatives.push_back(kDontCare);
  out.content[idx].value = rng.pick(alternatives);
  return out;
}

}  // namespace

DialogueAct confuse(const DialogueAct& act, const Ontology& ont, RandomStream& rng) {
  if (substitutable(act, ont) && rng.uniform_below(2) == 0) {
    return substitute(act, ont, rng);
  }
  return swap_function(act, rng);
}

NBestList corrupt(const DialogueAct& true_act, const ErrorConfig& cfg, const Ontology& ont,
                  RandomStream& rng) {
  cfg.validate();

  const bool top_wrong = cfg.error_rate > 0.0 && rng.bernoulli(cfg.error_rate);
  std::vector<DialogueAct> acts;
  acts.reserve(static_cast<std::size_t>(cfg.nbest_len));

  auto contains = [&acts](const DialogueAct& a) {
    return std::find(acts.begin(), acts.end(), a) != acts.end();
  };
  auto push_confusion = [&] {
    // Distinctness is best-effort; the alternative spaces are large enough
    // that the retry bound is never hit in practice.
    for (int attempt = 0; attempt < 64; ++attempt) {
      DialogueAct c = confuse(true_act, ont, rng);
      if (!contains(c)) {
        acts.push_back(std::move(c));
        return;
      }
    }
    acts.push_back(confuse(true_act, ont, rng));
  };

  if (top_wrong) {
    push_confusion();
    if (cfg.nbest_len > 1) {
      // Re-insert the displaced true act once, at a uniform lower rank.
      const std::size_t true_pos = 1 + rng.uniform_below(static_cast<std::size_t>(cfg.nbest_len) - 1);
      while (acts.size() < static_cast<std::size_t>(cfg.nbest_len)) {
        if (acts.size() == true_pos) {
          acts.push_back(true_act);
        } else {
          push_confusion();
        }
      }
    }
  } else {
    acts.push_back(true_act);
    while (acts.size() < static_cast<std::size_t>(cfg.nbest_len)) push_confusion();
  }

  std::vector<double> weights(acts.size());
  double sum = 0.0;
  for (auto& w : weights) {
    w = rng.gamma(cfg.confidence_concentration);
    sum += w;
  }
  std::sort(weights.begin(), weights.end(), std::greater<>());

  NBestList nbest;
  nbest.hypotheses.reserve(acts.size());
  for (std::size_t i = 0; i < acts.size(); ++i) {
    nbest.hypotheses.push_back({std::move(acts[i]), 0.9 * weights[i] / sum});
  }
  nbest.validate();
  return nbest;
}

}  // namespace mddial
