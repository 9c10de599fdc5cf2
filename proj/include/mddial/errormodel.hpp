#pragma once

#include <json.hpp>

#include "mddial/acts.hpp"
#include "mddial/rng.hpp"
#include "mddial/state.hpp"

namespace mddial {

/// Channel noise parameters. error_rate is the probability that the top
/// hypothesis is not the act the user produced.
struct ErrorConfig {
  double error_rate = 0.2;
  int nbest_len = 3;
  double confidence_concentration = 5.0;

  void validate() const;
  nlohmann::json to_json() const;
  static ErrorConfig from_json(const nlohmann::json& j);
};

/// One confusion of a user act: either a value/slot substitution within the
/// act's content or a swap to another user-side communicative function.
/// Never returns an act equal to the input.
DialogueAct confuse(const DialogueAct& act, const Ontology& ont, RandomStream& rng);

/// Simulates the understanding channel: with probability 1 - error_rate the
/// top hypothesis is the true act, otherwise a confusion (the true act is
/// then re-inserted once at a random lower rank). Remaining slots are filled
/// with distinct confusions. Confidences are a sorted symmetric Dirichlet
/// draw (concentration parameter above) scaled to a total mass of 0.9; the
/// residual 0.1 stands for all unlisted acts.
NBestList corrupt(const DialogueAct& true_act, const ErrorConfig& cfg, const Ontology& ont,
                  RandomStream& rng);

}  // namespace mddial
