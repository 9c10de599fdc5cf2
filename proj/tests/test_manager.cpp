#include <doctest.h>

#include "mddial/errormodel.hpp"
#include "mddial/manager.hpp"
#include "mddial/usersim.hpp"

using namespace mddial;

namespace {

const Ontology& ont() {
  static const Ontology o = Ontology::restaurant_domain();
  return o;
}
const Database& db() {
  static const Database d = generate_database(7, ont());
  return d;
}

NBestList single(const DialogueAct& act, double confidence) {
  NBestList nbest;
  nbest.hypotheses.push_back({act, confidence});
  return nbest;
}

DialogueAct inform(const std::string& slot, const std::string& value) {
  return make_act(ActFunction::Inform, {{slot, value}});
}

// Drives the manager's summary-action mapping directly by fixing one agent's
// weights so the greedy choice is the wanted action.
void force_one_dim_action(DialogueManager& mgr, int action) {
  LinearQPolicy policy(AgentKind::OneDim, 7, feature_length(AgentKind::OneDim));
  const std::size_t bias = static_cast<std::size_t>(feature_length(AgentKind::OneDim)) - 1;
  policy.weights[static_cast<std::size_t>(action)][bias] = 1.0;
  mgr.set_policy(0, policy, false);
}

}  // namespace

TEST_CASE("observe: first confident inform constrains the database") {
  DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
  mgr.observe(single(inform("foodtype", "indian"), 0.9));

  const auto expected = query_matches(db(), ont(), {{"foodtype", "indian"}});
  CHECK(mgr.state().db_matches == expected);
  CHECK(mgr.goal_hypothesis() == std::map<std::string, std::string>{{"foodtype", "indian"}});
  CHECK(mgr.state().last_top_confidence == doctest::Approx(0.9));
  CHECK(mgr.state().history.size() == 1);
}

TEST_CASE("observe: contentless turns leave beliefs untouched but extend history") {
  DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
  mgr.observe(single(make_act(ActFunction::Bye), 0.8));
  CHECK(mgr.state().beliefs.slot_scores.empty());
  CHECK(mgr.state().history.size() == 1);
  CHECK(mgr.state().user_said_bye);
  CHECK(mgr.state().db_matches.size() == 149);
}

TEST_CASE("observe: denied slots drop out of the database filter") {
  DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
  mgr.observe(single(inform("area", "north"), 0.8));
  CHECK(mgr.goal_hypothesis().count("area") == 1);

  // Force a propQuestionFeedback so a deny has a target.
  force_one_dim_action(mgr, 1);
  RandomStream rng(1);
  const auto turn = mgr.respond(0.0, rng);
  REQUIRE(turn.act.has_value());
  REQUIRE(turn.act->function == ActFunction::PropQuestionFeedback);

  mgr.observe(single(make_act(ActFunction::Deny), 0.9));
  CHECK(mgr.goal_hypothesis().count("area") == 0);
  CHECK(mgr.state().db_matches.size() == 149);
  CHECK(mgr.state().grounding.at("area").status == GroundingStatus::Denied);
}

TEST_CASE("db matches always equal the query of the goal hypothesis") {
  DialogueManager mgr(ont(), db(), ManagerVariant::MultiDim);
  RandomStream rng(77);
  ErrorConfig err;
  for (int episode = 0; episode < 30; ++episode) {
    mgr.start_episode();
    UserSimulator sim(ont(), db(), rng);
    for (int t = 0; t < 10; ++t) {
      const auto reaction = sim.react(mgr.last_system_act(), rng);
      mgr.observe(corrupt(reaction.act, err, ont(), rng));
      CHECK(mgr.state().db_matches == query_matches(db(), ont(), mgr.goal_hypothesis()));
      mgr.respond(0.3, rng);
    }
  }
}

TEST_CASE("summary-action mapping") {
  RandomStream rng(5);

  SUBCASE("askSlot asks the first unmentioned slot in ontology order") {
    DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
    force_one_dim_action(mgr, 6);
    mgr.observe(single(make_act(ActFunction::Greet), 0.9));
    const auto turn = mgr.respond(0.0, rng);
    CHECK(turn.act == make_act(ActFunction::SetQuestion, {{"foodtype", ""}}));

    mgr.observe(single(inform("foodtype", "thai"), 0.9));
    const auto turn2 = mgr.respond(0.0, rng);
    CHECK(turn2.act == make_act(ActFunction::SetQuestion, {{"pricerange", ""}}));
  }

  SUBCASE("recommend picks the lowest-id match and carries the matched slots") {
    DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
    force_one_dim_action(mgr, 4);
    mgr.observe(single(inform("foodtype", "indian"), 0.9));
    const auto turn = mgr.respond(0.0, rng);
    REQUIRE(turn.act.has_value());
    CHECK(turn.act->function == ActFunction::Recommend);
    const auto expected = query_matches(db(), ont(), {{"foodtype", "indian"}});
    CHECK(turn.act->entity_ref == expected.front());
    REQUIRE(turn.act->content.size() == 1);
    CHECK(turn.act->content[0] == SlotValue{"foodtype", "indian"});
    CHECK(mgr.state().entity_under_discussion == expected.front());
  }

  SUBCASE("recommend with an empty match set reports no-match") {
    DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
    force_one_dim_action(mgr, 4);
    // Find a constraint pair with no matching entity.
    bool found = false;
    for (const auto& ft : ont().values.at("foodtype")) {
      for (const auto& nr : ont().values.at("near")) {
        if (query_matches(db(), ont(), {{"foodtype", ft}, {"near", nr}}).empty()) {
          mgr.observe(single(inform("foodtype", ft), 0.9));
          mgr.respond(0.0, rng);
          mgr.observe(single(inform("near", nr), 0.9));
          found = true;
          break;
        }
      }
      if (found) break;
    }
    REQUIRE(found);
    force_one_dim_action(mgr, 4);
    const auto turn = mgr.respond(0.0, rng);
    REQUIRE(turn.act.has_value());
    CHECK(turn.act->function == ActFunction::Inform);
    CHECK(turn.act->content.empty());
  }

  SUBCASE("answerSet answers the most recent request from the entity under discussion") {
    DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
    force_one_dim_action(mgr, 4);
    mgr.observe(single(inform("foodtype", "indian"), 0.9));
    mgr.respond(0.0, rng);
    const int eud = *mgr.state().entity_under_discussion;

    force_one_dim_action(mgr, 2);
    mgr.observe(single(make_act(ActFunction::Request, {{"phonenumber", ""}}), 0.9));
    const auto turn = mgr.respond(0.0, rng);
    REQUIRE(turn.act.has_value());
    CHECK(turn.act->function == ActFunction::Inform);
    REQUIRE(turn.act->content.size() == 1);
    CHECK(turn.act->content[0].slot == "phonenumber");
    CHECK(turn.act->content[0].value == db().entity(eud).value("phonenumber"));
    CHECK_FALSE(turn.degraded_from.has_value());
  }

  SUBCASE("answer actions without an entity under discussion degrade to askSlot") {
    DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
    force_one_dim_action(mgr, 2);
    mgr.observe(single(make_act(ActFunction::Request, {{"address", ""}}), 0.9));
    const auto turn = mgr.respond(0.0, rng);
    REQUIRE(turn.act.has_value());
    CHECK(turn.act->function == ActFunction::SetQuestion);
    CHECK(turn.degraded_from == SummaryLabel::AnswerSet);
  }

  SUBCASE("propQFeedback confirms the least-believed informed pair") {
    DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
    mgr.observe(single(inform("foodtype", "indian"), 0.9));
    mgr.respond(0.0, rng);
    mgr.observe(single(inform("area", "north"), 0.4));
    force_one_dim_action(mgr, 1);
    const auto turn = mgr.respond(0.0, rng);
    REQUIRE(turn.act.has_value());
    CHECK(turn.act->function == ActFunction::PropQuestionFeedback);
    REQUIRE(turn.act->content.size() == 1);
    CHECK(turn.act->content[0] == SlotValue{"area", "north"});
  }

  SUBCASE("negativeFeedback and returnGoodbye carry no content") {
    DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
    force_one_dim_action(mgr, 0);
    mgr.observe(single(inform("foodtype", "indian"), 0.2));
    auto turn = mgr.respond(0.0, rng);
    CHECK(turn.act == make_act(ActFunction::NegativeFeedback));

    force_one_dim_action(mgr, 5);
    mgr.observe(single(make_act(ActFunction::Bye), 0.9));
    turn = mgr.respond(0.0, rng);
    CHECK(turn.act == make_act(ActFunction::ReturnGoodbye));
  }
}

TEST_CASE("multi-dim emits exactly what one-dim would emit for the resolved row") {
  RandomStream rng(99);
  ErrorConfig err;

  for (int episode = 0; episode < 25; ++episode) {
    // Evolve a pair of managers over identical observations, then sweep all
    // 30 candidate triples on copies of that state.
    DialogueManager multi(ont(), db(), ManagerVariant::MultiDim);
    DialogueManager one(ont(), db(), ManagerVariant::OneDim);

    RandomStream sim_rng(1000 + static_cast<std::uint64_t>(episode));
    UserSimulator sim(ont(), db(), sim_rng);
    const int depth = 1 + episode % 5;
    for (int t = 0; t < depth; ++t) {
      const auto reaction = sim.react(std::nullopt, sim_rng);
      const NBestList nbest = corrupt(reaction.act, err, ont(), sim_rng);
      multi.observe(nbest);
      one.observe(nbest);
    }

    for (const auto& task : dimension_actions(Dimension::Task)) {
      for (const auto& feedback : dimension_actions(Dimension::AutoFeedback)) {
        for (const auto& social : dimension_actions(Dimension::SocialOblMan)) {
          const auto row = combine_candidate_acts(task, feedback, social);
          if (!row) continue;
          DialogueManager m2 = multi;
          DialogueManager o2 = one;
          LinearQPolicy tp(AgentKind::Task, 5, feature_length(AgentKind::Task));
          tp.weights[static_cast<std::size_t>(task.index)].back() = 1.0;
          LinearQPolicy fp(AgentKind::AutoFeedback, 3, feature_length(AgentKind::AutoFeedback));
          fp.weights[static_cast<std::size_t>(feedback.index)].back() = 1.0;
          LinearQPolicy sp(AgentKind::SocialOblMan, 2, feature_length(AgentKind::SocialOblMan));
          sp.weights[static_cast<std::size_t>(social.index)].back() = 1.0;
          m2.set_policy(0, tp, false);
          m2.set_policy(1, fp, false);
          m2.set_policy(2, sp, false);
          force_one_dim_action(o2, row->index);

          RandomStream r1(0), r2(0);
          const auto mt = m2.respond(0.0, r1);
          const auto ot = o2.respond(0.0, r2);
          REQUIRE(mt.resolved.has_value());
          CHECK(mt.resolved->index == row->index);
          CHECK(mt.act == ot.act);
        }
      }
    }
  }
  (void)rng;
}

TEST_CASE("emitted entity references always point into the database") {
  RandomStream rng(31);
  ErrorConfig err;
  DialogueManager mgr(ont(), db(), ManagerVariant::MultiDim);
  for (int episode = 0; episode < 40; ++episode) {
    mgr.start_episode();
    UserSimulator sim(ont(), db(), rng);
    for (int t = 0; t < 15; ++t) {
      const auto reaction = sim.react(mgr.last_system_act(), rng);
      mgr.observe(corrupt(reaction.act, err, ont(), rng));
      const auto turn = mgr.respond(0.5, rng);
      if (turn.act && turn.act->entity_ref) {
        CHECK(*turn.act->entity_ref >= 0);
        CHECK(*turn.act->entity_ref < db().size());
      }
      if (turn.act && turn.act->function == ActFunction::ReturnGoodbye) break;
    }
  }
}

TEST_CASE("turn counter increments once per system turn") {
  DialogueManager mgr(ont(), db(), ManagerVariant::OneDim);
  RandomStream rng(2);
  CHECK(mgr.state().turn_count == 0);
  mgr.observe(single(make_act(ActFunction::Greet), 0.9));
  mgr.respond(0.0, rng);
  CHECK(mgr.state().turn_count == 1);
  mgr.observe(single(inform("foodtype", "thai"), 0.9));
  mgr.respond(0.0, rng);
  CHECK(mgr.state().turn_count == 2);
}
