#include <doctest.h>

#include <cmath>

#include "mddial/errormodel.hpp"

using namespace mddial;

namespace {

const Ontology& ont() {
  static const Ontology o = Ontology::restaurant_domain();
  return o;
}

DialogueAct inform(const std::string& slot, const std::string& value) {
  return make_act(ActFunction::Inform, {{slot, value}});
}

}  // namespace

TEST_CASE("config validation") {
  ErrorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.error_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ErrorConfig{};
  cfg.nbest_len = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("confusions never reproduce the input act") {
  RandomStream rng(21);
  const std::vector<DialogueAct> acts = {
      inform("foodtype", "indian"), inform("area", "dontcare"),
      make_act(ActFunction::Request, {{"address", ""}}), make_act(ActFunction::Bye),
      make_act(ActFunction::Affirm)};
  for (const auto& act : acts) {
    for (int i = 0; i < 500; ++i) {
      const DialogueAct c = confuse(act, ont(), rng);
      CHECK_FALSE(c == act);
      if (c.function == ActFunction::Inform) {
        // Value substitutions stay within the slot.
        REQUIRE(c.content.size() == act.content.size());
        CHECK(c.content[0].slot == act.content[0].slot);
        CHECK(ont().is_valid_value(c.content[0].slot, c.content[0].value));
      }
    }
  }
}

TEST_CASE("degenerate rates") {
  RandomStream rng(8);
  const DialogueAct act = inform("pricerange", "cheap");

  ErrorConfig clean;
  clean.error_rate = 0.0;
  for (int i = 0; i < 200; ++i) {
    CHECK(corrupt(act, clean, ont(), rng).top().act == act);
  }

  ErrorConfig noisy;
  noisy.error_rate = 1.0;
  for (int i = 0; i < 200; ++i) {
    CHECK_FALSE(corrupt(act, noisy, ont(), rng).top().act == act);
  }
}

TEST_CASE("output satisfies the n-best invariants") {
  RandomStream rng(12);
  ErrorConfig cfg;
  const DialogueAct act = inform("near", "river");
  for (int i = 0; i < 2000; ++i) {
    const NBestList nbest = corrupt(act, cfg, ont(), rng);
    CHECK_NOTHROW(nbest.validate());
    CHECK(nbest.hypotheses.size() == 3);
    double sum = 0.0;
    for (const auto& h : nbest.hypotheses) sum += h.confidence;
    CHECK(sum == doctest::Approx(0.9).epsilon(1e-9));
  }
}

TEST_CASE("top-hypothesis error frequency is calibrated") {
  RandomStream rng(2024);
  ErrorConfig cfg;  // e = 0.2
  const DialogueAct act = inform("foodtype", "thai");
  const int n = 100000;
  int errors = 0;
  for (int i = 0; i < n; ++i) {
    if (!(corrupt(act, cfg, ont(), rng).top().act == act)) ++errors;
  }
  const double freq = errors / static_cast<double>(n);
  CHECK(std::abs(freq - 0.2) < 0.005);
}

TEST_CASE("the true act survives somewhere in the list with probability >= 1 - e") {
  RandomStream rng(31);
  ErrorConfig cfg;
  cfg.error_rate = 0.4;
  const DialogueAct act = inform("area", "north");
  const int n = 20000;
  int present = 0;
  for (int i = 0; i < n; ++i) {
    const NBestList nbest = corrupt(act, cfg, ont(), rng);
    for (const auto& h : nbest.hypotheses) {
      if (h.act == act) {
        ++present;
        break;
      }
    }
  }
  // The displaced true act is re-inserted, so presence should be ~1.
  CHECK(present / static_cast<double>(n) > 1.0 - cfg.error_rate);
}

TEST_CASE("deterministic under a fixed stream") {
  ErrorConfig cfg;
  const DialogueAct act = inform("foodtype", "french");
  RandomStream a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const NBestList na = corrupt(act, cfg, ont(), a);
    const NBestList nb = corrupt(act, cfg, ont(), b);
    REQUIRE(na.hypotheses.size() == nb.hypotheses.size());
    for (std::size_t k = 0; k < na.hypotheses.size(); ++k) {
      CHECK(na.hypotheses[k].act == nb.hypotheses[k].act);
      CHECK(na.hypotheses[k].confidence == nb.hypotheses[k].confidence);
    }
  }
}
