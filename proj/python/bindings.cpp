// Python bindings for the core operations: domain/database, dialogue-act
// algebra, returns, and the experiment driver.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mddial/acts.hpp"
#include "mddial/harness.hpp"
#include "mddial/ontology.hpp"
#include "mddial/policy.hpp"

namespace py = pybind11;
using namespace mddial;

namespace {

py::dict entity_to_dict(const Entity& e) {
  py::dict d;
  d["id"] = e.id;
  for (const auto& [slot, v] : e.informable) d[py::str(slot)] = v;
  for (const auto& [slot, v] : e.requestable) d[py::str(slot)] = v;
  return d;
}

py::dict act_to_dict(const DialogueAct& act) {
  py::dict d;
  d["function"] = std::string(to_string(act.function));
  d["dimension"] = std::string(to_string(act.dimension));
  py::list content;
  for (const auto& sv : act.content) content.append(py::make_tuple(sv.slot, sv.value));
  d["content"] = content;
  if (act.entity_ref) d["entity_ref"] = *act.entity_ref;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mddial, m) {
  m.doc() = "Multi-dimensional statistical dialogue management lab";

  py::class_<Database>(m, "Database")
      .def_static(
          "generate",
          [](std::uint64_t seed) {
            return generate_database(seed, Ontology::restaurant_domain());
          },
          py::arg("seed") = 0)
      .def("__len__", [](const Database& db) { return db.size(); })
      .def("entity", [](const Database& db, int id) { return entity_to_dict(db.entity(id)); })
      .def("query_matches",
           [](const Database& db, const std::map<std::string, std::string>& constraints) {
             return query_matches(db, Ontology::restaurant_domain(), constraints);
           })
      .def("to_json", [](const Database& db) { return db.to_json().dump(); });

  m.def("informable_slots", [] { return Ontology::restaurant_domain().informable_slots; });
  m.def("requestable_slots", [] { return Ontology::restaurant_domain().requestable_slots; });
  m.def("slot_values", [](const std::string& slot) {
    return Ontology::restaurant_domain().values.at(slot);
  });

  m.def(
      "parse_act",
      [](const std::string& text) {
        return act_to_dict(parse_act(text, Ontology::restaurant_domain()));
      },
      py::arg("text"), "Parse canonical act notation, e.g. inform(foodtype=indian)");
  m.def(
      "serialize_act",
      [](const std::string& function, const std::vector<std::pair<std::string, std::string>>& content) {
        std::vector<SlotValue> svs;
        for (const auto& [s, v] : content) svs.push_back({s, v});
        return serialize(make_act(function_from_string(function), std::move(svs)));
      },
      py::arg("function"), py::arg("content") = std::vector<std::pair<std::string, std::string>>{});

  m.def("enumerate_combinations", &enumerate_combination_table,
        "Tally of the 30 candidate-act combinations per output action");

  m.def("compute_returns", &compute_returns, py::arg("rewards"), py::arg("gamma") = 0.95,
        "Discounted returns R_t for one episode's reward sequence");

  m.def(
      "train",
      [](const std::string& variant, std::uint64_t seed, int runs, int dialogues,
         double error_rate, int eval_dialogues, int checkpoint_interval, std::uint64_t db_seed,
         int threads) {
        ExperimentSpec spec;
        spec.variant = experiment_variant_from_string(variant);
        spec.training.seed = seed;
        spec.training.runs = runs;
        spec.training.total_training_dialogues = dialogues;
        spec.training.error_rate = error_rate;
        spec.training.eval_dialogues_per_point = eval_dialogues;
        spec.training.checkpoint_interval = checkpoint_interval;
        spec.error.error_rate = error_rate;

        const Ontology ont = Ontology::restaurant_domain();
        const Database db = generate_database(db_seed, ont);

        TrainResult result;
        {
          py::gil_scoped_release release;
          TrainOptions options;
          options.threads = threads;
          result = train(spec, ont, db, options);
        }

        py::list curve;
        for (const auto& p : result.curve.points) {
          py::dict row;
          row["dialogues"] = p.dialogues;
          row["mean_reward"] = p.mean_reward;
          row["mean_success"] = p.mean_success;
          row["mean_length"] = p.mean_length;
          row["std_reward"] = p.std_reward;
          curve.append(row);
        }
        return curve;
      },
      py::arg("variant") = "one-dim", py::arg("seed") = 0, py::arg("runs") = 1,
      py::arg("dialogues") = 2000, py::arg("error_rate") = 0.2, py::arg("eval_dialogues") = 500,
      py::arg("checkpoint_interval") = 1000, py::arg("db_seed") = 0, py::arg("threads") = 0,
      "Train policies and return the learning curve as a list of dicts");
}
