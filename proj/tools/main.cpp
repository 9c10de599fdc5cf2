// mddial command-line interface: database generation, policy training,
// evaluation, transfer experiments, combination-table inspection, and an
// interactive chat loop against trained policies.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mddial/acts.hpp"
#include "mddial/harness.hpp"
#include "mddial/manager.hpp"
#include "mddial/ontology.hpp"

namespace fs = std::filesystem;
using namespace mddial;

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

struct DomainOptions {
  std::uint64_t db_seed = 0;
  std::string ontology_file;
  std::string db_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--db-seed", db_seed, "Seed for the synthetic database (default 0)");
    cmd->add_option("--ontology", ontology_file, "Ontology JSON file (default: built-in domain)");
    cmd->add_option("--db", db_file, "Database JSON file (default: generated from --db-seed)");
  }

  Ontology ontology() const {
    return ontology_file.empty() ? Ontology::restaurant_domain()
                                 : Ontology::from_json(read_json(ontology_file));
  }
  Database database(const Ontology& ont) const {
    return db_file.empty() ? generate_database(db_seed, ont)
                           : Database::from_json(read_json(db_file), ont);
  }
};

std::vector<LinearQPolicy> load_policy_dir(const fs::path& dir, ManagerVariant variant) {
  std::vector<LinearQPolicy> policies;
  if (variant == ManagerVariant::OneDim) {
    policies.push_back(load_policy(read_json(dir / "onedim.json"), AgentKind::OneDim));
  } else {
    policies.push_back(load_policy(read_json(dir / "task.json"), AgentKind::Task));
    policies.push_back(load_policy(read_json(dir / "autofeedback.json"), AgentKind::AutoFeedback));
    policies.push_back(load_policy(read_json(dir / "socialoblman.json"), AgentKind::SocialOblMan));
  }
  return policies;
}

void save_policy_dir(const fs::path& dir, const std::vector<LinearQPolicy>& policies) {
  for (const auto& p : policies) {
    write_json(dir / (std::string(to_string(p.kind)) + ".json"), save_policy(p));
  }
}

int cmd_gen_db(const DomainOptions& domain, std::uint64_t seed, const std::string& out,
               const std::string& ontology_out) {
  const Ontology ont = domain.ontology();
  const Database db = generate_database(seed, ont);
  write_json(out, db.to_json());
  std::cout << "wrote " << out << " (" << db.size() << " entities)\n";
  if (!ontology_out.empty()) {
    write_json(ontology_out, ont.to_json());
    std::cout << "wrote " << ontology_out << "\n";
  }
  return 0;
}

int cmd_enumerate(bool as_json) {
  const auto counts = enumerate_combination_table();
  if (as_json) {
    std::cout << nlohmann::json(counts).dump() << "\n";
    return 0;
  }
  std::cout << "action  dimension     label             combinations\n";
  int total = 0;
  for (const auto& action : one_dim_actions()) {
    const int n = counts.at(std::to_string(action.index));
    total += n;
    std::printf("%-7d %-13s %-17s %d\n", action.index, to_string(action.dimension),
                to_string(action.label), n);
  }
  total += counts.at("null");
  std::printf("%-7s %-13s %-17s %d\n", "null", "-", "pass", counts.at("null"));
  std::printf("%-7s %-13s %-17s %d\n", "total", "-", "-", total);
  return 0;
}

struct TrainCli {
  std::string variant = "one-dim";
  std::string out;
  std::string source_dir;
  std::string freeze;
  std::string config_file;
  std::uint64_t seed = 0;
  int runs = -1;
  int dialogues = -1;
  double error_rate = -1.0;
  int eval_dialogues = -1;
  int checkpoint_interval = -1;
  int threads = 0;
  int log_every = 5000;
};

ExperimentSpec build_spec(const TrainCli& cli) {
  ExperimentSpec spec;
  if (!cli.config_file.empty()) spec = ExperimentSpec::from_json(read_json(cli.config_file));
  spec.variant = experiment_variant_from_string(cli.variant);
  spec.training.seed = cli.seed;
  if (cli.runs >= 0) spec.training.runs = cli.runs;
  if (cli.dialogues >= 0) spec.training.total_training_dialogues = cli.dialogues;
  if (cli.error_rate >= 0.0) {
    spec.training.error_rate = cli.error_rate;
    spec.error.error_rate = cli.error_rate;
  } else {
    spec.error.error_rate = spec.training.error_rate;
  }
  if (cli.eval_dialogues >= 0) spec.training.eval_dialogues_per_point = cli.eval_dialogues;
  if (cli.checkpoint_interval >= 0) spec.training.checkpoint_interval = cli.checkpoint_interval;
  if (!cli.source_dir.empty()) {
    spec.source = SourcePolicies{read_json(fs::path(cli.source_dir) / "autofeedback.json"),
                                 read_json(fs::path(cli.source_dir) / "socialoblman.json")};
  }
  if (!cli.freeze.empty()) {
    const bool one_dim = spec.variant == ExperimentVariant::OneDim;
    std::vector<bool> mask(one_dim ? 1 : 3, false);
    std::stringstream ss(cli.freeze);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      const AgentKind kind = agent_kind_from_string(name);
      if (one_dim && kind != AgentKind::OneDim) {
        throw std::invalid_argument("--freeze: one-dim has only the 'onedim' agent");
      }
      if (!one_dim && kind == AgentKind::OneDim) {
        throw std::invalid_argument("--freeze: 'onedim' is not a multi-dim agent");
      }
      mask[one_dim ? 0 : static_cast<std::size_t>(kind)] = true;
    }
    spec.freeze_override = mask;
  }
  spec.validate();
  return spec;
}

int cmd_train(const DomainOptions& domain, const TrainCli& cli) {
  const Ontology ont = domain.ontology();
  const Database db = domain.database(ont);
  ExperimentSpec spec = build_spec(cli);

  const fs::path out_dir(cli.out);
  fs::create_directories(out_dir / "logs");

  std::ofstream log_stream(out_dir / "logs" / "train_samples.jsonl", std::ios::binary);
  TrainOptions options;
  options.threads = cli.threads;
  options.log_every = cli.log_every;
  options.sample_logger = [&log_stream](const nlohmann::json& record) {
    log_stream << record.dump() << "\n";
  };

  TrainResult result = train(spec, ont, db, options);

  // Freeze overrides only affect training; record the effective mask.
  write_json(out_dir / "config.json", spec.to_json());
  write_text(out_dir / "curve.csv", result.curve.to_csv());
  for (std::size_t r = 0; r < result.final_policies.size(); ++r) {
    save_policy_dir(out_dir / "policies" / ("run" + std::to_string(r)), result.final_policies[r]);
  }

  std::cout << result.curve.to_csv();
  std::cout << "wrote " << (out_dir / "curve.csv").string() << "\n";
  return 0;
}

int cmd_evaluate(const DomainOptions& domain, const std::string& policies_dir,
                 const std::string& variant_name, int dialogues, double error_rate,
                 std::uint64_t seed, const std::string& log_file) {
  const Ontology ont = domain.ontology();
  const Database db = domain.database(ont);
  const ExperimentVariant variant = experiment_variant_from_string(variant_name);
  const ManagerVariant mv =
      variant == ExperimentVariant::OneDim ? ManagerVariant::OneDim : ManagerVariant::MultiDim;
  const auto policies = load_policy_dir(policies_dir, mv);

  ErrorConfig err;
  err.error_rate = error_rate;

  std::ofstream log_stream;
  TurnLogger logger;
  if (!log_file.empty()) {
    log_stream.open(log_file, std::ios::binary);
    logger = [&log_stream](const nlohmann::json& record) { log_stream << record.dump() << "\n"; };
  }

  const EvalMetrics metrics = evaluate(ont, db, mv, policies, err, dialogues, 30, seed,
                                       logger ? &logger : nullptr);
  std::cout << metrics.to_json().dump(2) << "\n";
  return 0;
}

int cmd_chat(const DomainOptions& domain, const std::string& policies_dir,
             const std::string& variant_name) {
  const Ontology ont = domain.ontology();
  const Database db = domain.database(ont);
  const ExperimentVariant variant = experiment_variant_from_string(variant_name);
  const ManagerVariant mv =
      variant == ExperimentVariant::OneDim ? ManagerVariant::OneDim : ManagerVariant::MultiDim;

  DialogueManager manager(ont, db, mv);
  if (!policies_dir.empty()) {
    const auto policies = load_policy_dir(policies_dir, mv);
    for (std::size_t a = 0; a < policies.size(); ++a) manager.set_policy(a, policies[a], true);
  }

  std::cout << "Type dialogue acts like inform(foodtype=indian), request(phonenumber), bye().\n"
            << "Slots:";
  for (const auto& s : ont.informable_slots) std::cout << " " << s;
  std::cout << " | requestable:";
  for (const auto& s : ont.requestable_slots) std::cout << " " << s;
  std::cout << "\n'quit' exits.\n";

  RandomStream rng(0);
  std::string line;
  while (true) {
    std::cout << "usr> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == "quit" || line == "exit") break;
    if (line.empty()) continue;

    DialogueAct act;
    try {
      act = parse_act(line, ont);
    } catch (const std::exception& e) {
      std::cout << e.what() << "\n";
      continue;
    }

    NBestList nbest;
    nbest.hypotheses.push_back({act, 1.0});
    manager.observe(nbest);
    const auto turn = manager.respond(0.0, rng);

    std::cout << "sys> " << (turn.act ? serialize(*turn.act) : "(pass)") << "\n";
    const auto& state = manager.state();
    std::cout << "     [matches=" << state.db_matches.size();
    if (state.entity_under_discussion) std::cout << " eud=venue-" << *state.entity_under_discussion;
    std::cout << " hypothesis={";
    bool first = true;
    for (const auto& [slot, value] : manager.goal_hypothesis()) {
      if (!first) std::cout << ",";
      first = false;
      std::cout << slot << "=" << value;
    }
    std::cout << "}]\n";

    if (turn.act && turn.act->function == ActFunction::ReturnGoodbye) break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-dimensional statistical dialogue management lab"};
  app.require_subcommand(1);

  // gen-db
  auto* gen = app.add_subcommand("gen-db", "Generate the synthetic database as JSON");
  DomainOptions gen_domain;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "db.json";
  std::string gen_ontology_out;
  gen->add_option("--seed", gen_seed, "Generation seed");
  gen->add_option("--out", gen_out, "Output database file");
  gen->add_option("--ontology-out", gen_ontology_out, "Also dump the ontology JSON here");
  gen_domain.attach(gen);

  // enumerate-combinations
  bool enumerate_json = false;
  auto* enumerate = app.add_subcommand(
      "enumerate-combinations", "Tally all 30 action combinations by output action");
  enumerate->add_flag("--json", enumerate_json, "Emit the tally as JSON");

  // train / transfer
  TrainCli train_cli;
  DomainOptions train_domain;
  auto* train_cmd = app.add_subcommand("train", "Train policies and write the learning curve");
  train_cmd->add_option("--variant", train_cli.variant,
                        "one-dim | multi-dim | multi-dim-transfer | multi-dim-transfer-adapt");
  train_cmd->add_option("--seed", train_cli.seed, "Base seed; run k uses seed+k");
  train_cmd->add_option("--runs", train_cli.runs, "Independent training runs (default 10)");
  train_cmd->add_option("--dialogues", train_cli.dialogues, "Training dialogues per run (default 40000)");
  train_cmd->add_option("--error-rate", train_cli.error_rate, "Top-hypothesis error rate (default 0.2)");
  train_cmd->add_option("--out", train_cli.out, "Output directory")->required();
  train_cmd->add_option("--source-policies", train_cli.source_dir,
                        "Directory with autofeedback.json and socialoblman.json");
  train_cmd->add_option("--freeze", train_cli.freeze,
                        "Comma-separated agents to freeze (overrides the variant default)");
  train_cmd->add_option("--config", train_cli.config_file, "Experiment config JSON");
  train_cmd->add_option("--eval-dialogues", train_cli.eval_dialogues,
                        "Evaluation dialogues per checkpoint (default 3000)");
  train_cmd->add_option("--checkpoint-interval", train_cli.checkpoint_interval,
                        "Dialogues between checkpoints (default 5000)");
  train_cmd->add_option("--threads", train_cli.threads, "Worker threads (default: hardware)");
  train_cmd->add_option("--log-every", train_cli.log_every,
                        "Log every Nth run-0 training episode (0 disables)");
  train_domain.attach(train_cmd);

  TrainCli transfer_cli;
  transfer_cli.variant = "multi-dim-transfer";
  DomainOptions transfer_domain;
  bool transfer_adapt = false;
  auto* transfer_cmd =
      app.add_subcommand("transfer", "Re-train with pretrained domain-independent policies");
  transfer_cmd->add_flag("--adapt", transfer_adapt,
                         "Keep updating the transferred policies (transfer+adapt)");
  transfer_cmd->add_option("--seed", transfer_cli.seed, "Base seed; run k uses seed+k");
  transfer_cmd->add_option("--runs", transfer_cli.runs, "Independent training runs");
  transfer_cmd->add_option("--dialogues", transfer_cli.dialogues, "Training dialogues per run");
  transfer_cmd->add_option("--error-rate", transfer_cli.error_rate, "Top-hypothesis error rate");
  transfer_cmd->add_option("--out", transfer_cli.out, "Output directory")->required();
  transfer_cmd->add_option("--source-policies", transfer_cli.source_dir,
                           "Directory with autofeedback.json and socialoblman.json")->required();
  transfer_cmd->add_option("--config", transfer_cli.config_file, "Experiment config JSON");
  transfer_cmd->add_option("--eval-dialogues", transfer_cli.eval_dialogues,
                           "Evaluation dialogues per checkpoint");
  transfer_cmd->add_option("--checkpoint-interval", transfer_cli.checkpoint_interval,
                           "Dialogues between checkpoints");
  transfer_cmd->add_option("--threads", transfer_cli.threads, "Worker threads");
  transfer_domain.attach(transfer_cmd);

  // evaluate
  DomainOptions eval_domain;
  std::string eval_policies, eval_variant = "one-dim", eval_log;
  int eval_dialogues = 3000;
  double eval_error_rate = 0.2;
  std::uint64_t eval_seed = 0;
  auto* eval_cmd = app.add_subcommand("evaluate", "Greedy evaluation of saved policies");
  eval_cmd->add_option("--policies", eval_policies, "Policy directory")->required();
  eval_cmd->add_option("--variant", eval_variant, "Variant the policies belong to");
  eval_cmd->add_option("--dialogues", eval_dialogues, "Number of evaluation dialogues");
  eval_cmd->add_option("--error-rate", eval_error_rate, "Top-hypothesis error rate");
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");
  eval_cmd->add_option("--log", eval_log, "Write per-turn JSON-lines log here");
  eval_domain.attach(eval_cmd);

  // chat
  DomainOptions chat_domain;
  std::string chat_policies, chat_variant = "one-dim";
  auto* chat_cmd = app.add_subcommand("chat", "Interactive act-notation chat with a policy");
  chat_cmd->add_option("--policies", chat_policies, "Policy directory (default: zero weights)");
  chat_cmd->add_option("--variant", chat_variant, "Variant the policies belong to");
  chat_domain.attach(chat_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_db(gen_domain, gen_seed, gen_out, gen_ontology_out);
    if (enumerate->parsed()) return cmd_enumerate(enumerate_json);
    if (train_cmd->parsed()) return cmd_train(train_domain, train_cli);
    if (transfer_cmd->parsed()) {
      transfer_cli.variant = transfer_adapt ? "multi-dim-transfer-adapt" : "multi-dim-transfer";
      return cmd_train(transfer_domain, transfer_cli);
    }
    if (eval_cmd->parsed()) {
      return cmd_evaluate(eval_domain, eval_policies, eval_variant, eval_dialogues,
                          eval_error_rate, eval_seed, eval_log);
    }
    if (chat_cmd->parsed()) return cmd_chat(chat_domain, chat_policies, chat_variant);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
