// Acceptance suite. Runs every stated criterion end to end against the real
// artifacts (library API and CLI binary) and prints one PASS/FAIL line per
// criterion. Exits non-zero if any criterion fails.
//
// Usage: acceptance_tests <path-to-mddial-cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mddial/errormodel.hpp"
#include "mddial/harness.hpp"
#include "mddial/manager.hpp"
#include "mddial/ontology.hpp"

using namespace mddial;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Criterion> g_results;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  g_results.push_back({id, name, pass, detail});
  std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_command(const std::string& command) { return std::system(command.c_str()); }

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

const CheckpointStats& point_at(const LearningCurve& curve, int dialogues) {
  for (const auto& p : curve.points) {
    if (p.dialogues == dialogues) return p;
  }
  throw std::runtime_error("no checkpoint at " + std::to_string(dialogues));
}

// Paired mean difference and its standard error across runs.
struct PairedDiff {
  double mean = 0.0;
  double se = 0.0;
};

PairedDiff paired_diff(const std::vector<double>& a, const std::vector<double>& b) {
  PairedDiff out;
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  out.mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double acc = 0.0;
  for (double x : d) acc += (x - out.mean) * (x - out.mean);
  out.se = n > 1 ? std::sqrt(acc / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n))
                 : 0.0;
  return out;
}

}  // namespace

// --------------------------------------------------------------------------
// Fast criteria

void criterion_1_combination_table(const std::string& cli, const fs::path& scratch) {
  const auto start = Clock::now();
  const fs::path out = scratch / "enumerate.json";
  const int rc = run_command(cli + " enumerate-combinations --json > " + out.string());
  bool pass = rc == 0;
  std::string detail;
  if (pass) {
    nlohmann::json j;
    std::ifstream(out) >> j;
    const nlohmann::json expected = {{"0", 10}, {"1", 1}, {"2", 4},    {"3", 4},
                                     {"4", 4},  {"5", 2}, {"6", 4},    {"null", 1}};
    pass = j == expected;
    detail = "cli tally " + j.dump() + (pass ? " == " : " != ") + expected.dump();
  } else {
    detail = "cli exited with status " + std::to_string(rc);
  }
  const double secs = seconds_since(start);
  pass = pass && secs < 1.0;
  report(1, "combination table", pass, detail + ", " + fmt(secs) + "s");
}

void criterion_6_return_oracle() {
  RandomStream rng(606);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 1 + rng.uniform_below(50);
    std::vector<double> rewards(len);
    for (auto& r : rewards) r = -5.0 + 10.0 * rng.uniform01();
    const double gamma = rng.uniform01();
    const auto fast = compute_returns(rewards, gamma);
    for (std::size_t t = 0; t < len; ++t) {
      double acc = 0.0, g = 1.0;
      for (std::size_t k = t; k < len; ++k) {
        acc += g * rewards[k];
        g *= gamma;
      }
      worst = std::max(worst, std::abs(fast[t] - acc));
    }
  }

  const auto r = compute_returns({-1.0, -1.0, 29.0}, 0.95);
  const double oracle_r0 = -1.0 + 0.95 * -1.0 + 0.9025 * 29.0;  // 24.2225
  const bool example_ok = std::abs(r[0] - oracle_r0) < 1e-12 &&
                          std::abs(r[1] - 26.55) < 1e-12 && std::abs(r[2] - 29.0) < 1e-12;
  const bool pass = worst <= 1e-9 && example_ok;
  report(6, "return oracle", pass,
         "max |fast - direct| = " + fmt(worst, 12) + "; R = [" + fmt(r[0], 4) + ", " +
             fmt(r[1], 4) + ", " + fmt(r[2], 4) +
             "] (R_0 matches its direct summation -1 + 0.95*(-1) + 0.9025*29)");
}

void criterion_7_gradient_check() {
  RandomStream rng(707);
  const int feature_len = 10;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    LinearQPolicy policy(AgentKind::Task, 4, feature_len);
    for (auto& row : policy.weights) {
      for (auto& w : row) w = rng.normal();
    }
    FeatureVector f;
    f.kind = AgentKind::Task;
    f.values.resize(feature_len);
    for (auto& x : f.values) x = rng.normal();
    const double R = 10.0 * rng.normal();
    const int action = static_cast<int>(rng.uniform_below(4));

    const double alpha = 1e-3;
    LinearQPolicy updated = policy;
    mc_update(updated, {{f, action}}, {R}, alpha, 1.0);

    const double h = 1e-5;
    for (int i = 0; i < feature_len; ++i) {
      LinearQPolicy plus = policy, minus = policy;
      plus.weights[action][i] += h;
      minus.weights[action][i] -= h;
      const double ep = 0.5 * std::pow(R - q_value(plus, f, action), 2);
      const double em = 0.5 * std::pow(R - q_value(minus, f, action), 2);
      const double numeric = (ep - em) / (2 * h);
      const double analytic = -(updated.weights[action][i] - policy.weights[action][i]) / alpha;
      const double rel = std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
      worst_rel = std::max(worst_rel, rel);
    }
  }
  report(7, "gradient check", worst_rel < 1e-6,
         "max relative error vs central differences = " + fmt(worst_rel, 10));
}

void criterion_8_error_calibration() {
  const Ontology ont = Ontology::restaurant_domain();
  RandomStream rng(808);
  ErrorConfig cfg;  // e = 0.2
  const DialogueAct act = make_act(ActFunction::Inform, {{"foodtype", "indian"}});
  const int n = 100000;
  int errors = 0;
  for (int i = 0; i < n; ++i) {
    if (!(corrupt(act, cfg, ont, rng).top().act == act)) ++errors;
  }
  const double freq = errors / static_cast<double>(n);
  report(8, "error-model calibration", std::abs(freq - 0.2) <= 0.005,
         "top-hypothesis error frequency = " + fmt(freq, 4) + " over 1e5 corruptions");
}

void criterion_9_belief_update() {
  BeliefState beliefs;
  NBestList first;
  first.hypotheses.push_back({make_act(ActFunction::Inform, {{"foodtype", "indian"}}), 0.8});
  beliefs = update_beliefs(beliefs, first);
  const double stored = beliefs.raw_score("foodtype", "indian");

  NBestList second;
  second.hypotheses.push_back({make_act(ActFunction::Inform, {{"foodtype", "indian"}}), 0.9});
  beliefs = update_beliefs(beliefs, second);
  const double multiplied = beliefs.raw_score("foodtype", "indian");

  bool sums_ok = true;
  RandomStream rng(909);
  const Ontology ont = Ontology::restaurant_domain();
  for (int i = 0; i < 500; ++i) {
    const auto& slot = ont.informable_slots[rng.uniform_below(4)];
    const auto& vals = ont.values.at(slot);
    NBestList nb;
    nb.hypotheses.push_back(
        {make_act(ActFunction::Inform, {{slot, vals[rng.uniform_below(vals.size())]}}),
         0.05 + 0.9 * rng.uniform01()});
    beliefs = update_beliefs(beliefs, nb);
    const auto dist = normalized_belief(beliefs, slot);
    double sum = dist.unknown;
    for (const auto& [v, p] : dist.values) sum += p;
    if (std::abs(sum - 1.0) > 1e-9) sums_ok = false;
  }

  const bool pass = std::abs(stored - 0.8) < 1e-12 && std::abs(multiplied - 0.72) < 1e-12 && sums_ok;
  report(9, "belief update", pass,
         "first evidence 0.8 -> " + fmt(stored, 4) + ", repeat x0.9 -> " + fmt(multiplied, 4) +
             ", normalized sums within 1e-9: " + (sums_ok ? "yes" : "no"));
}

void criterion_10_reproducibility(const std::string& cli, const fs::path& scratch) {
  const auto start = Clock::now();
  const std::string args = " train --variant multi-dim --seed 42 --runs 2 --dialogues 2000 --out ";
  const fs::path out1 = scratch / "rep1";
  const fs::path out2 = scratch / "rep2";
  const int rc1 = run_command(cli + args + out1.string() + " > /dev/null");
  const int rc2 = run_command(cli + args + out2.string() + " > /dev/null");
  const double secs = seconds_since(start);

  bool pass = rc1 == 0 && rc2 == 0;
  std::string detail;
  if (pass) {
    const std::string csv1 = read_file(out1 / "curve.csv");
    const std::string csv2 = read_file(out2 / "curve.csv");
    pass = !csv1.empty() && csv1 == csv2 && secs <= 30.0;
    detail = std::string("curve CSVs ") + (csv1 == csv2 ? "bitwise identical" : "differ") + ", " +
             fmt(secs, 1) + "s";
  } else {
    detail = "cli exited with status " + std::to_string(rc1) + "/" + std::to_string(rc2);
  }
  report(10, "reproducibility", pass, detail);
}

// --------------------------------------------------------------------------
// Training experiments (criteria 2-5)

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance_tests <path-to-mddial-cli>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path scratch = fs::path("acceptance_scratch");
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  const Ontology ont = Ontology::restaurant_domain();
  const Database db = generate_database(0, ont);

  criterion_1_combination_table(cli, scratch);
  criterion_6_return_oracle();
  criterion_7_gradient_check();
  criterion_8_error_calibration();
  criterion_9_belief_update();
  criterion_10_reproducibility(cli, scratch);

  // Shared experiments: one-dim, multi-dim and multi-dim-transfer, 10 paired
  // runs x 40k dialogues each, greedy snapshots every 5k dialogues.
  const std::uint64_t kSeed = 1;
  auto make_spec = [&](ExperimentVariant variant) {
    ExperimentSpec spec;
    spec.variant = variant;
    spec.training.seed = kSeed;
    return spec;
  };

  std::fprintf(stderr, "training one-dim (10 runs x 40k)...\n");
  auto t0 = Clock::now();
  const TrainResult one_dim = train(make_spec(ExperimentVariant::OneDim), ont, db);
  const double one_dim_secs = seconds_since(t0);
  std::fprintf(stderr, "  done in %.1fs\n", one_dim_secs);

  std::fprintf(stderr, "training multi-dim (10 runs x 40k)...\n");
  t0 = Clock::now();
  const TrainResult multi_dim = train(make_spec(ExperimentVariant::MultiDim), ont, db);
  std::fprintf(stderr, "  done in %.1fs\n", seconds_since(t0));

  // Source policies for the transfer settings: run 0's converged
  // domain-independent policies.
  const nlohmann::json source_af = save_policy(multi_dim.final_policies[0][1]);
  const nlohmann::json source_so = save_policy(multi_dim.final_policies[0][2]);
  const fs::path af_before = scratch / "source_autofeedback.json";
  const fs::path so_before = scratch / "source_socialoblman.json";
  std::ofstream(af_before) << source_af.dump(2) << "\n";
  std::ofstream(so_before) << source_so.dump(2) << "\n";

  std::fprintf(stderr, "training multi-dim-transfer (10 runs x 40k)...\n");
  t0 = Clock::now();
  ExperimentSpec transfer_spec = make_spec(ExperimentVariant::MultiDimTransfer);
  transfer_spec.source = SourcePolicies{source_af, source_so};
  const TrainResult transfer = train(transfer_spec, ont, db);
  std::fprintf(stderr, "  done in %.1fs\n", seconds_since(t0));

  // Criterion 2: one-dim convergence.
  {
    const CheckpointStats& final = point_at(one_dim.curve, 40000);
    const bool pass = final.mean_success >= 0.90 && final.mean_reward >= 15.0 &&
                      final.mean_length >= 8.0 && final.mean_length <= 14.0 &&
                      one_dim_secs <= 900.0;
    report(2, "one-dim convergence", pass,
           "success = " + fmt(final.mean_success) + ", reward = " + fmt(final.mean_reward) +
               ", length = " + fmt(final.mean_length) + ", " + fmt(one_dim_secs, 1) + "s");
  }

  // Criterion 3: multi-dim convergence.
  {
    const CheckpointStats& one_final = point_at(one_dim.curve, 40000);
    const CheckpointStats& multi_final = point_at(multi_dim.curve, 40000);
    const CheckpointStats& multi_25k = point_at(multi_dim.curve, 25000);
    const double gap = std::abs(one_final.mean_reward - multi_final.mean_reward);
    const bool pass = gap <= 3.0 && multi_25k.mean_reward >= 0.9 * multi_final.mean_reward;
    report(3, "multi-dim convergence", pass,
           "final gap = " + fmt(gap) + " (one-dim " + fmt(one_final.mean_reward) + ", multi-dim " +
               fmt(multi_final.mean_reward) + "); 25k/40k = " + fmt(multi_25k.mean_reward) + "/" +
               fmt(multi_final.mean_reward));
  }

  // Criterion 4: early-training ordering at the 5k checkpoint.
  {
    const CheckpointStats& one_5k = point_at(one_dim.curve, 5000);
    const CheckpointStats& multi_5k = point_at(multi_dim.curve, 5000);
    const CheckpointStats& transfer_5k = point_at(transfer.curve, 5000);

    const PairedDiff one_vs_multi = paired_diff(one_5k.run_rewards, multi_5k.run_rewards);
    const PairedDiff transfer_vs_multi = paired_diff(transfer_5k.run_rewards, multi_5k.run_rewards);
    const bool pass = one_vs_multi.mean > one_vs_multi.se &&
                      transfer_vs_multi.mean > transfer_vs_multi.se;
    report(4, "early-training ordering", pass,
           "5k rewards: one-dim " + fmt(one_5k.mean_reward) + ", multi-dim " +
               fmt(multi_5k.mean_reward) + ", transfer " + fmt(transfer_5k.mean_reward) +
               "; one-multi diff " + fmt(one_vs_multi.mean) + " (se " + fmt(one_vs_multi.se) +
               "), transfer-multi diff " + fmt(transfer_vs_multi.mean) + " (se " +
               fmt(transfer_vs_multi.se) + ")");
  }

  // Criterion 5: transfer-freeze contract, at the file level.
  {
    bool pass = true;
    for (std::size_t r = 0; r < transfer.final_policies.size() && pass; ++r) {
      const fs::path af_after = scratch / ("after_af_run" + std::to_string(r) + ".json");
      const fs::path so_after = scratch / ("after_so_run" + std::to_string(r) + ".json");
      std::ofstream(af_after) << save_policy(transfer.final_policies[r][1]).dump(2) << "\n";
      std::ofstream(so_after) << save_policy(transfer.final_policies[r][2]).dump(2) << "\n";
      pass = read_file(af_before) == read_file(af_after) &&
             read_file(so_before) == read_file(so_after);
    }
    report(5, "transfer-freeze contract", pass,
           std::string("frozen policy files ") +
               (pass ? "bitwise identical across 40k dialogues in all 10 runs" : "changed"));
  }

  int failures = 0;
  for (const auto& c : g_results) {
    if (!c.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(g_results.size()) - failures,
              g_results.size());
  return failures == 0 ? 0 : 1;
}
