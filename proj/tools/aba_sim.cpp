// aba-sim: simulated-learner trials through the tutoring engine.
//
//   aba-sim run --pack pack.json --days 5 --p0 0.5 --alpha 0.05 --beta 0.2 \
//               --fatigue 0.005 --replications 200 --seed 42 --out report.csv
//
// Exit codes: 0 success, 2 invalid pack or plan, 1 any other failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "aba/json_codec.hpp"
#include "aba/pack_io.hpp"
#include "aba/simulator.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;

void print_summary(const aba::sim::TrialResults& results) {
  std::printf("%-4s %12s %10s %10s\n", "day", "engage_h", "accuracy", "general");
  for (const auto& d : aba::sim::summarize_by_day(results)) {
    auto rate = [](const std::optional<double>& v) { return v ? *v : -1.0; };
    std::printf("%-4d %12.4f %10.2f %10.2f\n", d.day, d.mean_engagement_hours, rate(d.mean_accuracy_rate),
                rate(d.mean_generalization_rate));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated-learner trials for the ABA tutoring engine"};
  app.require_subcommand(1);

  std::string pack_path;
  std::string out_path;
  aba::sim::TrialPlan plan;
  bool quiet = false;
  plan.threads = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "Run a multi-day trial and write a CSV report");
  run->add_option("--pack", pack_path, "Content pack JSON")->required();
  run->add_option("--days", plan.days, "Days per replication")->capture_default_str();
  run->add_option("--minutes", plan.session_minutes_per_day, "Prompt minutes per day")->capture_default_str();
  run->add_option("--p0", plan.learner.p0, "Baseline correct-answer probability")->capture_default_str();
  run->add_option("--alpha", plan.learner.alpha, "Learning increment per correct exposure")->capture_default_str();
  run->add_option("--beta", plan.learner.beta, "Generalization boost on follow-ups")->capture_default_str();
  run->add_option("--fatigue", plan.learner.fatigue, "Per-trial quit probability before any reward")->capture_default_str();
  run->add_option("--replications", plan.replications, "Independent learners")->capture_default_str();
  run->add_option("--seed", plan.learner.rng_seed, "Master seed")->capture_default_str();
  run->add_option("--tokens-per-reward", plan.session.tokens_per_reward, "Tokens per reward")->capture_default_str();
  run->add_option("--threads", plan.threads, "Worker threads (results do not depend on it)");
  run->add_option("--out", out_path, "CSV destination")->required();
  run->add_flag("-q,--quiet", quiet, "Do not print the per-day summary");

  CLI11_PARSE(app, argc, argv);

  aba::ContentPack pack;
  try {
    pack = aba::load_pack(pack_path);
  } catch (const aba::Error& e) {
    std::cerr << "aba-sim: " << e.what() << '\n';
    return e.code() == aba::Errc::io_error ? kExitFailure : kExitValidation;
  }

  try {
    const auto validated = aba::ValidatedPack::validate(std::move(pack));
    plan.validate();
    const auto results = aba::sim::run_trial(plan, validated);
    aba::sim::export_report(results, out_path);
    if (!quiet) print_summary(results);
  } catch (const aba::ValidationError& e) {
    std::cerr << "aba-sim: " << e.what() << '\n';
    for (const auto& v : e.report()) std::cerr << "  " << v.rule << " [" << v.subject_id << "] " << v.detail << '\n';
    return kExitValidation;
  } catch (const aba::Error& e) {
    std::cerr << "aba-sim: " << e.what() << '\n';
    const bool validation = e.code() == aba::Errc::invalid_config || e.code() == aba::Errc::pack_empty;
    return validation ? kExitValidation : kExitFailure;
  }
  return 0;
}
