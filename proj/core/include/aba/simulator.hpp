#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aba/content.hpp"
#include "aba/engine.hpp"

namespace aba::sim {

/// Probabilistic stand-in for a student.
///
/// P(correct) = clamp(p0 + alpha * k + b, 0, 1), where k counts the learner's
/// earlier correct answers in the prompt's classification (across days) and
/// b = beta on a follow-up prompt whose classification the learner has
/// already missed and later answered correctly, else 0. After every trial
/// the learner quits the day's session with probability
/// fatigue / (1 + rewards earned so far, across days).
struct LearnerModel {
  double p0 = 0.5;
  double alpha = 0.05;
  double beta = 0.2;
  double fatigue = 0.005;
  std::uint64_t rng_seed = 42;

  void validate() const;
};

// Simulated time per answered prompt; reward viewing adds the reward cap.
inline constexpr Seconds kSecondsPerTrial{20};

struct TrialPlan {
  int days = 5;
  // Prompt time per day. Reward viewing extends the session beyond it.
  double session_minutes_per_day = 10.0;
  LearnerModel learner;
  int replications = 1;
  SessionConfig session;  // rng_seed is ignored; sessions are seeded per day
  unsigned threads = 1;
  // Keep each day's trial log in the results (memory heavy for big runs).
  bool keep_logs = false;

  // Throws Error{invalid_config} for a degenerate plan.
  void validate() const;
};

struct DayLog {
  SessionConfig config;
  std::vector<TrialRecord> trials;
  std::vector<RewardEvent> rewards;
  std::vector<Timestamp> activity;
};

struct DayResult {
  int replication = 0;  // 1-based
  int day = 0;          // 1-based
  SessionMetrics metrics;
  std::size_t answers = 0;
  std::size_t correct = 0;
  std::optional<DayLog> log;  // only with TrialPlan::keep_logs
};

struct TrialResults {
  // Ordered by (replication, day).
  std::vector<DayResult> rows;
};

// Runs plan.replications independent learners through plan.days sessions
// each. Deterministic for a given plan regardless of plan.threads.
TrialResults run_trial(const TrialPlan& plan, const ValidatedPack& pack);

// Mean across replications for one day. Absent rates are skipped; a mean
// over zero present values is absent.
struct DaySummary {
  int day = 0;
  double mean_engagement_hours = 0.0;
  std::optional<double> mean_accuracy_rate;
  std::optional<double> mean_generalization_rate;
  std::size_t answers = 0;
  std::size_t correct = 0;
};

std::vector<DaySummary> summarize_by_day(const TrialResults& results);

// CSV report: header day,replication,engagement_hours,accuracy_rate,
// generalization_rate. Rates use 4 fractional digits, hours 6; absent rates
// are empty fields. Throws Error{invalid_argument} on empty results.
std::string format_report(const TrialResults& results);

// Throws Error{io_error} when the destination cannot be written.
void export_report(const TrialResults& results, const std::filesystem::path& destination);

}  // namespace aba::sim
