#include "aba/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <thread>

namespace aba::sim {

namespace {

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

constexpr std::uint64_t kSessionStream = 0x5e55'0000;

// Cross-day memory of one simulated learner.
struct LearnerState {
  std::map<std::string, int, std::less<>> correct_exposures;
  std::set<std::string, std::less<>> missed;
  std::set<std::string, std::less<>> recovered;  // missed, then answered correctly
  int rewards_earned = 0;
};

// Quit hazard after a trial. Each reward earned so far divides it: a learner
// who has seen the reward keeps working toward the next one.
double quit_probability(const LearnerModel& model, const LearnerState& state) {
  return model.fatigue / (1.0 + static_cast<double>(state.rewards_earned));
}

double answer_probability(const LearnerModel& model, const LearnerState& state, const Prompt& prompt) {
  const auto& cls = prompt.item.classification_id;
  double p = model.p0;
  if (auto it = state.correct_exposures.find(cls); it != state.correct_exposures.end()) {
    p += model.alpha * it->second;
  }
  if (prompt.is_followup && state.recovered.contains(cls)) p += model.beta;
  return std::clamp(p, 0.0, 1.0);
}

std::size_t pick_choice(const ContentItem& item, bool correct, Rng& rng) {
  if (correct) return item.correct_index;
  std::size_t wrong = rng.uniform_index(item.choices.size() - 1);
  if (wrong >= item.correct_index) ++wrong;
  return wrong;
}

DayResult run_day(const TrialPlan& plan, const ValidatedPack& pack, LearnerState& learner, Rng& rng,
                  std::uint64_t replication_seed, int replication, int day) {
  SessionConfig config = plan.session;
  config.rng_seed = mix_seed(replication_seed, kSessionStream + static_cast<std::uint64_t>(day));
  Session session(config, pack);

  const Timestamp budget = std::chrono::duration_cast<Timestamp>(
      std::chrono::duration<double>(plan.session_minutes_per_day * 60.0));
  const Timestamp per_trial = std::chrono::duration_cast<Timestamp>(kSecondsPerTrial);
  const Timestamp reward_time = std::chrono::duration_cast<Timestamp>(config.reward_duration_cap);

  Timestamp now = std::chrono::duration_cast<Timestamp>(std::chrono::hours(24) * (day - 1));
  Timestamp prompt_time{0};
  session.record_heartbeat(now);

  while (prompt_time + per_trial <= budget) {
    const Prompt prompt = session.next_prompt(now);
    const std::string& cls = prompt.item.classification_id;
    const bool correct = rng.bernoulli(answer_probability(plan.learner, learner, prompt));
    const std::size_t choice = pick_choice(prompt.item, correct, rng);

    now += per_trial;
    prompt_time += per_trial;
    const Outcome outcome = session.submit_answer(choice, now);

    if (correct) {
      ++learner.correct_exposures[cls];
      if (learner.missed.contains(cls)) learner.recovered.insert(cls);
    } else {
      learner.missed.insert(cls);
    }

    if (std::holds_alternative<RewardOutcome>(outcome)) {
      ++learner.rewards_earned;
      now += reward_time;
      session.record_heartbeat(now);
    }
    if (rng.bernoulli(quit_probability(plan.learner, learner))) break;
  }

  DayResult result;
  result.replication = replication;
  result.day = day;
  result.metrics = compute_metrics(session);
  result.answers = session.trials().size();
  result.correct = static_cast<std::size_t>(std::count_if(
      session.trials().begin(), session.trials().end(), [](const TrialRecord& t) { return t.correct; }));
  if (plan.keep_logs) {
    result.log = DayLog{session.config(), session.trials(), session.reward_events(), session.activity()};
  }
  return result;
}

std::vector<DayResult> run_replication(const TrialPlan& plan, const ValidatedPack& pack, int replication) {
  const std::uint64_t seed = mix_seed(plan.learner.rng_seed, static_cast<std::uint64_t>(replication));
  Rng rng(seed);
  LearnerState learner;
  std::vector<DayResult> days;
  days.reserve(static_cast<std::size_t>(plan.days));
  for (int day = 1; day <= plan.days; ++day) {
    days.push_back(run_day(plan, pack, learner, rng, seed, replication, day));
  }
  return days;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

void LearnerModel::validate() const {
  if (!in_unit_interval(p0)) throw Error(Errc::invalid_config, "p0 must lie in [0, 1]");
  if (!std::isfinite(alpha) || alpha < 0.0) throw Error(Errc::invalid_config, "alpha must be >= 0");
  if (!in_unit_interval(beta)) throw Error(Errc::invalid_config, "beta must lie in [0, 1]");
  if (!in_unit_interval(fatigue)) throw Error(Errc::invalid_config, "fatigue must lie in [0, 1]");
}

void TrialPlan::validate() const {
  if (days < 1) throw Error(Errc::invalid_config, "days must be >= 1");
  if (replications < 1) throw Error(Errc::invalid_config, "replications must be >= 1");
  if (!std::isfinite(session_minutes_per_day) || session_minutes_per_day <= 0.0) {
    throw Error(Errc::invalid_config, "session_minutes_per_day must be > 0");
  }
  learner.validate();
  session.validate();
}

TrialResults run_trial(const TrialPlan& plan, const ValidatedPack& pack) {
  plan.validate();

  std::vector<std::vector<DayResult>> per_replication(static_cast<std::size_t>(plan.replications));
  const unsigned workers = std::clamp<unsigned>(plan.threads, 1, static_cast<unsigned>(plan.replications));
  if (workers == 1) {
    for (int r = 0; r < plan.replications; ++r) per_replication[r] = run_replication(plan, pack, r + 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = static_cast<int>(w); r < plan.replications; r += static_cast<int>(workers)) {
          per_replication[r] = run_replication(plan, pack, r + 1);
        }
      });
    }
  }

  TrialResults results;
  results.rows.reserve(static_cast<std::size_t>(plan.replications) * static_cast<std::size_t>(plan.days));
  for (auto& days : per_replication) {
    for (auto& d : days) results.rows.push_back(std::move(d));
  }
  return results;
}

std::vector<DaySummary> summarize_by_day(const TrialResults& results) {
  struct Acc {
    double engagement = 0.0;
    std::size_t rows = 0;
    double accuracy = 0.0;
    std::size_t accuracy_n = 0;
    double generalization = 0.0;
    std::size_t generalization_n = 0;
    std::size_t answers = 0;
    std::size_t correct = 0;
  };
  std::map<int, Acc> by_day;
  for (const auto& row : results.rows) {
    Acc& a = by_day[row.day];
    a.engagement += row.metrics.engagement_hours;
    ++a.rows;
    if (row.metrics.accuracy_rate_overall) {
      a.accuracy += *row.metrics.accuracy_rate_overall;
      ++a.accuracy_n;
    }
    if (row.metrics.generalization_rate) {
      a.generalization += *row.metrics.generalization_rate;
      ++a.generalization_n;
    }
    a.answers += row.answers;
    a.correct += row.correct;
  }

  std::vector<DaySummary> out;
  for (const auto& [day, a] : by_day) {
    DaySummary s;
    s.day = day;
    s.mean_engagement_hours = a.engagement / static_cast<double>(a.rows);
    if (a.accuracy_n > 0) s.mean_accuracy_rate = a.accuracy / static_cast<double>(a.accuracy_n);
    if (a.generalization_n > 0) s.mean_generalization_rate = a.generalization / static_cast<double>(a.generalization_n);
    s.answers = a.answers;
    s.correct = a.correct;
    out.push_back(s);
  }
  return out;
}

std::string format_report(const TrialResults& results) {
  if (results.rows.empty()) throw Error(Errc::invalid_argument, "no results to export");
  std::string out = "day,replication,engagement_hours,accuracy_rate,generalization_rate\n";
  for (const auto& row : results.rows) {
    out += std::to_string(row.day);
    out += ',';
    out += std::to_string(row.replication);
    out += ',';
    out += format_fixed(row.metrics.engagement_hours, 6);
    out += ',';
    if (row.metrics.accuracy_rate_overall) out += format_fixed(*row.metrics.accuracy_rate_overall, 4);
    out += ',';
    if (row.metrics.generalization_rate) out += format_fixed(*row.metrics.generalization_rate, 4);
    out += '\n';
  }
  return out;
}

void export_report(const TrialResults& results, const std::filesystem::path& destination) {
  const std::string text = format_report(results);
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write '" + destination.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::io_error, "write failed for '" + destination.string() + "'");
}

}  // namespace aba::sim
