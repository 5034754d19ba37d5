#include "aba/engine.hpp"

#include <algorithm>
#include <cstdio>

namespace aba {

void SessionConfig::validate() const {
  if (tokens_per_reward < 1) throw Error(Errc::invalid_config, "tokens_per_reward must be >= 1");
  if (reward_duration_cap < Seconds{1}) throw Error(Errc::invalid_config, "reward_duration_cap_s must be >= 1");
  if (idle_timeout < Seconds{1}) throw Error(Errc::invalid_config, "idle_timeout_s must be >= 1");
}

namespace {

std::string default_session_id(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "session-%016llx", static_cast<unsigned long long>(mix_seed(seed, 0x5e55)));
  return buf;
}

}  // namespace

Session::Session(SessionConfig config, ValidatedPack pack, std::string session_id)
    : id_(session_id.empty() ? default_session_id(config.rng_seed) : std::move(session_id)),
      config_(config),
      pack_(std::move(pack)),
      rng_(config.rng_seed) {
  config_.validate();
}

void Session::require_not_before_last_activity(Timestamp at, std::string_view what) const {
  if (!activity_.empty() && at < activity_.back()) {
    throw Error(Errc::non_monotonic_timestamp,
                std::string(what) + " at " + std::to_string(at.count()) + " ms precedes last activity at " +
                    std::to_string(activity_.back().count()) + " ms");
  }
}

std::size_t Session::choose_item() {
  if (pending_) {
    std::vector<std::size_t> eligible;
    for (std::size_t idx : pack_.members(pending_->classification_id)) {
      if (pack_.items()[idx].item_id != pending_->missed_item_id) eligible.push_back(idx);
    }
    // Validation guarantees >= 2 items per classification.
    return eligible[rng_.uniform_index(eligible.size())];
  }

  const std::size_t n = pack_.size();
  if (n == 1 || !previous_item_) return rng_.uniform_index(n);
  // Uniform over the n-1 items other than the previous one.
  std::size_t pick = rng_.uniform_index(n - 1);
  if (pick >= *previous_item_) ++pick;
  return pick;
}

Prompt Session::next_prompt(Timestamp presented_at) {
  if (outstanding_) throw Error(Errc::prompt_outstanding, "a prompt is already outstanding");
  require_not_before_last_activity(presented_at, "prompt");

  const std::size_t idx = choose_item();
  outstanding_ = Outstanding{idx, presented_at, pending_.has_value()};
  previous_item_ = idx;
  return *current_prompt();
}

std::optional<Prompt> Session::current_prompt() const {
  if (!outstanding_) return std::nullopt;
  return Prompt{pack_.items()[outstanding_->item_index], token_count_, outstanding_->is_followup,
                outstanding_->presented_at};
}

Outcome Session::submit_answer(std::size_t selected_index, Timestamp answered_at) {
  if (!outstanding_) throw Error(Errc::no_outstanding_prompt, "no prompt is outstanding");
  const ContentItem& item = pack_.items()[outstanding_->item_index];
  if (selected_index >= item.choices.size()) {
    throw Error(Errc::choice_out_of_range, "selected_index " + std::to_string(selected_index) +
                                               " is outside " + std::to_string(item.choices.size()) +
                                               " choice(s)");
  }
  if (answered_at < outstanding_->presented_at) {
    throw Error(Errc::non_monotonic_timestamp, "answer precedes its prompt");
  }
  require_not_before_last_activity(answered_at, "answer");

  const bool correct = selected_index == item.correct_index;
  TrialRecord trial;
  trial.item_id = item.item_id;
  trial.presented_at = outstanding_->presented_at;
  trial.answered_at = answered_at;
  trial.selected_index = selected_index;
  trial.correct = correct;
  trial.is_followup = outstanding_->is_followup;
  trial.cycle_index = cycle_index_;
  outstanding_.reset();
  activity_.push_back(answered_at);
  ++trials_in_cycle_;

  if (!correct) {
    pending_ = PendingFollowup{item.classification_id, item.item_id};
    trial.tokens_after = token_count_;
    trials_.push_back(std::move(trial));
    return IncorrectOutcome{item.correct_answer(), std::string(cue::somber), true};
  }

  if (pending_ && pending_->classification_id == item.classification_id) pending_.reset();
  ++token_count_;
  if (token_count_ < config_.tokens_per_reward) {
    trial.tokens_after = token_count_;
    trials_.push_back(std::move(trial));
    return CorrectOutcome{token_count_, std::string(cue::praise)};
  }

  RewardEvent reward{cycle_index_, answered_at, config_.reward_duration_cap, trials_in_cycle_};
  rewards_.push_back(reward);
  token_count_ = 0;
  trials_in_cycle_ = 0;
  ++cycle_index_;
  trial.tokens_after = 0;
  trials_.push_back(std::move(trial));
  return RewardOutcome{reward};
}

void Session::record_heartbeat(Timestamp at) {
  require_not_before_last_activity(at, "heartbeat");
  activity_.push_back(at);
}

double engagement_hours(std::span<const Timestamp> activity, Seconds idle_timeout) {
  Timestamp total{0};
  for (std::size_t i = 1; i < activity.size(); ++i) {
    const Timestamp gap = activity[i] - activity[i - 1];
    if (gap <= idle_timeout) total += gap;
  }
  return to_hours(total);
}

SessionMetrics compute_metrics(std::span<const TrialRecord> trials, std::span<const RewardEvent> rewards,
                               std::span<const Timestamp> activity, const SessionConfig& config) {
  SessionMetrics m;
  m.engagement_hours = engagement_hours(activity, config.idle_timeout);

  std::size_t correct = 0;
  std::size_t followups = 0;
  std::size_t followups_correct = 0;
  for (const auto& t : trials) {
    correct += t.correct ? 1 : 0;
    if (t.is_followup) {
      ++followups;
      followups_correct += t.correct ? 1 : 0;
    }
  }
  if (!trials.empty()) {
    m.accuracy_rate_overall = 100.0 * static_cast<double>(correct) / static_cast<double>(trials.size());
  }
  if (followups > 0) {
    m.generalization_rate = 100.0 * static_cast<double>(followups_correct) / static_cast<double>(followups);
  }
  m.accuracy_rate_per_cycle.reserve(rewards.size());
  for (const auto& r : rewards) {
    m.accuracy_rate_per_cycle.push_back(100.0 * static_cast<double>(config.tokens_per_reward) /
                                        static_cast<double>(r.trials_in_cycle));
  }
  return m;
}

SessionMetrics compute_metrics(const Session& session) {
  return compute_metrics(session.trials(), session.reward_events(), session.activity(), session.config());
}

}  // namespace aba
