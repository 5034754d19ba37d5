#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aba/content.hpp"
#include "aba/rng.hpp"
#include "aba/time.hpp"

namespace aba {

struct SessionConfig {
  int tokens_per_reward = 5;
  Seconds reward_duration_cap{75};
  Seconds idle_timeout{120};
  std::uint64_t rng_seed = 0;

  // Throws Error{invalid_config} when a bound is below 1.
  void validate() const;

  bool operator==(const SessionConfig&) const = default;
};

struct PendingFollowup {
  std::string classification_id;
  std::string missed_item_id;

  bool operator==(const PendingFollowup&) const = default;
};

struct TrialRecord {
  std::string item_id;
  Timestamp presented_at{0};
  Timestamp answered_at{0};
  std::size_t selected_index = 0;
  bool correct = false;
  bool is_followup = false;
  int tokens_after = 0;
  int cycle_index = 0;

  bool operator==(const TrialRecord&) const = default;
};

struct RewardEvent {
  int cycle_index = 0;
  Timestamp granted_at{0};
  Seconds duration_cap{0};
  int trials_in_cycle = 0;

  bool operator==(const RewardEvent&) const = default;
};

// Cue identifiers the UI maps to sound and dialog assets.
namespace cue {
inline constexpr std::string_view praise = "praise";
inline constexpr std::string_view somber = "somber";
}  // namespace cue

struct CorrectOutcome {
  int tokens_now = 0;
  std::string praise_cue{cue::praise};

  bool operator==(const CorrectOutcome&) const = default;
};

struct IncorrectOutcome {
  std::string correct_answer_text;
  std::string somber_cue{cue::somber};
  bool followup_scheduled = true;

  bool operator==(const IncorrectOutcome&) const = default;
};

struct RewardOutcome {
  RewardEvent reward_event;

  bool operator==(const RewardOutcome&) const = default;
};

using Outcome = std::variant<CorrectOutcome, IncorrectOutcome, RewardOutcome>;

struct Prompt {
  ContentItem item;
  int token_display = 0;
  bool is_followup = false;
  Timestamp presented_at{0};

  bool operator==(const Prompt&) const = default;
};

struct SessionMetrics {
  double engagement_hours = 0.0;
  std::optional<double> accuracy_rate_overall;
  std::vector<double> accuracy_rate_per_cycle;
  std::optional<double> generalization_rate;

  bool operator==(const SessionMetrics&) const = default;
};

/// ABA tutoring session for one anonymous learner.
///
/// The session alternates next_prompt / submit_answer. Correct answers earn
/// a token; reaching config.tokens_per_reward grants a reward and resets the
/// count to 0. An incorrect answer schedules a follow-up: every following
/// prompt comes from the missed item's classification (never the missed item
/// itself) until one of them is answered correctly.
///
/// Single writer: a Session may move between threads but must not be
/// mutated concurrently.
class Session {
 public:
  // Throws Error{invalid_config} for a bad config.
  Session(SessionConfig config, ValidatedPack pack, std::string session_id = {});

  // Issues the next prompt and marks it outstanding. presented_at must not
  // precede the last recorded activity.
  Prompt next_prompt(Timestamp presented_at);

  Outcome submit_answer(std::size_t selected_index, Timestamp answered_at);

  void record_heartbeat(Timestamp at);

  const std::string& id() const noexcept { return id_; }
  const SessionConfig& config() const noexcept { return config_; }
  const ValidatedPack& pack() const noexcept { return pack_; }
  int token_count() const noexcept { return token_count_; }
  int cycle_index() const noexcept { return cycle_index_; }
  const std::optional<PendingFollowup>& pending_followup() const noexcept { return pending_; }
  std::optional<Prompt> current_prompt() const;
  const std::vector<TrialRecord>& trials() const noexcept { return trials_; }
  const std::vector<RewardEvent>& reward_events() const noexcept { return rewards_; }
  const std::vector<Timestamp>& activity() const noexcept { return activity_; }

 private:
  struct Outstanding {
    std::size_t item_index;
    Timestamp presented_at;
    bool is_followup;
  };

  std::size_t choose_item();
  void require_not_before_last_activity(Timestamp at, std::string_view what) const;

  std::string id_;
  SessionConfig config_;
  ValidatedPack pack_;
  Rng rng_;
  int token_count_ = 0;
  int cycle_index_ = 0;
  int trials_in_cycle_ = 0;
  std::optional<PendingFollowup> pending_;
  std::optional<Outstanding> outstanding_;
  std::optional<std::size_t> previous_item_;
  std::vector<TrialRecord> trials_;
  std::vector<RewardEvent> rewards_;
  std::vector<Timestamp> activity_;
};

// Engagement sums consecutive activity gaps no longer than idle_timeout.
double engagement_hours(std::span<const Timestamp> activity, Seconds idle_timeout);

SessionMetrics compute_metrics(std::span<const TrialRecord> trials, std::span<const RewardEvent> rewards,
                               std::span<const Timestamp> activity, const SessionConfig& config);
SessionMetrics compute_metrics(const Session& session);

}  // namespace aba
