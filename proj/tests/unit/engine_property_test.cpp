// Randomized and exhaustive checks of the session state machine against the
// independent reference model in tests/support/reference_tutor.hpp.

#include <gtest/gtest.h>

#include "aba/engine.hpp"
#include "drive.hpp"
#include "reference_tutor.hpp"
#include "test_packs.hpp"

namespace aba {
namespace {

using namespace std::chrono_literals;
using testing::ReferenceTutor;

std::vector<bool> random_script(Rng& rng, std::size_t length, double p_correct) {
  std::vector<bool> script(length);
  for (auto&& b : script) b = rng.bernoulli(p_correct);
  return script;
}

// Folds the reference model over a driven session and compares every
// observable after every step.
void expect_matches_reference(const Session& session, const std::vector<testing::DrivenStep>& steps) {
  const auto& cfg = session.config();
  ReferenceTutor ref(cfg.tokens_per_reward, std::chrono::duration_cast<Timestamp>(cfg.idle_timeout).count());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& st = steps[i];
    const TrialRecord& trial = session.trials()[i];
    ASSERT_TRUE(ref.presentation_allowed(st.prompt.item.item_id, st.prompt.item.classification_id)) << i;
    ASSERT_EQ(st.prompt.token_display, ref.tokens()) << i;
    const auto expected = ref.answer(st.prompt.item.item_id, st.prompt.item.classification_id, st.correct,
                                     trial.answered_at.count());
    ASSERT_EQ(trial.is_followup, expected.is_followup) << i;
    ASSERT_EQ(st.prompt.is_followup, expected.is_followup) << i;
    ASSERT_EQ(st.tokens_after, expected.tokens_after) << i;
    ASSERT_EQ(trial.tokens_after, expected.tokens_after) << i;
    ASSERT_EQ(std::holds_alternative<RewardOutcome>(st.outcome), expected.reward) << i;
  }
  ASSERT_EQ(session.pending_followup().has_value(), ref.followup_expected());
  ASSERT_EQ(session.reward_events().size(), ref.rewards());
  for (std::size_t k = 0; k < ref.rewards(); ++k) {
    ASSERT_EQ(session.reward_events()[k].trials_in_cycle, ref.cycle_lengths()[k]);
  }

  const SessionMetrics m = compute_metrics(session);
  ASSERT_EQ(m.engagement_hours, static_cast<double>(ref.engaged_ms()) / 3'600'000.0);
  const auto acc = ref.accuracy_overall();
  ASSERT_EQ(m.accuracy_rate_overall.has_value(), !acc.absent());
  if (m.accuracy_rate_overall) {
    ASSERT_TRUE(acc.matches_percent(*m.accuracy_rate_overall));
  }
  const auto gen = ref.generalization();
  ASSERT_EQ(m.generalization_rate.has_value(), !gen.absent());
  if (m.generalization_rate) {
    ASSERT_TRUE(gen.matches_percent(*m.generalization_rate));
  }
  ASSERT_EQ(m.accuracy_rate_per_cycle.size(), ref.rewards());
  for (std::size_t k = 0; k < ref.rewards(); ++k) {
    ASSERT_TRUE(ref.cycle_accuracy(k).matches_percent(m.accuracy_rate_per_cycle[k]));
  }
}

TEST(EnginePropertyTest, RandomScriptsMatchReference) {
  Rng rng(99);
  for (int run = 0; run < 2000; ++run) {
    ContentPack raw = testing::random_pack(rng, 2, 4);
    SessionConfig cfg;
    cfg.rng_seed = rng.next();
    cfg.tokens_per_reward = 1 + static_cast<int>(rng.uniform_index(6));
    Session s(cfg, ValidatedPack::validate(std::move(raw)));
    const auto script = random_script(rng, rng.uniform_index(40), 0.2 + 0.6 * rng.uniform01());
    const auto steps = testing::drive(s, script, 0ms, Timestamp{1000 + static_cast<long>(rng.uniform_index(200'000))});
    expect_matches_reference(s, steps);
  }
}

TEST(EnginePropertyTest, TokenWindowAndRewardConservation) {
  Rng rng(7);
  const auto pack = ValidatedPack::validate(testing::demo_pack());
  for (int run = 0; run < 1000; ++run) {
    SessionConfig cfg;
    cfg.rng_seed = rng.next();
    Session s(cfg, pack);
    const auto script = random_script(rng, 1 + rng.uniform_index(60), rng.uniform01());
    const auto steps = testing::drive(s, script);
    std::size_t correct = 0;
    bool reward_just_granted = false;
    for (const auto& st : steps) {
      if (reward_just_granted) {
        ASSERT_EQ(st.prompt.token_display, 0);
      }
      correct += st.correct ? 1 : 0;
      ASSERT_GE(st.tokens_after, 0);
      ASSERT_LT(st.tokens_after, cfg.tokens_per_reward);
      reward_just_granted = std::holds_alternative<RewardOutcome>(st.outcome);
    }
    ASSERT_EQ(s.reward_events().size(), correct / static_cast<std::size_t>(cfg.tokens_per_reward));
  }
}

TEST(EnginePropertyTest, IncorrectAnswersNeverChangeTokens) {
  Rng rng(8);
  const auto pack = ValidatedPack::validate(testing::demo_pack());
  for (int run = 0; run < 500; ++run) {
    SessionConfig cfg;
    cfg.rng_seed = rng.next();
    Session s(cfg, pack);
    const auto steps = testing::drive(s, random_script(rng, 30, 0.5));
    for (const auto& st : steps) {
      if (!st.correct) {
        ASSERT_EQ(st.tokens_after, st.prompt.token_display);
      }
    }
  }
}

TEST(EnginePropertyTest, DeterministicReplay) {
  Rng rng(10);
  const auto pack = ValidatedPack::validate(testing::demo_pack());
  for (int run = 0; run < 200; ++run) {
    SessionConfig cfg;
    cfg.rng_seed = rng.next();
    const auto script = random_script(rng, 50, 0.6);
    Session a(cfg, pack), b(cfg, pack);
    testing::drive(a, script);
    testing::drive(b, script);
    ASSERT_EQ(a.trials(), b.trials());
    ASSERT_EQ(a.reward_events(), b.reward_events());
    ASSERT_EQ(compute_metrics(a), compute_metrics(b));
  }
}

// Every answer sequence of length <= 12 on the 2x2 pack, under two reward
// sizes; the idle gap pattern puts some answers outside the idle window.
TEST(EnginePropertyTest, ExhaustiveShortSequencesMatchReference) {
  const auto pack = ValidatedPack::validate(testing::four_item_pack());
  for (int tokens : {2, 5}) {
    for (int length = 0; length <= 12; ++length) {
      for (std::uint32_t bits = 0; bits < (1u << length); ++bits) {
        std::vector<bool> script(static_cast<std::size_t>(length));
        for (int i = 0; i < length; ++i) script[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
        SessionConfig cfg;
        cfg.tokens_per_reward = tokens;
        cfg.rng_seed = bits * 31u + static_cast<std::uint32_t>(length);
        Session s(cfg, pack);
        const auto steps = testing::drive(s, script, 0ms, (bits % 3 == 0) ? Timestamp{150s} : Timestamp{25s});
        expect_matches_reference(s, steps);
      }
    }
  }
}

}  // namespace
}  // namespace aba
