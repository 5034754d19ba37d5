#include "aba/gate.hpp"

#include <cstdio>

namespace aba {

std::string_view to_string(GateVerdict verdict) noexcept {
  switch (verdict) {
    case GateVerdict::pass: return "pass";
    case GateVerdict::wrong_answer: return "wrong-answer";
    case GateVerdict::expired: return "expired";
    case GateVerdict::reused: return "reused";
    case GateVerdict::unknown_challenge: return "unknown-challenge";
  }
  return "unknown-challenge";
}

GateChallenge GateKeeper::issue(Timestamp now) {
  std::lock_guard lock(mutex_);
  // Forget challenges long past expiry; late answers to them still fail.
  const auto horizon = now - std::chrono::duration_cast<Timestamp>(kGateChallengeLifetime);
  std::erase_if(challenges_, [&](const auto& kv) { return kv.second.challenge.expires_at <= horizon; });

  GateChallenge c;
  char buf[40];
  std::snprintf(buf, sizeof buf, "gc-%llu-%08llx", static_cast<unsigned long long>(++counter_),
                static_cast<unsigned long long>(rng_.next() & 0xffffffffULL));
  c.challenge_id = buf;
  c.operand_a = 2 + static_cast<int>(rng_.uniform_index(8));
  c.operand_b = 2 + static_cast<int>(rng_.uniform_index(8));
  c.expected = c.operand_a * c.operand_b;
  c.expires_at = now + std::chrono::duration_cast<Timestamp>(kGateChallengeLifetime);
  challenges_.emplace(c.challenge_id, Entry{c, false});
  return c;
}

GateVerdict GateKeeper::verify(std::string_view challenge_id, int answer, Timestamp now) {
  std::lock_guard lock(mutex_);
  auto it = challenges_.find(std::string(challenge_id));
  if (it == challenges_.end()) return GateVerdict::unknown_challenge;
  Entry& entry = it->second;
  if (entry.used) return GateVerdict::reused;
  entry.used = true;
  if (now >= entry.challenge.expires_at) return GateVerdict::expired;
  return answer == entry.challenge.expected ? GateVerdict::pass : GateVerdict::wrong_answer;
}

}  // namespace aba
