#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "aba/rng.hpp"
#include "aba/time.hpp"

namespace aba {

// Teacher gate: a single-digit multiplication an adult answers at a glance.
struct GateChallenge {
  std::string challenge_id;
  int operand_a = 0;  // [2, 9]
  int operand_b = 0;  // [2, 9]
  int expected = 0;   // operand_a * operand_b
  Timestamp expires_at{0};
};

enum class GateVerdict { pass, wrong_answer, expired, reused, unknown_challenge };

std::string_view to_string(GateVerdict verdict) noexcept;

inline constexpr std::chrono::minutes kGateChallengeLifetime{5};

// Issues challenges and enforces single use. Retries are unlimited; each
// attempt, right or wrong, consumes its challenge. Thread-safe.
class GateKeeper {
 public:
  explicit GateKeeper(std::uint64_t seed) : rng_(seed) {}

  GateChallenge issue(Timestamp now);
  GateVerdict verify(std::string_view challenge_id, int answer, Timestamp now);

 private:
  struct Entry {
    GateChallenge challenge;
    bool used = false;
  };

  std::mutex mutex_;
  Rng rng_;
  std::uint64_t counter_ = 0;
  std::unordered_map<std::string, Entry> challenges_;
};

}  // namespace aba
