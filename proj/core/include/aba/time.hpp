#pragma once

#include <chrono>

namespace aba {

// Caller-supplied monotonic instant, in milliseconds from an arbitrary
// origin. The engine never reads a clock itself.
using Timestamp = std::chrono::milliseconds;
using Seconds = std::chrono::seconds;

inline constexpr double to_hours(std::chrono::milliseconds d) {
  return static_cast<double>(d.count()) / 3'600'000.0;
}

}  // namespace aba
