#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "aba/content.hpp"
#include "aba/engine.hpp"

namespace httplib {
class Server;
}

namespace aba::api {

// Header names of the protocol.
inline constexpr const char* kGateTokenHeader = "X-Gate-Token";
inline constexpr const char* kTestClockHeader = "X-Test-Clock";

inline constexpr std::chrono::minutes kGateTokenLifetime{30};

struct ServiceOptions {
  // When set, every content mutation is written back to this file.
  std::optional<std::filesystem::path> pack_path;
  std::filesystem::path media_root = ".";
  // Accept X-Test-Clock (integer milliseconds) in place of the server clock.
  bool test_clock = false;
  // Defaults for new sessions; rng_seed is replaced per session.
  SessionConfig session_defaults;
  // Seeds gate challenges. Gate tokens always come from std::random_device.
  std::optional<std::uint64_t> gate_seed;
};

/// JSON-over-HTTP front end for teacher and student workflows.
///
/// Routes:
///   POST   /gate                       new math challenge
///   POST   /gate/verify                {challenge_id, answer} -> gate token
///   GET    /content                    whole pack
///   GET    /content/validation         validation report
///   GET    /content/items[/{id}]
///   POST   /content/items              (gate token)
///   PUT    /content/items/{id}         (gate token)
///   DELETE /content/items/{id}         (gate token)
///   GET    /content/classifications
///   POST   /content/classifications    (gate token)
///   DELETE /content/classifications/{id} (gate token)
///   POST   /sessions                   {seed?} -> session_id
///   GET    /sessions/{id}              full session log
///   GET    /sessions/{id}/prompt       outstanding prompt, issuing one if needed
///   POST   /sessions/{id}/answer       {selected_index}
///   POST   /sessions/{id}/heartbeat
///   GET    /sessions/{id}/metrics
///   GET    /media/{ref}
///
/// Errors are {"code", "message"} bodies; codes are listed in README.md.
class TutorService {
 public:
  TutorService(ContentPack pack, ServiceOptions options);
  ~TutorService();

  TutorService(const TutorService&) = delete;
  TutorService& operator=(const TutorService&) = delete;

  // Registers all routes on `server`. The service must outlive it.
  void mount(httplib::Server& server);

  ContentPack pack_snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aba::api
