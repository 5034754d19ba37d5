#include "aba/service.hpp"

#include <httplib.h>

#include <fstream>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "aba/gate.hpp"
#include "aba/json_codec.hpp"
#include "aba/pack_io.hpp"

namespace aba::api {

namespace {

using codec::Json;

int http_status(Errc code) {
  switch (code) {
    case Errc::item_not_found:
    case Errc::classification_not_found:
      return 404;
    case Errc::duplicate_item:
    case Errc::duplicate_classification:
    case Errc::classification_in_use:
    case Errc::prompt_outstanding:
    case Errc::no_outstanding_prompt:
    case Errc::version_mismatch:
      return 409;
    case Errc::pack_empty:
    case Errc::pack_invalid:
      return 422;
    case Errc::io_error:
      return 500;
    default:
      return 400;
  }
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message,
                Json extra = Json::object()) {
  Json body;
  body["code"] = code;
  body["message"] = message;
  for (auto& [key, value] : extra.items()) body[key] = value;
  send_json(res, status, body);
}

void send_error(httplib::Response& res, const Error& e) {
  Json extra = Json::object();
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) extra["violations"] = codec::encode(v->report());
  send_error(res, http_status(e.code()), to_string(e.code()), e.what(), std::move(extra));
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  return codec::parse(req.body);
}

std::string random_token() {
  std::random_device device;
  std::uniform_int_distribution<std::uint32_t> dist;
  static constexpr char hex[] = "0123456789abcdef";
  std::string token;
  // 4 x 32 bits = 128 bits of entropy.
  for (int word = 0; word < 4; ++word) {
    std::uint32_t bits = dist(device);
    for (int nibble = 0; nibble < 8; ++nibble) {
      token.push_back(hex[bits & 0xf]);
      bits >>= 4;
    }
  }
  return token;
}

std::string content_type_for(const std::filesystem::path& path) {
  static const std::unordered_map<std::string, std::string> types = {
      {".png", "image/png"},   {".jpg", "image/jpeg"},     {".jpeg", "image/jpeg"}, {".gif", "image/gif"},
      {".webp", "image/webp"}, {".svg", "image/svg+xml"},  {".mp4", "video/mp4"},   {".webm", "video/webm"},
      {".mp3", "audio/mpeg"},  {".wav", "audio/wav"},      {".ogg", "audio/ogg"},   {".json", "application/json"},
      {".txt", "text/plain"},
  };
  std::string ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  auto it = types.find(ext);
  return it == types.end() ? "application/octet-stream" : it->second;
}

// A media ref must be a relative path without "..", "." or empty segments.
bool is_safe_media_ref(std::string_view ref) {
  if (ref.empty() || ref.front() == '/' || ref.find('\\') != std::string_view::npos ||
      ref.find('\0') != std::string_view::npos) {
    return false;
  }
  std::size_t start = 0;
  while (start <= ref.size()) {
    const std::size_t end = std::min(ref.find('/', start), ref.size());
    const std::string_view segment = ref.substr(start, end - start);
    if (segment.empty() || segment == "." || segment == "..") return false;
    start = end + 1;
  }
  return true;
}

struct SessionSlot {
  explicit SessionSlot(Session s) : session(std::move(s)) {}
  std::mutex mutex;
  Session session;
};

Json session_config_json(const SessionConfig& c) {
  Json j;
  j["tokens_per_reward"] = c.tokens_per_reward;
  j["reward_duration_cap_s"] = c.reward_duration_cap.count();
  j["idle_timeout_s"] = c.idle_timeout.count();
  j["rng_seed"] = c.rng_seed;
  return j;
}

}  // namespace

struct TutorService::Impl {
  Impl(ContentPack initial, ServiceOptions opts)
      : options(std::move(opts)),
        pack(std::move(initial)),
        gate(options.gate_seed ? *options.gate_seed : std::random_device{}()),
        started(std::chrono::steady_clock::now()) {
    options.session_defaults.validate();
  }

  ServiceOptions options;

  mutable std::shared_mutex content_mutex;
  ContentPack pack;

  GateKeeper gate;
  std::mutex tokens_mutex;
  std::unordered_map<std::string, Timestamp> tokens;  // token -> expires_at

  std::mutex sessions_mutex;
  std::uint64_t session_counter = 0;
  std::unordered_map<std::string, std::shared_ptr<SessionSlot>> sessions;

  std::chrono::steady_clock::time_point started;

  Timestamp now(const httplib::Request& req) const {
    if (options.test_clock && req.has_header(kTestClockHeader)) {
      const std::string value = req.get_header_value(kTestClockHeader);
      try {
        std::size_t used = 0;
        const long long ms = std::stoll(value, &used);
        if (used == value.size()) return Timestamp{ms};
      } catch (const std::exception&) {
      }
      throw Error(Errc::invalid_argument, std::string(kTestClockHeader) + " must be integer milliseconds");
    }
    return std::chrono::duration_cast<Timestamp>(std::chrono::steady_clock::now() - started);
  }

  // Returns false (and fills res) unless the request carries a live token.
  bool authorize(const httplib::Request& req, httplib::Response& res) {
    if (!req.has_header(kGateTokenHeader)) {
      send_error(res, 401, "gate-token-required", "content changes require a gate token");
      return false;
    }
    const std::string token = req.get_header_value(kGateTokenHeader);
    const Timestamp at = now(req);
    std::lock_guard lock(tokens_mutex);
    auto it = tokens.find(token);
    if (it == tokens.end() || at >= it->second) {
      if (it != tokens.end()) tokens.erase(it);
      send_error(res, 401, "gate-token-invalid", "gate token is unknown or expired");
      return false;
    }
    return true;
  }

  // Applies a pack mutation, persisting before it becomes visible.
  template <typename Mutation>
  ContentPack mutate(Mutation&& mutation) {
    std::unique_lock lock(content_mutex);
    ContentPack updated = mutation(pack);
    if (options.pack_path) save_pack(updated, *options.pack_path);
    pack = updated;
    return updated;
  }

  std::shared_ptr<SessionSlot> find_session(const std::string& id) {
    std::lock_guard lock(sessions_mutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  // Runs `fn` with the session locked, or answers 404.
  template <typename Fn>
  void with_session(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
    auto slot = find_session(req.matches[1]);
    if (!slot) {
      send_error(res, 404, "session-not-found", "no session '" + std::string(req.matches[1]) + "'");
      return;
    }
    std::lock_guard lock(slot->mutex);
    fn(slot->session);
  }
};

TutorService::TutorService(ContentPack pack, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(pack), std::move(options))) {}

TutorService::~TutorService() = default;

ContentPack TutorService::pack_snapshot() const {
  std::shared_lock lock(impl_->content_mutex);
  return impl_->pack;
}

void TutorService::mount(httplib::Server& server) {
  Impl& s = *impl_;

  // Wraps a handler so aba::Error becomes a structured error response.
  auto guarded = [](auto handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      }
    };
  };

  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, "internal", message);
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty() && res.status == 404) send_error(res, 404, "route-not-found", "no such route");
  });

  // ---- teacher gate ----

  server.Post("/gate", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, codec::encode(s.gate.issue(s.now(req))));
  }));

  server.Post("/gate/verify", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.is_object() || !body.contains("challenge_id") || !body["challenge_id"].is_string() ||
        !body.contains("answer") || !body["answer"].is_number_integer()) {
      send_error(res, 400, "parse-error", "expected {challenge_id: string, answer: integer}");
      return;
    }
    const Timestamp at = s.now(req);
    const GateVerdict verdict =
        s.gate.verify(body["challenge_id"].get<std::string>(), body["answer"].get<int>(), at);
    if (verdict != GateVerdict::pass) {
      send_error(res, 403, "gate-" + std::string(to_string(verdict)), "gate challenge failed",
                 Json{{"reason", to_string(verdict)}});
      return;
    }
    const std::string token = random_token();
    const Timestamp expires = at + std::chrono::duration_cast<Timestamp>(kGateTokenLifetime);
    {
      std::lock_guard lock(s.tokens_mutex);
      std::erase_if(s.tokens, [&](const auto& kv) { return kv.second <= at; });
      s.tokens[token] = expires;
    }
    Json out;
    out["token"] = token;
    out["issued_at"] = at.count();
    out["expires_at"] = expires.count();
    send_json(res, 200, out);
  }));

  // ---- content ----

  server.Get("/content", guarded([&s](const httplib::Request&, httplib::Response& res) {
    std::shared_lock lock(s.content_mutex);
    send_json(res, 200, codec::encode(s.pack));
  }));

  server.Get("/content/validation", guarded([&s](const httplib::Request&, httplib::Response& res) {
    std::shared_lock lock(s.content_mutex);
    const ValidationReport report = validate_pack(s.pack);
    Json out;
    out["version"] = s.pack.version;
    out["valid"] = report.empty();
    out["violations"] = codec::encode(report);
    send_json(res, 200, out);
  }));

  server.Get("/content/items", guarded([&s](const httplib::Request&, httplib::Response& res) {
    std::shared_lock lock(s.content_mutex);
    Json out = Json::array();
    for (const auto& item : s.pack.items) out.push_back(codec::encode(item));
    send_json(res, 200, out);
  }));

  server.Get(R"(/content/items/([^/]+))", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    std::shared_lock lock(s.content_mutex);
    const ContentItem* item = s.pack.find_item(req.matches[1].str());
    if (item == nullptr) throw Error(Errc::item_not_found, "item '" + req.matches[1].str() + "' does not exist");
    send_json(res, 200, codec::encode(*item));
  }));

  server.Post("/content/items", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    if (!s.authorize(req, res)) return;
    ContentItem item = codec::decode_item(parse_body(req));
    const std::string id = item.item_id;
    const ContentPack updated = s.mutate([&](const ContentPack& p) { return add_item(p, std::move(item)); });
    send_json(res, 201, codec::encode(*updated.find_item(id)));
  }));

  server.Put(R"(/content/items/([^/]+))", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    if (!s.authorize(req, res)) return;
    const std::string id = req.matches[1];
    const Json body = parse_body(req);
    const ItemPatch patch = codec::decode_item_patch(body);
    if (body.contains("item_id") && body["item_id"] != id) {
      throw Error(Errc::invalid_argument, "item_id in body does not match the URL");
    }
    const ContentPack updated = s.mutate([&](const ContentPack& p) { return edit_item(p, id, patch); });
    send_json(res, 200, codec::encode(*updated.find_item(id)));
  }));

  server.Delete(R"(/content/items/([^/]+))", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    if (!s.authorize(req, res)) return;
    const std::string id = req.matches[1];
    s.mutate([&](const ContentPack& p) { return remove_item(p, id); });
    res.status = 204;
  }));

  server.Get("/content/classifications", guarded([&s](const httplib::Request&, httplib::Response& res) {
    std::shared_lock lock(s.content_mutex);
    Json out = Json::array();
    for (const auto& c : s.pack.classifications) out.push_back(codec::encode(c));
    send_json(res, 200, out);
  }));

  server.Post("/content/classifications", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    if (!s.authorize(req, res)) return;
    Classification c = codec::decode_classification(parse_body(req));
    const Json out = codec::encode(c);
    s.mutate([&](const ContentPack& p) { return add_classification(p, std::move(c)); });
    send_json(res, 201, out);
  }));

  server.Delete(R"(/content/classifications/([^/]+))",
                guarded([&s](const httplib::Request& req, httplib::Response& res) {
                  if (!s.authorize(req, res)) return;
                  const std::string id = req.matches[1];
                  s.mutate([&](const ContentPack& p) { return remove_classification(p, id); });
                  res.status = 204;
                }));

  // ---- student sessions ----

  server.Post("/sessions", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.is_object()) throw Error(Errc::parse_error, "session: expected an object");
    SessionConfig config = s.options.session_defaults;
    config.rng_seed = std::random_device{}();
    for (const auto& [key, value] : body.items()) {
      if (key != "seed") throw Error(Errc::parse_error, "session." + key + ": unknown field");
      if (!value.is_number_unsigned()) throw Error(Errc::parse_error, "session.seed: expected a non-negative integer");
      config.rng_seed = value.get<std::uint64_t>();
    }

    std::shared_lock content_lock(s.content_mutex);
    ValidatedPack validated = ValidatedPack::validate(s.pack);
    std::string id;
    std::shared_ptr<SessionSlot> slot;
    {
      std::lock_guard lock(s.sessions_mutex);
      id = "session-" + std::to_string(++s.session_counter);
      slot = std::make_shared<SessionSlot>(Session(config, std::move(validated), id));
      s.sessions.emplace(id, slot);
    }
    Json out;
    out["session_id"] = id;
    out["pack_version"] = s.pack.version;
    out["config"] = session_config_json(config);
    send_json(res, 201, out);
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    s.with_session(req, res, [&](Session& session) {
      Json out;
      out["session_id"] = session.id();
      out["config"] = session_config_json(session.config());
      out["token_count"] = session.token_count();
      out["cycle_index"] = session.cycle_index();
      if (const auto& pending = session.pending_followup()) {
        out["pending_followup"] = Json{{"classification_id", pending->classification_id},
                                       {"missed_item_id", pending->missed_item_id}};
      } else {
        out["pending_followup"] = nullptr;
      }
      out["trials"] = Json::array();
      for (const auto& t : session.trials()) out["trials"].push_back(codec::encode(t));
      out["reward_events"] = Json::array();
      for (const auto& r : session.reward_events()) out["reward_events"].push_back(codec::encode(r));
      send_json(res, 200, out);
    });
  }));

  server.Get(R"(/sessions/([^/]+)/prompt)", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    s.with_session(req, res, [&](Session& session) {
      // Idempotent: a client retrying after a dropped response gets the
      // same outstanding prompt back.
      if (auto current = session.current_prompt()) {
        send_json(res, 200, codec::encode(*current));
        return;
      }
      send_json(res, 200, codec::encode(session.next_prompt(s.now(req))));
    });
  }));

  server.Post(R"(/sessions/([^/]+)/answer)", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.is_object()) throw Error(Errc::parse_error, "answer: expected an object");
    for (const auto& [key, value] : body.items()) {
      if (key != "selected_index") throw Error(Errc::parse_error, "answer." + key + ": unknown field");
    }
    if (!body.contains("selected_index") || !body["selected_index"].is_number_unsigned()) {
      throw Error(Errc::parse_error, "answer.selected_index: expected a non-negative integer");
    }
    const auto index = body["selected_index"].get<std::size_t>();
    s.with_session(req, res, [&](Session& session) {
      const Outcome outcome = session.submit_answer(index, s.now(req));
      Json out;
      out["outcome"] = codec::encode(outcome);
      out["tokens"] = session.token_count();
      if (const auto* reward = std::get_if<RewardOutcome>(&outcome)) {
        out["reward"] = codec::encode(reward->reward_event);
      } else {
        out["reward"] = nullptr;
      }
      out["trial"] = codec::encode(session.trials().back());
      send_json(res, 200, out);
    });
  }));

  server.Post(R"(/sessions/([^/]+)/heartbeat)", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    s.with_session(req, res, [&](Session& session) {
      const Timestamp at = s.now(req);
      session.record_heartbeat(at);
      send_json(res, 200, Json{{"recorded_at", at.count()}});
    });
  }));

  server.Get(R"(/sessions/([^/]+)/metrics)", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    s.with_session(req, res, [&](Session& session) { send_json(res, 200, codec::encode(compute_metrics(session))); });
  }));

  // ---- media ----

  server.Get(R"(/media/(.+))", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    const std::string ref = req.matches[1];
    if (!is_safe_media_ref(ref)) {
      send_error(res, 400, "media-path-invalid", "media ref must stay inside the media root");
      return;
    }
    std::error_code ec;
    const auto root = std::filesystem::weakly_canonical(s.options.media_root, ec);
    const auto target = std::filesystem::weakly_canonical(root / ref, ec);
    const auto [root_end, _] = std::mismatch(root.begin(), root.end(), target.begin(), target.end());
    if (ec || root_end != root.end()) {
      send_error(res, 400, "media-path-invalid", "media ref must stay inside the media root");
      return;
    }
    if (!std::filesystem::is_regular_file(target, ec)) {
      send_error(res, 404, "media-not-found", "no media '" + ref + "'");
      return;
    }
    std::ifstream in(target, std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    res.status = 200;
    res.set_content(bytes.str(), content_type_for(target));
  }));
}

}  // namespace aba::api
