// aba-tutor-server: HTTP service for the teacher and student workflows.
//
//   aba-tutor-server --bind 127.0.0.1:8080 --pack pack.json --media-root media/
//
// ABA_TUTOR_PACK, when set, overrides --pack.

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <csignal>
#include <filesystem>
#include <iostream>

#include "aba/pack_io.hpp"
#include "aba/service.hpp"

namespace {

httplib::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ABA tutoring service"};

  std::string bind = "127.0.0.1:8080";
  std::string pack_path;
  std::string media_root = ".";
  bool test_clock = false;

  app.add_option("--bind", bind, "host:port to listen on")->capture_default_str();
  app.add_option("--pack", pack_path, "Content pack JSON; created on first change if missing");
  app.add_option("--media-root", media_root, "Directory served under /media")->capture_default_str();
  app.add_flag("--test-clock", test_clock, "Take timestamps from the X-Test-Clock header");

  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("ABA_TUTOR_PACK"); env != nullptr && *env != '\0') pack_path = env;

  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "aba-tutor-server: --bind must be host:port\n";
    return 2;
  }
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    std::cerr << "aba-tutor-server: bad port in --bind\n";
    return 2;
  }

  aba::ContentPack pack;
  pack.pack_id = "local";
  aba::api::ServiceOptions options;
  options.media_root = media_root;
  options.test_clock = test_clock;
  if (!pack_path.empty()) {
    options.pack_path = pack_path;
    if (std::filesystem::exists(pack_path)) {
      try {
        pack = aba::load_pack(pack_path);
      } catch (const aba::Error& e) {
        std::cerr << "aba-tutor-server: " << e.what() << '\n';
        return 2;
      }
    }
  }

  aba::api::TutorService service(std::move(pack), options);
  httplib::Server server;
  service.mount(server);

  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  std::cerr << "aba-tutor-server listening on " << host << ':' << port << '\n';
  if (!server.listen(host, port)) {
    std::cerr << "aba-tutor-server: cannot listen on " << bind << '\n';
    return 1;
  }
  return 0;
}
