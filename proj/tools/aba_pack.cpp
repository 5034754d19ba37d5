// aba-pack: lint content pack files.
//
//   aba-pack validate pack.json [--json]
//
// Exit codes: 0 valid, 2 invalid or unreadable content, 1 I/O failure.

#include <CLI11.hpp>

#include <iostream>

#include "aba/json_codec.hpp"
#include "aba/pack_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Content pack tools"};
  app.require_subcommand(1);

  std::string path;
  bool as_json = false;
  auto* validate = app.add_subcommand("validate", "Check a pack against the authoring rules");
  validate->add_option("pack", path, "Pack file")->required();
  validate->add_flag("--json", as_json, "Print the report as JSON");

  CLI11_PARSE(app, argc, argv);

  aba::ContentPack pack;
  try {
    pack = aba::load_pack(path);
  } catch (const aba::Error& e) {
    std::cerr << "aba-pack: " << e.what() << '\n';
    return e.code() == aba::Errc::io_error ? 1 : 2;
  }

  const aba::ValidationReport report = aba::validate_pack(pack);
  if (as_json) {
    std::cout << aba::codec::encode(report).dump(2) << '\n';
  } else if (report.empty()) {
    std::cout << path << ": ok (" << pack.items.size() << " items, " << pack.classifications.size()
              << " classifications, version " << pack.version << ")\n";
  } else {
    for (const auto& v : report) std::cout << path << ": " << v.rule << " [" << v.subject_id << "] " << v.detail << '\n';
  }
  return report.empty() ? 0 : 2;
}
