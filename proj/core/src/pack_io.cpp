#include "aba/pack_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "aba/json_codec.hpp"

namespace aba {

namespace {

void check_integrity(const ContentPack& pack) {
  std::set<std::string_view> ids;
  for (const auto& c : pack.classifications) {
    if (!ids.insert(c.classification_id).second) {
      throw Error(Errc::integrity_error, "duplicate classification_id '" + c.classification_id + "'");
    }
  }
  ids.clear();
  for (const auto& item : pack.items) {
    if (!ids.insert(item.item_id).second) {
      throw Error(Errc::integrity_error, "duplicate item_id '" + item.item_id + "'");
    }
  }
}

}  // namespace

std::string serialize_pack(const ContentPack& pack) { return codec::encode(pack).dump(2) + "\n"; }

ContentPack deserialize_pack(std::string_view text, std::optional<std::uint64_t> expected_version) {
  ContentPack pack = codec::decode_pack(codec::parse(text));
  check_integrity(pack);
  if (expected_version && pack.version != *expected_version) {
    throw Error(Errc::version_mismatch, "pack version " + std::to_string(pack.version) + " does not match expected " +
                                            std::to_string(*expected_version));
  }
  return pack;
}

void save_pack(const ContentPack& pack, const std::filesystem::path& destination) {
  const std::string text = serialize_pack(pack);
  std::filesystem::path tmp = destination;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write '" + tmp.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(Errc::io_error, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, destination, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot replace '" + destination.string() + "'");
  }
}

ContentPack load_pack(const std::filesystem::path& source, std::optional<std::uint64_t> expected_version) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read '" + source.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_pack(buf.str(), expected_version);
  } catch (const Error& e) {
    throw Error(e.code(), source.string() + ": " + e.what());
  }
}

}  // namespace aba
