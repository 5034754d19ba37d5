#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "aba/content.hpp"

namespace aba {

// Pack files are single UTF-8 JSON documents (see json_codec.hpp).
// Loading rejects unknown fields, reports the failing field or line, and
// refuses duplicate item or classification ids. The min-two rule is not
// checked here; a pack mid-authoring can be stored and reloaded.

std::string serialize_pack(const ContentPack& pack);

// When expected_version is set, a pack with another version is rejected
// with Errc::version_mismatch.
ContentPack deserialize_pack(std::string_view text, std::optional<std::uint64_t> expected_version = std::nullopt);

// Writes atomically (temp file + rename). Throws Error{io_error}.
void save_pack(const ContentPack& pack, const std::filesystem::path& destination);

ContentPack load_pack(const std::filesystem::path& source, std::optional<std::uint64_t> expected_version = std::nullopt);

}  // namespace aba
