#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "aba/content.hpp"
#include "aba/engine.hpp"
#include "aba/gate.hpp"

// JSON wire format shared by pack files, the HTTP service and the tools.
// Field names match the domain types; timestamps are integer milliseconds,
// durations are integer seconds with an `_s` suffix, absent values are null.
namespace aba::codec {

using Json = nlohmann::ordered_json;

Json encode(const Classification& classification);
Json encode(const ContentItem& item);
Json encode(const ContentPack& pack);
Json encode(const Violation& violation);
Json encode(const ValidationReport& report);
Json encode(const TrialRecord& trial);
Json encode(const RewardEvent& reward);
Json encode(const Outcome& outcome);
Json encode(const SessionMetrics& metrics);

// Student-facing view: the item without its correct_index.
Json encode(const Prompt& prompt);
// Teacher-facing view: operands only, never the expected product.
Json encode(const GateChallenge& challenge);

// Strict decoders. Unknown or missing fields and wrong types raise
// Error{parse_error} whose message names the offending field path,
// e.g. "items[2].correct_index".
Classification decode_classification(const Json& json, std::string_view path = "classification");
ContentItem decode_item(const Json& json, std::string_view path = "item");
ItemPatch decode_item_patch(const Json& json, std::string_view path = "item");
ContentPack decode_pack(const Json& json);

// Parses text, reporting syntax errors with line and column.
Json parse(std::string_view text);

// Compact serialization used for byte-stable reports.
std::string dump(const Json& json);

}  // namespace aba::codec
