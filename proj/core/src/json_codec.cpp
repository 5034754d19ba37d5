#include "aba/json_codec.hpp"

#include <set>
#include <type_traits>

namespace aba::codec {

namespace {

[[noreturn]] void fail(std::string_view path, std::string_view what) {
  throw Error(Errc::parse_error, std::string(path) + ": " + std::string(what));
}

// Reads one JSON object field by field and rejects leftovers.
class ObjectReader {
 public:
  ObjectReader(const Json& json, std::string_view path) : json_(json), path_(path) {
    if (!json_.is_object()) fail(path_, "expected an object");
  }

  bool has(const char* key) const { return json_.contains(key); }

  std::string field_path(const char* key) const { return path_ + "." + key; }

  const Json& required(const char* key) {
    auto it = json_.find(key);
    if (it == json_.end()) fail(field_path(key), "missing required field");
    seen_.insert(key);
    return *it;
  }

  const Json* optional(const char* key) {
    auto it = json_.find(key);
    if (it == json_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  std::string string(const char* key) { return as_string(required(key), field_path(key)); }
  std::uint64_t unsigned_int(const char* key) { return as_unsigned(required(key), field_path(key)); }

  void finish() const {
    for (const auto& [key, value] : json_.items()) {
      if (!seen_.contains(key)) fail(path_ + "." + key, "unknown field");
    }
  }

  static std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  static std::uint64_t as_unsigned(const Json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    fail(path, "expected a non-negative integer");
  }

  static Subject as_subject(const Json& j, const std::string& path) {
    auto subject = parse_subject(as_string(j, path));
    if (!subject) fail(path, "expected \"reading\" or \"math\"");
    return *subject;
  }

  static std::vector<std::string> as_string_list(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  static std::optional<std::string> as_optional_string(const Json& j, const std::string& path) {
    if (j.is_null()) return std::nullopt;
    return as_string(j, path);
  }

 private:
  const Json& json_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

Json optional_number(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

Json encode(const Classification& c) {
  return Json{{"classification_id", c.classification_id}, {"name", c.name}, {"subject", to_string(c.subject)}};
}

Json encode(const ContentItem& item) {
  Json j;
  j["item_id"] = item.item_id;
  j["prompt_text"] = item.prompt_text;
  j["media_ref"] = item.media_ref ? Json(*item.media_ref) : Json(nullptr);
  j["choices"] = item.choices;
  j["correct_index"] = item.correct_index;
  j["classification_id"] = item.classification_id;
  j["subject"] = to_string(item.subject);
  return j;
}

Json encode(const ContentPack& pack) {
  Json j;
  j["pack_id"] = pack.pack_id;
  j["version"] = pack.version;
  j["classifications"] = Json::array();
  for (const auto& c : pack.classifications) j["classifications"].push_back(encode(c));
  j["items"] = Json::array();
  for (const auto& item : pack.items) j["items"].push_back(encode(item));
  return j;
}

Json encode(const Violation& v) {
  return Json{{"rule", v.rule}, {"subject_id", v.subject_id}, {"detail", v.detail}};
}

Json encode(const ValidationReport& report) {
  Json j = Json::array();
  for (const auto& v : report) j.push_back(encode(v));
  return j;
}

Json encode(const TrialRecord& t) {
  Json j;
  j["item_id"] = t.item_id;
  j["presented_at"] = t.presented_at.count();
  j["answered_at"] = t.answered_at.count();
  j["selected_index"] = t.selected_index;
  j["correct"] = t.correct;
  j["is_followup"] = t.is_followup;
  j["tokens_after"] = t.tokens_after;
  j["cycle_index"] = t.cycle_index;
  return j;
}

Json encode(const RewardEvent& r) {
  Json j;
  j["cycle_index"] = r.cycle_index;
  j["granted_at"] = r.granted_at.count();
  j["duration_cap_s"] = r.duration_cap.count();
  j["trials_in_cycle"] = r.trials_in_cycle;
  return j;
}

Json encode(const Outcome& outcome) {
  return std::visit(
      [](const auto& o) -> Json {
        using T = std::decay_t<decltype(o)>;
        Json j;
        if constexpr (std::is_same_v<T, CorrectOutcome>) {
          j["outcome"] = "correct";
          j["tokens_now"] = o.tokens_now;
          j["praise_cue"] = o.praise_cue;
        } else if constexpr (std::is_same_v<T, IncorrectOutcome>) {
          j["outcome"] = "incorrect";
          j["correct_answer_text"] = o.correct_answer_text;
          j["somber_cue"] = o.somber_cue;
          j["followup_scheduled"] = o.followup_scheduled;
        } else {
          j["outcome"] = "reward_granted";
          j["reward_event"] = encode(o.reward_event);
        }
        return j;
      },
      outcome);
}

Json encode(const SessionMetrics& m) {
  Json j;
  j["engagement_hours"] = m.engagement_hours;
  j["accuracy_rate_overall"] = optional_number(m.accuracy_rate_overall);
  j["accuracy_rate_per_cycle"] = m.accuracy_rate_per_cycle;
  j["generalization_rate"] = optional_number(m.generalization_rate);
  return j;
}

Json encode(const Prompt& p) {
  Json j;
  j["item_id"] = p.item.item_id;
  j["prompt_text"] = p.item.prompt_text;
  j["media_ref"] = p.item.media_ref ? Json(*p.item.media_ref) : Json(nullptr);
  j["choices"] = p.item.choices;
  j["classification_id"] = p.item.classification_id;
  j["subject"] = to_string(p.item.subject);
  j["token_display"] = p.token_display;
  j["is_followup"] = p.is_followup;
  j["presented_at"] = p.presented_at.count();
  return j;
}

Json encode(const GateChallenge& c) {
  Json j;
  j["challenge_id"] = c.challenge_id;
  j["operand_a"] = c.operand_a;
  j["operand_b"] = c.operand_b;
  j["operation"] = "multiplication";
  j["expires_at"] = c.expires_at.count();
  return j;
}

Classification decode_classification(const Json& json, std::string_view path) {
  ObjectReader r(json, path);
  Classification c;
  c.classification_id = r.string("classification_id");
  c.name = r.string("name");
  c.subject = ObjectReader::as_subject(r.required("subject"), r.field_path("subject"));
  r.finish();
  return c;
}

ContentItem decode_item(const Json& json, std::string_view path) {
  ObjectReader r(json, path);
  ContentItem item;
  item.item_id = r.string("item_id");
  item.prompt_text = r.string("prompt_text");
  if (const Json* media = r.optional("media_ref")) {
    item.media_ref = ObjectReader::as_optional_string(*media, r.field_path("media_ref"));
  }
  item.choices = ObjectReader::as_string_list(r.required("choices"), r.field_path("choices"));
  item.correct_index = static_cast<std::size_t>(r.unsigned_int("correct_index"));
  item.classification_id = r.string("classification_id");
  item.subject = ObjectReader::as_subject(r.required("subject"), r.field_path("subject"));
  r.finish();
  return item;
}

ItemPatch decode_item_patch(const Json& json, std::string_view path) {
  ObjectReader r(json, path);
  ItemPatch patch;
  if (const Json* id = r.optional("item_id")) {
    // Allowed only as an echo of the addressed item; the caller checks it.
    ObjectReader::as_string(*id, r.field_path("item_id"));
  }
  if (const Json* v = r.optional("prompt_text")) patch.prompt_text = ObjectReader::as_string(*v, r.field_path("prompt_text"));
  if (const Json* v = r.optional("media_ref")) patch.media_ref = ObjectReader::as_optional_string(*v, r.field_path("media_ref"));
  if (const Json* v = r.optional("choices")) patch.choices = ObjectReader::as_string_list(*v, r.field_path("choices"));
  if (const Json* v = r.optional("correct_index")) patch.correct_index = ObjectReader::as_unsigned(*v, r.field_path("correct_index"));
  if (const Json* v = r.optional("classification_id")) patch.classification_id = ObjectReader::as_string(*v, r.field_path("classification_id"));
  if (const Json* v = r.optional("subject")) patch.subject = ObjectReader::as_subject(*v, r.field_path("subject"));
  r.finish();
  return patch;
}

ContentPack decode_pack(const Json& json) {
  ObjectReader r(json, "pack");
  ContentPack pack;
  pack.pack_id = r.string("pack_id");
  pack.version = r.unsigned_int("version");

  const Json& classes = r.required("classifications");
  if (!classes.is_array()) fail(r.field_path("classifications"), "expected an array");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    pack.classifications.push_back(decode_classification(classes[i], "classifications[" + std::to_string(i) + "]"));
  }
  const Json& items = r.required("items");
  if (!items.is_array()) fail(r.field_path("items"), "expected an array");
  for (std::size_t i = 0; i < items.size(); ++i) {
    pack.items.push_back(decode_item(items[i], "items[" + std::to_string(i) + "]"));
  }
  r.finish();
  return pack;
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(Errc::parse_error,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": malformed JSON");
  }
}

std::string dump(const Json& json) { return json.dump(); }

}  // namespace aba::codec
