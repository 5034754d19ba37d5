#include "aba/content.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace aba {

std::string_view to_string(Subject subject) noexcept {
  switch (subject) {
    case Subject::reading: return "reading";
    case Subject::math: return "math";
  }
  return "reading";
}

std::optional<Subject> parse_subject(std::string_view text) noexcept {
  if (text == "reading") return Subject::reading;
  if (text == "math") return Subject::math;
  return std::nullopt;
}

const ContentItem* ContentPack::find_item(std::string_view item_id) const {
  auto it = std::find_if(items.begin(), items.end(),
                         [&](const ContentItem& i) { return i.item_id == item_id; });
  return it == items.end() ? nullptr : &*it;
}

const Classification* ContentPack::find_classification(std::string_view classification_id) const {
  auto it = std::find_if(classifications.begin(), classifications.end(), [&](const Classification& c) {
    return c.classification_id == classification_id;
  });
  return it == classifications.end() ? nullptr : &*it;
}

namespace {

Violation make_violation(std::string_view rule_name, std::string subject_id, std::string detail) {
  return Violation{std::string(rule_name), std::move(subject_id), std::move(detail)};
}

auto find_item_mut(ContentPack& pack, std::string_view item_id) {
  return std::find_if(pack.items.begin(), pack.items.end(),
                      [&](const ContentItem& i) { return i.item_id == item_id; });
}

}  // namespace

ValidationReport check_item(const ContentItem& item) {
  ValidationReport report;
  const std::string& id = item.item_id;
  if (item.item_id.empty()) {
    report.push_back(make_violation(rule::empty_id, id, "item_id is empty"));
  }
  if (item.prompt_text.empty()) {
    report.push_back(make_violation(rule::empty_prompt, id, "prompt_text is empty"));
  }
  if (item.choices.size() < 2) {
    report.push_back(make_violation(rule::min_two_choices, id,
                                    "item has " + std::to_string(item.choices.size()) +
                                        " choice(s); at least 2 are required"));
  }
  if (std::any_of(item.choices.begin(), item.choices.end(),
                  [](const std::string& c) { return c.empty(); })) {
    report.push_back(make_violation(rule::empty_choice, id, "a choice is empty"));
  }
  std::set<std::string_view> seen(item.choices.begin(), item.choices.end());
  if (seen.size() != item.choices.size()) {
    report.push_back(make_violation(rule::distinct_choices, id, "choices are not distinct"));
  }
  if (item.correct_index >= item.choices.size()) {
    report.push_back(make_violation(rule::answer_index_range, id,
                                    "correct_index " + std::to_string(item.correct_index) +
                                        " is outside " + std::to_string(item.choices.size()) +
                                        " choice(s)"));
  }
  return report;
}

ValidationReport validate_pack(const ContentPack& pack) {
  ValidationReport report;

  std::set<std::string_view> class_ids;
  for (const auto& c : pack.classifications) {
    if (c.classification_id.empty()) {
      report.push_back(make_violation(rule::empty_id, c.classification_id, "classification_id is empty"));
    }
    if (!class_ids.insert(c.classification_id).second) {
      report.push_back(make_violation(rule::duplicate_classification_id, c.classification_id,
                                      "classification_id appears more than once"));
    }
  }

  std::set<std::string_view> item_ids;
  std::map<std::string_view, std::size_t> per_class;
  for (const auto& item : pack.items) {
    if (!item_ids.insert(item.item_id).second) {
      report.push_back(make_violation(rule::duplicate_item_id, item.item_id, "item_id appears more than once"));
    }
    auto item_report = check_item(item);
    report.insert(report.end(), item_report.begin(), item_report.end());

    const Classification* cls = pack.find_classification(item.classification_id);
    if (cls == nullptr) {
      report.push_back(make_violation(rule::unknown_classification, item.item_id,
                                      "classification '" + item.classification_id + "' does not exist"));
      continue;
    }
    if (cls->subject != item.subject) {
      report.push_back(make_violation(rule::subject_mismatch, item.item_id,
                                      "item subject differs from classification '" +
                                          cls->classification_id + "'"));
    }
    ++per_class[cls->classification_id];
  }

  for (const auto& c : pack.classifications) {
    auto it = per_class.find(c.classification_id);
    if (it != per_class.end() && it->second < 2) {
      report.push_back(make_violation(rule::min_two_per_classification, c.classification_id,
                                      "classification '" + c.classification_id + "' has " +
                                          std::to_string(it->second) +
                                          " item; at least 2 are required"));
      // Mark handled so a duplicated classification id is reported once.
      per_class.erase(it);
    }
  }
  return report;
}

ContentPack add_classification(ContentPack pack, Classification classification) {
  if (classification.classification_id.empty()) {
    throw Error(Errc::invalid_argument, "classification_id is empty");
  }
  if (pack.find_classification(classification.classification_id) != nullptr) {
    throw Error(Errc::duplicate_classification,
                "classification '" + classification.classification_id + "' already exists");
  }
  pack.classifications.push_back(std::move(classification));
  ++pack.version;
  return pack;
}

ContentPack remove_classification(ContentPack pack, std::string_view classification_id) {
  auto it = std::find_if(pack.classifications.begin(), pack.classifications.end(),
                         [&](const Classification& c) { return c.classification_id == classification_id; });
  if (it == pack.classifications.end()) {
    throw Error(Errc::classification_not_found,
                "classification '" + std::string(classification_id) + "' does not exist");
  }
  const bool in_use = std::any_of(pack.items.begin(), pack.items.end(), [&](const ContentItem& i) {
    return i.classification_id == classification_id;
  });
  if (in_use) {
    throw Error(Errc::classification_in_use,
                "classification '" + std::string(classification_id) + "' still has items");
  }
  pack.classifications.erase(it);
  ++pack.version;
  return pack;
}

ContentPack add_item(ContentPack pack, ContentItem item) {
  if (auto report = check_item(item); !report.empty()) {
    throw ValidationError(Errc::malformed_item, "item '" + item.item_id + "' is malformed", std::move(report));
  }
  if (pack.find_item(item.item_id) != nullptr) {
    throw Error(Errc::duplicate_item, "item '" + item.item_id + "' already exists");
  }
  if (pack.find_classification(item.classification_id) == nullptr) {
    throw Error(Errc::unknown_classification,
                "classification '" + item.classification_id + "' does not exist");
  }
  pack.items.push_back(std::move(item));
  ++pack.version;
  return pack;
}

ContentPack edit_item(ContentPack pack, std::string_view item_id, const ItemPatch& patch) {
  auto it = find_item_mut(pack, item_id);
  if (it == pack.items.end()) {
    throw Error(Errc::item_not_found, "item '" + std::string(item_id) + "' does not exist");
  }
  ContentItem updated = *it;
  if (patch.prompt_text) updated.prompt_text = *patch.prompt_text;
  if (patch.media_ref) updated.media_ref = *patch.media_ref;
  if (patch.choices) updated.choices = *patch.choices;
  if (patch.correct_index) updated.correct_index = *patch.correct_index;
  if (patch.classification_id) updated.classification_id = *patch.classification_id;
  if (patch.subject) updated.subject = *patch.subject;

  if (auto report = check_item(updated); !report.empty()) {
    throw ValidationError(Errc::malformed_item, "item '" + updated.item_id + "' is malformed", std::move(report));
  }
  if (pack.find_classification(updated.classification_id) == nullptr) {
    throw Error(Errc::unknown_classification,
                "classification '" + updated.classification_id + "' does not exist");
  }
  *it = std::move(updated);
  ++pack.version;
  return pack;
}

ContentPack remove_item(ContentPack pack, std::string_view item_id) {
  auto it = find_item_mut(pack, item_id);
  if (it == pack.items.end()) {
    throw Error(Errc::item_not_found, "item '" + std::string(item_id) + "' does not exist");
  }
  pack.items.erase(it);
  ++pack.version;
  return pack;
}

ValidatedPack ValidatedPack::validate(ContentPack pack) {
  if (pack.items.empty()) {
    throw Error(Errc::pack_empty, "pack '" + pack.pack_id + "' has no items");
  }
  if (auto report = validate_pack(pack); !report.empty()) {
    throw ValidationError(Errc::pack_invalid, "pack '" + pack.pack_id + "' failed validation",
                          std::move(report));
  }
  auto state = std::make_shared<State>();
  state->pack = std::move(pack);
  for (std::size_t i = 0; i < state->pack.items.size(); ++i) {
    const auto& item = state->pack.items[i];
    state->by_id.emplace(item.item_id, i);
    state->by_classification[item.classification_id].push_back(i);
  }
  return ValidatedPack(std::move(state));
}

std::optional<std::size_t> ValidatedPack::index_of(std::string_view item_id) const {
  auto it = state_->by_id.find(std::string(item_id));
  if (it == state_->by_id.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& ValidatedPack::members(std::string_view classification_id) const {
  static const std::vector<std::size_t> none;
  auto it = state_->by_classification.find(std::string(classification_id));
  return it == state_->by_classification.end() ? none : it->second;
}

}  // namespace aba
