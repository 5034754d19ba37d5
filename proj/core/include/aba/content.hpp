#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aba/error.hpp"

namespace aba {

enum class Subject { reading, math };

std::string_view to_string(Subject subject) noexcept;
std::optional<Subject> parse_subject(std::string_view text) noexcept;

/// One tutoring question.
struct ContentItem {
  std::string item_id;
  std::string prompt_text;
  std::optional<std::string> media_ref;  // relative path under the media root
  std::vector<std::string> choices;
  std::size_t correct_index = 0;
  std::string classification_id;
  Subject subject = Subject::reading;

  const std::string& correct_answer() const { return choices.at(correct_index); }

  bool operator==(const ContentItem&) const = default;
};

/// A concept the teacher groups items under ("eating", "counting").
struct Classification {
  std::string classification_id;
  std::string name;
  Subject subject = Subject::reading;

  bool operator==(const Classification&) const = default;
};

struct ContentPack {
  std::string pack_id;
  std::uint64_t version = 0;
  std::vector<Classification> classifications;
  std::vector<ContentItem> items;

  const ContentItem* find_item(std::string_view item_id) const;
  const Classification* find_classification(std::string_view classification_id) const;

  bool operator==(const ContentPack&) const = default;
};

// Rule names reported in violations.
namespace rule {
inline constexpr std::string_view min_two_per_classification = "min-two-per-classification";
inline constexpr std::string_view answer_index_range = "answer-index-range";
inline constexpr std::string_view min_two_choices = "min-two-choices";
inline constexpr std::string_view distinct_choices = "distinct-choices";
inline constexpr std::string_view empty_choice = "empty-choice";
inline constexpr std::string_view empty_prompt = "empty-prompt";
inline constexpr std::string_view empty_id = "empty-id";
inline constexpr std::string_view unknown_classification = "unknown-classification";
inline constexpr std::string_view subject_mismatch = "subject-mismatch";
inline constexpr std::string_view duplicate_item_id = "duplicate-item-id";
inline constexpr std::string_view duplicate_classification_id = "duplicate-classification-id";
}  // namespace rule

// Item-local invariants only (choices, answer index, prompt).
ValidationReport check_item(const ContentItem& item);

// Every violation in the pack; empty means the pack can start a session.
// Pure: equal packs give equal reports.
ValidationReport validate_pack(const ContentPack& pack);

// Partial update for edit_item; absent fields are left unchanged.
struct ItemPatch {
  std::optional<std::string> prompt_text;
  std::optional<std::optional<std::string>> media_ref;
  std::optional<std::vector<std::string>> choices;
  std::optional<std::size_t> correct_index;
  std::optional<std::string> classification_id;
  std::optional<Subject> subject;
};

// Authoring operations. Each returns the updated pack with version + 1 and
// throws aba::Error (or ValidationError for malformed items) on rejection.
// The min-two rule is deliberately not enforced here; see validate_pack.
ContentPack add_classification(ContentPack pack, Classification classification);
ContentPack remove_classification(ContentPack pack, std::string_view classification_id);
ContentPack add_item(ContentPack pack, ContentItem item);
ContentPack edit_item(ContentPack pack, std::string_view item_id, const ItemPatch& patch);
ContentPack remove_item(ContentPack pack, std::string_view item_id);

/// An immutable, non-empty pack that passed validate_pack. Sessions can
/// only be built from this type. Copies share the same snapshot.
class ValidatedPack {
 public:
  // Throws ValidationError{pack_invalid} with the report, or Error{pack_empty}.
  static ValidatedPack validate(ContentPack pack);

  const ContentPack& pack() const noexcept { return state_->pack; }
  const std::vector<ContentItem>& items() const noexcept { return state_->pack.items; }
  std::size_t size() const noexcept { return state_->pack.items.size(); }

  // Index of the item with this id, if present.
  std::optional<std::size_t> index_of(std::string_view item_id) const;
  // Item indices belonging to a classification, in pack order.
  const std::vector<std::size_t>& members(std::string_view classification_id) const;

 private:
  struct State {
    ContentPack pack;
    std::unordered_map<std::string, std::size_t> by_id;
    std::unordered_map<std::string, std::vector<std::size_t>> by_classification;
  };

  explicit ValidatedPack(std::shared_ptr<const State> state) : state_(std::move(state)) {}

  std::shared_ptr<const State> state_;
};

}  // namespace aba
