#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aba/content.hpp"
#include "aba/pack_io.hpp"
#include "aba/rng.hpp"

namespace aba::testing {

inline ContentItem make_item(std::string id, std::string classification, Subject subject = Subject::reading,
                             std::vector<std::string> choices = {"alpha", "beta", "gamma"},
                             std::size_t correct_index = 0) {
  ContentItem item;
  item.item_id = std::move(id);
  item.prompt_text = "Question " + item.item_id;
  item.media_ref = item.item_id + ".png";
  item.choices = std::move(choices);
  item.correct_index = correct_index;
  item.classification_id = std::move(classification);
  item.subject = subject;
  return item;
}

// One classification per entry, holding `count` items named "<cls>-<n>".
inline ContentPack make_pack(const std::vector<std::pair<std::string, int>>& classes,
                             Subject subject = Subject::reading) {
  ContentPack pack;
  pack.pack_id = "test";
  pack.version = 1;
  for (const auto& [cls, count] : classes) {
    pack.classifications.push_back({cls, cls, subject});
    for (int i = 1; i <= count; ++i) {
      pack.items.push_back(make_item(cls + "-" + std::to_string(i), cls, subject, {"alpha", "beta", "gamma"},
                                     static_cast<std::size_t>(i % 3)));
    }
  }
  return pack;
}

// 2 classifications x 2 items, the smallest pack with follow-up choice.
inline ContentPack four_item_pack() { return make_pack({{"eating", 2}, {"counting", 2}}); }

// Well-formed pack with random classification sizes in [min_size, max_size]
// and 2..4 choices per item.
inline ContentPack random_pack(Rng& rng, int min_size, int max_size, int max_classes = 5) {
  ContentPack pack;
  pack.pack_id = "fuzz";
  pack.version = rng.uniform_index(100);
  const int classes = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_classes)));
  for (int c = 0; c < classes; ++c) {
    const std::string cls = "class" + std::to_string(c);
    const Subject subject = rng.bernoulli(0.5) ? Subject::reading : Subject::math;
    pack.classifications.push_back({cls, "Class " + std::to_string(c), subject});
    const int size = min_size + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_size - min_size + 1)));
    for (int i = 0; i < size; ++i) {
      const std::size_t n_choices = 2 + rng.uniform_index(3);
      std::vector<std::string> choices;
      for (std::size_t k = 0; k < n_choices; ++k) choices.push_back("choice " + std::to_string(k));
      ContentItem item = make_item(cls + "-" + std::to_string(i), cls, subject, choices, rng.uniform_index(n_choices));
      if (rng.bernoulli(0.3)) item.media_ref.reset();
      pack.items.push_back(std::move(item));
    }
  }
  return pack;
}

inline ContentPack demo_pack() { return load_pack(std::string(ABA_TEST_DATA_DIR) + "/demo_pack.json"); }

// Index of some wrong choice for the item.
inline std::size_t wrong_choice(const ContentItem& item) { return item.correct_index == 0 ? 1 : 0; }

}  // namespace aba::testing
