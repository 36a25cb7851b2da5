#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cdes/types.hpp"

namespace cdes {

struct SenseEntry {
  std::string id;
  std::string lemma;
  Pos pos = Pos::kOther;
  std::string gloss;
  // Mean-pooled contextual embedding of the gloss, when the extractor
  // supplied one.
  std::optional<Vector> gloss_vector;

  friend bool operator==(const SenseEntry&, const SenseEntry&) = default;
};

// Senses grouped by (lemma, pos). Candidate order is insertion order and the
// first candidate of each group is its most frequent sense.
class SenseInventory {
 public:
  // Throws ValidationError on a duplicate id or empty id/lemma, and
  // DimensionError when the gloss vector width disagrees with earlier ones.
  void add(SenseEntry entry);

  std::size_t size() const noexcept { return senses_.size(); }
  const std::vector<SenseEntry>& senses() const noexcept { return senses_; }

  const SenseEntry* find(std::string_view sense_id) const;
  bool contains(std::string_view sense_id) const { return find(sense_id) != nullptr; }

  // nullptr when (lemma, pos) has no senses.
  const std::vector<std::string>* candidates(std::string_view lemma, Pos pos) const;
  const std::string* most_frequent(std::string_view lemma, Pos pos) const;

  // All senses of `lemma` over every part of speech, in insertion order.
  const std::vector<std::string>* senses_of_lemma(std::string_view lemma) const;

  // Width of the stored gloss vectors, 0 when none are present.
  std::size_t gloss_dim() const noexcept { return gloss_dim_; }
  std::size_t gloss_count() const noexcept { return gloss_count_; }

  friend bool operator==(const SenseInventory& a, const SenseInventory& b) {
    return a.senses_ == b.senses_;
  }

 private:
  static std::string group_key(std::string_view lemma, Pos pos);

  std::vector<SenseEntry> senses_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::string>> by_group_;
  std::unordered_map<std::string, std::vector<std::string>> by_lemma_;
  std::size_t gloss_dim_ = 0;
  std::size_t gloss_count_ = 0;
};

// Tab-separated lines: sense_id, lemma, POS tag, gloss text, and an optional
// fifth field holding the whitespace-separated gloss vector.
SenseInventory load_sense_inventory(const std::filesystem::path& path);
void save_sense_inventory(const SenseInventory& inventory,
                          const std::filesystem::path& path);

}  // namespace cdes
