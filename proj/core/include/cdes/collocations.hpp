#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cdes {

class SenseInventory;

struct Collocation {
  std::string anchor;   // lemma u whose sense is tagged
  std::string partner;  // lemma v
  std::string sense_id;

  friend bool operator==(const Collocation&, const Collocation&) = default;
};

// Collocation pairs keyed by the unordered lemma pair (stored with the
// lexicographically smaller lemma first). One key may carry several
// senses, e.g. one for each direction of the pair.
class CollocationSet {
 public:
  using Key = std::pair<std::string, std::string>;

  static Key canonical(std::string_view u, std::string_view v);

  // Returns false when the identical collocation is already present.
  bool add(Collocation c);

  std::size_t size() const noexcept { return count_; }
  const std::map<Key, std::vector<Collocation>>& pairs() const noexcept { return pairs_; }
  const std::vector<Collocation>* find(std::string_view u, std::string_view v) const;

  // Lemmas that take part in at least one pair, mapped to their pair keys.
  const std::map<std::string, std::vector<Key>, std::less<>>& by_lemma() const noexcept {
    return by_lemma_;
  }

  // Throws ValidationError naming the first collocation whose sense is not
  // a sense of its anchor lemma.
  void validate(const SenseInventory& inventory) const;

 private:
  std::map<Key, std::vector<Collocation>> pairs_;
  std::map<std::string, std::vector<Key>, std::less<>> by_lemma_;
  std::size_t count_ = 0;
};

// Tab-separated lines: lemma_u, lemma_v, sense_id (sense of lemma_u).
CollocationSet load_collocations(const std::filesystem::path& path);

}  // namespace cdes
