#include "cdes/collocations.hpp"

#include <algorithm>
#include <fstream>

#include "cdes/error.hpp"
#include "cdes/sense_inventory.hpp"
#include "text_util.hpp"

namespace cdes {

CollocationSet::Key CollocationSet::canonical(std::string_view u, std::string_view v) {
  if (v < u) std::swap(u, v);
  return {std::string(u), std::string(v)};
}

bool CollocationSet::add(Collocation c) {
  Key key = canonical(c.anchor, c.partner);
  auto& bucket = pairs_[key];
  if (std::find(bucket.begin(), bucket.end(), c) != bucket.end()) return false;
  if (bucket.empty()) {
    by_lemma_[key.first].push_back(key);
    if (key.second != key.first) by_lemma_[key.second].push_back(key);
  }
  bucket.push_back(std::move(c));
  ++count_;
  return true;
}

const std::vector<Collocation>* CollocationSet::find(std::string_view u,
                                                     std::string_view v) const {
  auto it = pairs_.find(canonical(u, v));
  return it == pairs_.end() ? nullptr : &it->second;
}

void CollocationSet::validate(const SenseInventory& inventory) const {
  for (const auto& [key, bucket] : pairs_) {
    for (const auto& c : bucket) {
      const auto* lemma_senses = inventory.senses_of_lemma(c.anchor);
      if (!lemma_senses ||
          std::find(lemma_senses->begin(), lemma_senses->end(), c.sense_id) ==
              lemma_senses->end()) {
        throw ValidationError("collocation (" + c.anchor + ", " + c.partner + ") -> " +
                              c.sense_id + ": sense is not a candidate of '" + c.anchor +
                              "'");
      }
    }
  }
}

CollocationSet load_collocations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  CollocationSet set;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    detail::split_char(line, '\t', fields);
    if (fields.size() != 3) {
      throw FormatError(FormatError::Kind::kRaggedRow, path.string(), line_no,
                        "expected lemma_u, lemma_v, sense_id");
    }
    Collocation c{std::string(detail::trim(fields[0])), std::string(detail::trim(fields[1])),
                  std::string(detail::trim(fields[2]))};
    if (c.anchor.empty() || c.partner.empty() || c.sense_id.empty()) {
      throw FormatError(FormatError::Kind::kMissingField, path.string(), line_no,
                        "empty field");
    }
    set.add(std::move(c));
  }
  return set;
}

}  // namespace cdes
