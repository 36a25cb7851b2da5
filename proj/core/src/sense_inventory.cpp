#include "cdes/sense_inventory.hpp"

#include <fstream>
#include <iomanip>

#include "cdes/error.hpp"
#include "text_util.hpp"

namespace cdes {

std::string SenseInventory::group_key(std::string_view lemma, Pos pos) {
  std::string k(lemma);
  k.push_back('\x1f');
  k.push_back(static_cast<char>('0' + static_cast<int>(pos)));
  return k;
}

void SenseInventory::add(SenseEntry entry) {
  if (entry.id.empty()) throw ValidationError("sense id is empty");
  if (entry.lemma.empty()) throw ValidationError("sense '" + entry.id + "' has no lemma");
  if (by_id_.contains(entry.id)) throw ValidationError("duplicate sense id '" + entry.id + "'");
  if (entry.gloss_vector) {
    if (entry.gloss_vector->empty()) {
      throw DimensionError("sense '" + entry.id + "' has an empty gloss vector");
    }
    if (gloss_dim_ == 0) {
      gloss_dim_ = entry.gloss_vector->size();
    } else if (entry.gloss_vector->size() != gloss_dim_) {
      throw DimensionError("gloss vector of '" + entry.id + "' has " +
                           std::to_string(entry.gloss_vector->size()) +
                           " components, expected " + std::to_string(gloss_dim_));
    }
    ++gloss_count_;
  }
  by_id_.emplace(entry.id, senses_.size());
  by_group_[group_key(entry.lemma, entry.pos)].push_back(entry.id);
  by_lemma_[entry.lemma].push_back(entry.id);
  senses_.push_back(std::move(entry));
}

const SenseEntry* SenseInventory::find(std::string_view sense_id) const {
  auto it = by_id_.find(std::string(sense_id));
  return it == by_id_.end() ? nullptr : &senses_[it->second];
}

const std::vector<std::string>* SenseInventory::candidates(std::string_view lemma,
                                                           Pos pos) const {
  auto it = by_group_.find(group_key(lemma, pos));
  return it == by_group_.end() ? nullptr : &it->second;
}

const std::string* SenseInventory::most_frequent(std::string_view lemma, Pos pos) const {
  const auto* c = candidates(lemma, pos);
  return c ? &c->front() : nullptr;
}

const std::vector<std::string>* SenseInventory::senses_of_lemma(std::string_view lemma) const {
  auto it = by_lemma_.find(std::string(lemma));
  return it == by_lemma_.end() ? nullptr : &it->second;
}

SenseInventory load_sense_inventory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");

  SenseInventory inv;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  std::vector<std::string_view> numbers;
  using K = FormatError::Kind;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    detail::split_char(line, '\t', fields);
    if (fields.size() < 3) {
      throw FormatError(K::kMissingField, path.string(), line_no,
                        "expected sense_id, lemma, POS and gloss separated by tabs");
    }
    if (fields.size() > 5) {
      throw FormatError(K::kRaggedRow, path.string(), line_no, "too many fields");
    }
    SenseEntry e;
    e.id = std::string(detail::trim(fields[0]));
    e.lemma = std::string(detail::trim(fields[1]));
    if (e.id.empty()) {
      throw FormatError(K::kEmptyCandidate, path.string(), line_no, "empty sense id");
    }
    if (e.lemma.empty()) {
      throw FormatError(K::kMissingField, path.string(), line_no,
                        "sense '" + e.id + "' names no lemma");
    }
    auto pos = parse_pos(detail::trim(fields[2]));
    if (!pos) {
      throw FormatError(K::kBadTag, path.string(), line_no,
                        "unknown POS tag '" + std::string(fields[2]) + "'");
    }
    e.pos = *pos;
    if (fields.size() >= 4) e.gloss = std::string(fields[3]);
    if (fields.size() == 5 && !detail::trim(fields[4]).empty()) {
      detail::split_whitespace(fields[4], numbers);
      Vector v(numbers.size());
      for (std::size_t i = 0; i < numbers.size(); ++i) {
        auto res = detail::parse_float(numbers[i], v[i]);
        if (res == detail::ParseResult::kMalformed) {
          throw FormatError(K::kMalformedNumber, path.string(), line_no,
                            "cannot parse '" + std::string(numbers[i]) + "'");
        }
        if (res == detail::ParseResult::kNonFinite) {
          throw FormatError(K::kNonFinite, path.string(), line_no,
                            "value '" + std::string(numbers[i]) + "'");
        }
      }
      if (inv.gloss_dim() != 0 && v.size() != inv.gloss_dim()) {
        throw FormatError(K::kRaggedRow, path.string(), line_no,
                          "gloss vector has " + std::to_string(v.size()) +
                              " values, expected " + std::to_string(inv.gloss_dim()));
      }
      e.gloss_vector = std::move(v);
    }
    if (inv.contains(e.id)) {
      throw FormatError(K::kDuplicateId, path.string(), line_no,
                        "sense id '" + e.id + "' already defined");
    }
    inv.add(std::move(e));
  }
  return inv;
}

void save_sense_inventory(const SenseInventory& inventory,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot create file");
  out << std::setprecision(9);
  for (const auto& e : inventory.senses()) {
    out << e.id << '\t' << e.lemma << '\t' << to_string(e.pos) << '\t' << e.gloss;
    if (e.gloss_vector) {
      out << '\t';
      for (std::size_t i = 0; i < e.gloss_vector->size(); ++i) {
        if (i) out << ' ';
        out << (*e.gloss_vector)[i];
      }
    }
    out << '\n';
  }
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "write failed");
}

}  // namespace cdes
