#include "cdes/gold_keys.hpp"

#include <algorithm>
#include <fstream>

#include "cdes/error.hpp"
#include "text_util.hpp"

namespace cdes {

void GoldKeys::add(std::string instance_id, std::vector<std::string> senses) {
  if (senses.empty()) throw ValidationError("gold key '" + instance_id + "' has no senses");
  auto [it, inserted] = keys_.emplace(instance_id, std::move(senses));
  if (!inserted) throw ValidationError("duplicate gold key '" + instance_id + "'");
  ids_.push_back(std::move(instance_id));
}

const std::vector<std::string>* GoldKeys::find(std::string_view instance_id) const {
  auto it = keys_.find(std::string(instance_id));
  return it == keys_.end() ? nullptr : &it->second;
}

bool GoldKeys::accepts(std::string_view instance_id, std::string_view sense_id) const {
  const auto* senses = find(instance_id);
  return senses && std::find(senses->begin(), senses->end(), sense_id) != senses->end();
}

GoldKeys load_gold_keys(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  GoldKeys keys;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    detail::split_whitespace(line, fields);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw FormatError(FormatError::Kind::kMissingField, path.string(), line_no,
                        "instance '" + std::string(fields[0]) + "' has no gold sense");
    }
    if (keys.find(fields[0])) {
      throw FormatError(FormatError::Kind::kDuplicateId, path.string(), line_no,
                        "instance '" + std::string(fields[0]) + "' listed twice");
    }
    std::vector<std::string> senses(fields.begin() + 1, fields.end());
    keys.add(std::string(fields[0]), std::move(senses));
  }
  return keys;
}

}  // namespace cdes
