#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cdes {

// Instance id -> acceptable gold sense ids, in keyfile order.
class GoldKeys {
 public:
  void add(std::string instance_id, std::vector<std::string> senses);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& instance_ids() const noexcept { return ids_; }
  const std::vector<std::string>* find(std::string_view instance_id) const;
  bool accepts(std::string_view instance_id, std::string_view sense_id) const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::vector<std::string>> keys_;
};

// "instance_id sense_id [sense_id ...]" per line, space separated.
GoldKeys load_gold_keys(const std::filesystem::path& path);

}  // namespace cdes
