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

struct StaticTableOptions {
  // Fold tokens to ASCII lowercase at load and at lookup.
  bool lowercase = false;
};

struct StaticLoadReport {
  std::size_t rows_read = 0;
  std::size_t duplicates_skipped = 0;
  bool header_skipped = false;
};

// Sense-agnostic word vectors, one per token, all of dimension `dim()`.
// Immutable once loaded.
class StaticTable {
 public:
  StaticTable() = default;
  explicit StaticTable(std::size_t dim, StaticTableOptions options = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool lowercase() const noexcept { return options_.lowercase; }

  // Returns false (and keeps the first vector) when `token` is already present.
  bool add(std::string token, VectorView values);

  // An absent token is reported as nullopt, never as a zero vector.
  std::optional<VectorView> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  VectorView row(std::size_t i) const;

  const StaticLoadReport& load_report() const noexcept { return report_; }

  friend bool operator==(const StaticTable& a, const StaticTable& b) {
    return a.dim_ == b.dim_ && a.tokens_ == b.tokens_ && a.values_ == b.values_;
  }

 private:
  friend StaticTable load_static_table(const std::filesystem::path&, StaticTableOptions);

  std::string key(std::string_view token) const;

  std::size_t dim_ = 0;
  StaticTableOptions options_;
  std::vector<std::string> tokens_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
  StaticLoadReport report_;
};

// Whitespace-separated text, one "token v1 ... vp" row per line, p taken from
// the first row. A leading "count dim" header is detected and skipped.
StaticTable load_static_table(const std::filesystem::path& path,
                              StaticTableOptions options = {});

void save_static_table(const StaticTable& table, const std::filesystem::path& path);

}  // namespace cdes
