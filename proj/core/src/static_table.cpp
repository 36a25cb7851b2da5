#include "cdes/static_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cdes/error.hpp"
#include "text_util.hpp"

namespace cdes {

StaticTable::StaticTable(std::size_t dim, StaticTableOptions options)
    : dim_(dim), options_(options) {
  if (dim == 0) throw DimensionError("static table dimension must be positive");
}

std::string StaticTable::key(std::string_view token) const {
  return options_.lowercase ? detail::ascii_lower(token) : std::string(token);
}

bool StaticTable::add(std::string token, VectorView values) {
  if (values.size() != dim_) {
    throw DimensionError("static vector for '" + token + "' has " +
                         std::to_string(values.size()) + " components, expected " +
                         std::to_string(dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) throw DimensionError("non-finite component for '" + token + "'");
  }
  std::string k = key(token);
  auto [it, inserted] = index_.emplace(k, tokens_.size());
  if (!inserted) return false;
  tokens_.push_back(std::move(k));
  values_.insert(values_.end(), values.begin(), values.end());
  return true;
}

std::optional<VectorView> StaticTable::find(std::string_view token) const {
  auto it = options_.lowercase ? index_.find(detail::ascii_lower(token))
                               : index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return row(it->second);
}

VectorView StaticTable::row(std::size_t i) const {
  return VectorView(values_).subspan(i * dim_, dim_);
}

namespace {

bool is_count_header(const std::vector<std::string_view>& fields, std::size_t& dim) {
  if (fields.size() != 2) return false;
  std::size_t count = 0;
  auto parse = [](std::string_view s, std::size_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  return parse(fields[0], count) && parse(fields[1], dim) && dim > 0;
}

}  // namespace

StaticTable load_static_table(const std::filesystem::path& path,
                              StaticTableOptions options) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  }

  StaticTable table;
  table.options_ = options;
  std::string line;
  std::size_t line_no = 0;
  std::size_t header_dim = 0;
  std::vector<std::string_view> fields;
  std::vector<float> values;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    detail::split_whitespace(line, fields);
    if (fields.empty()) continue;

    if (table.dim_ == 0 && header_dim == 0 && !table.report_.header_skipped &&
        is_count_header(fields, header_dim)) {
      // Only a header if the next data row agrees with the declared width;
      // otherwise this is a p=1 row whose token happens to be numeric.
      const auto pos = in.tellg();
      std::string next;
      bool header = false;
      while (std::getline(in, next)) {
        std::vector<std::string_view> next_fields;
        detail::split_whitespace(next, next_fields);
        if (next_fields.empty()) continue;
        header = next_fields.size() == header_dim + 1;
        break;
      }
      in.clear();
      in.seekg(pos);
      if (header) {
        table.report_.header_skipped = true;
        continue;
      }
      header_dim = 0;
    }

    if (table.dim_ == 0) {
      if (fields.size() < 2) {
        throw FormatError(FormatError::Kind::kRaggedRow, path.string(), line_no,
                          "row has a token but no values");
      }
      table.dim_ = fields.size() - 1;
    }
    if (fields.size() != table.dim_ + 1) {
      throw FormatError(FormatError::Kind::kRaggedRow, path.string(), line_no,
                        "expected " + std::to_string(table.dim_) + " values, found " +
                            std::to_string(fields.size() - 1));
    }
    values.resize(table.dim_);
    for (std::size_t i = 0; i < table.dim_; ++i) {
      switch (detail::parse_float(fields[i + 1], values[i])) {
        case detail::ParseResult::kOk:
          break;
        case detail::ParseResult::kNonFinite:
          throw FormatError(FormatError::Kind::kNonFinite, path.string(), line_no,
                            "value '" + std::string(fields[i + 1]) + "'");
        case detail::ParseResult::kMalformed:
          throw FormatError(FormatError::Kind::kMalformedNumber, path.string(), line_no,
                            "cannot parse '" + std::string(fields[i + 1]) + "'");
      }
    }
    ++table.report_.rows_read;
    if (!table.add(std::string(fields[0]), values)) ++table.report_.duplicates_skipped;
  }

  if (table.dim_ == 0) {
    throw FormatError(FormatError::Kind::kEmptyFile, path.string(), line_no,
                      "no embedding rows");
  }
  return table;
}

void save_static_table(const StaticTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot create file");
  out << std::setprecision(9);
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.tokens()[i];
    for (float v : table.row(i)) out << ' ' << v;
    out << '\n';
  }
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "write failed");
}

}  // namespace cdes
