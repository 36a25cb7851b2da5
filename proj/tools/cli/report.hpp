#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace cdes::cli {

using Json = nlohmann::ordered_json;

// Writes <dir>/<stem>.json and <dir>/<stem>.txt.
void write_report(const std::filesystem::path& dir, const std::string& stem, const Json& json,
                  const std::string& text);

std::string hex64(std::uint64_t v);
// Fixed six-decimal rendering used by the text reports.
std::string fmt(double v, int precision = 6);
std::string percent(double fraction);

}  // namespace cdes::cli
