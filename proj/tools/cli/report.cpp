#include "report.hpp"

#include <cstdio>
#include <fstream>

#include "cdes/error.hpp"

namespace cdes::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

void write_report(const std::filesystem::path& dir, const std::string& stem, const Json& json,
                  const std::string& text) {
  std::filesystem::create_directories(dir);
  write_file(dir / (stem + ".json"), json.dump(2) + "\n");
  write_file(dir / (stem + ".txt"), text);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string percent(double fraction) { return fmt(100.0 * fraction, 1) + "%"; }

}  // namespace cdes::cli
