#include "cdes/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "cdes/error.hpp"

namespace cdes {

std::string_view to_string(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "NOUN";
    case Pos::kVerb: return "VERB";
    case Pos::kAdj: return "ADJ";
    case Pos::kAdv: return "ADV";
    case Pos::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<Pos> parse_pos(std::string_view tag) {
  std::string upper(tag);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "NOUN" || upper == "N") return Pos::kNoun;
  if (upper == "VERB" || upper == "V") return Pos::kVerb;
  if (upper == "ADJ" || upper == "A" || upper == "S") return Pos::kAdj;
  if (upper == "ADV" || upper == "R") return Pos::kAdv;
  if (upper == "OTHER" || upper == "X") return Pos::kOther;
  return std::nullopt;
}

std::optional<Pos> pos_from_code(std::uint8_t code) {
  if (code > static_cast<std::uint8_t>(Pos::kOther)) return std::nullopt;
  return static_cast<Pos>(code);
}

double squared_norm(VectorView v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return s;
}

FormatError::FormatError(Kind kind, const std::string& path, std::size_t line,
                         const std::string& what)
    : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " +
            to_string(kind) + ": " + what),
      kind_(kind),
      path_(path),
      line_(line) {}

const char* to_string(FormatError::Kind kind) {
  using K = FormatError::Kind;
  switch (kind) {
    case K::kEmptyFile: return "empty file";
    case K::kRaggedRow: return "ragged row";
    case K::kMalformedNumber: return "malformed number";
    case K::kNonFinite: return "non-finite value";
    case K::kBadMagic: return "bad magic";
    case K::kUnsupportedVersion: return "unsupported version";
    case K::kTruncated: return "truncated";
    case K::kZeroDimension: return "zero dimension";
    case K::kMissingField: return "missing field";
    case K::kEmptyCandidate: return "empty candidate";
    case K::kDuplicateId: return "duplicate id";
    case K::kBadTag: return "bad tag";
    case K::kIo: return "i/o failure";
  }
  return "format error";
}

}  // namespace cdes
