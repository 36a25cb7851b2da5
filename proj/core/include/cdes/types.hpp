#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdes {

// Coarse part-of-speech. The numeric values are the on-disk codes.
enum class Pos : std::uint8_t {
  kNoun = 0,
  kVerb = 1,
  kAdj = 2,
  kAdv = 3,
  kOther = 4,
};

std::string_view to_string(Pos pos);

// Accepts NOUN/VERB/ADJ/ADV/OTHER (any case) and the WordNet letters
// n, v, a, s, r.
std::optional<Pos> parse_pos(std::string_view tag);

std::optional<Pos> pos_from_code(std::uint8_t code);

using Vector = std::vector<float>;
using VectorView = std::span<const float>;

// Squared Euclidean norm accumulated in double precision.
double squared_norm(VectorView v);

}  // namespace cdes
