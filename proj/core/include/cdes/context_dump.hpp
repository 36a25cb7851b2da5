#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdes/types.hpp"

namespace cdes {

// One contextualised occurrence of a lemma. `vector` has the dump's q
// components.
struct ContextRecord {
  std::string instance_id;
  std::string lemma;
  Pos pos = Pos::kOther;
  std::optional<std::string> gold_sense;
  Vector vector;

  friend bool operator==(const ContextRecord&, const ContextRecord&) = default;
};

struct ContextDump {
  std::uint32_t q = 0;
  std::vector<ContextRecord> records;

  friend bool operator==(const ContextDump&, const ContextDump&) = default;
};

// Binary layout (little-endian):
//   "CDE1" | u32 q | u64 count | count x record
//   record = str16 instance_id | str16 lemma | u8 pos | u8 gold_flag
//            [| str16 gold_sense] | q x f32
// where str16 is a u16 byte length followed by UTF-8 bytes.
ContextDump load_context_dump(const std::filesystem::path& path);

// Throws DimensionError if any record's length differs from `dump.q`.
void save_context_dump(const ContextDump& dump, const std::filesystem::path& path);

// Header-only peek: q and record count.
struct ContextDumpHeader {
  std::uint32_t q = 0;
  std::uint64_t count = 0;
};
ContextDumpHeader read_context_dump_header(const std::filesystem::path& path);

}  // namespace cdes
