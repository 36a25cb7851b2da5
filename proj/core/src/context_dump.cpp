#include "cdes/context_dump.hpp"

#include <algorithm>
#include <fstream>

#include "binary_io.hpp"
#include "cdes/error.hpp"

namespace cdes {

namespace {

constexpr std::string_view kMagic = "CDE1";

ContextDumpHeader read_header(detail::BinaryReader& r) {
  r.expect_magic(kMagic);
  ContextDumpHeader h;
  h.q = r.u32("q");
  h.count = r.u64("record count");
  if (h.q == 0) {
    throw FormatError(FormatError::Kind::kZeroDimension, r.path(), 0, "q is 0");
  }
  return h;
}

}  // namespace

ContextDumpHeader read_context_dump_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  detail::BinaryReader r(in, path.string());
  return read_header(r);
}

ContextDump load_context_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot open file");
  detail::BinaryReader r(in, path.string());

  const ContextDumpHeader header = read_header(r);
  ContextDump dump;
  dump.q = header.q;
  // do not trust the declared count for the reservation
  dump.records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(header.count, 1u << 16)));

  for (std::uint64_t i = 0; i < header.count; ++i) {
    try {
      ContextRecord rec;
      rec.instance_id = r.str16("instance id");
      rec.lemma = r.str16("lemma");
      const std::uint8_t code = r.u8("pos code");
      auto pos = pos_from_code(code);
      if (!pos) {
        throw FormatError(FormatError::Kind::kBadTag, path.string(), 0,
                          "record " + std::to_string(i) + ": pos code " +
                              std::to_string(code));
      }
      rec.pos = *pos;
      const std::uint8_t flag = r.u8("gold flag");
      if (flag > 1) {
        throw FormatError(FormatError::Kind::kBadTag, path.string(), 0,
                          "record " + std::to_string(i) + ": gold flag " +
                              std::to_string(flag));
      }
      if (flag == 1) rec.gold_sense = r.str16("gold sense");
      rec.vector.resize(dump.q);
      r.f32s(rec.vector, "vector");
      dump.records.push_back(std::move(rec));
    } catch (const FormatError& e) {
      if (e.kind() != FormatError::Kind::kTruncated) throw;
      throw FormatError(FormatError::Kind::kTruncated, path.string(), 0,
                        "declared " + std::to_string(header.count) +
                            " records, file ends inside record " + std::to_string(i));
    }
  }
  return dump;
}

void save_context_dump(const ContextDump& dump, const std::filesystem::path& path) {
  if (dump.q == 0) throw DimensionError("context dump q must be positive");
  for (const auto& rec : dump.records) {
    if (rec.vector.size() != dump.q) {
      throw DimensionError("record '" + rec.instance_id + "' has " +
                           std::to_string(rec.vector.size()) + " components, dump q is " +
                           std::to_string(dump.q));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, path.string(), 0, "cannot create file");
  detail::BinaryWriter w(out, path.string());
  w.magic(kMagic);
  w.u32(dump.q);
  w.u64(dump.records.size());
  for (const auto& rec : dump.records) {
    w.str16(rec.instance_id);
    w.str16(rec.lemma);
    w.u8(static_cast<std::uint8_t>(rec.pos));
    w.u8(rec.gold_sense ? 1 : 0);
    if (rec.gold_sense) w.str16(*rec.gold_sense);
    w.f32s(rec.vector);
  }
  w.finish();
}

}  // namespace cdes
