#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "cdes/error.hpp"

namespace cdes::detail {

// Little-endian primitive writer used by every binary format.
class BinaryWriter {
 public:
  BinaryWriter(std::ostream& out, std::string path)
      : out_(out), path_(std::move(path)) {}

  void magic(std::string_view four);
  void u8(std::uint8_t v);
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f32s(std::span<const float> values);
  // u16 length prefix + raw bytes
  void str16(std::string_view s);
  void finish();

 private:
  void bytes(const void* data, std::size_t n);

  std::ostream& out_;
  std::string path_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string path)
      : in_(in), path_(std::move(path)) {}

  // `what` names the field being read for truncation messages.
  void expect_magic(std::string_view four);
  std::uint8_t u8(const char* what);
  std::uint16_t u16(const char* what);
  std::uint32_t u32(const char* what);
  std::uint64_t u64(const char* what);
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  void f32s(std::span<float> out, const char* what);
  std::string str16(const char* what);
  bool at_eof();

  const std::string& path() const { return path_; }

 private:
  void bytes(void* data, std::size_t n, const char* what);

  std::istream& in_;
  std::string path_;
};

}  // namespace cdes::detail
