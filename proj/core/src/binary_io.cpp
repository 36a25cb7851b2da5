#include "binary_io.hpp"

#include <array>
#include <cstring>
#include <limits>
#include <vector>

namespace cdes::detail {

void BinaryWriter::bytes(const void* data, std::size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out_) {
    throw FormatError(FormatError::Kind::kIo, path_, 0, "write failed");
  }
}

void BinaryWriter::magic(std::string_view four) { bytes(four.data(), four.size()); }

void BinaryWriter::u8(std::uint8_t v) { bytes(&v, 1); }

void BinaryWriter::u16(std::uint16_t v) {
  const std::array<unsigned char, 2> b{static_cast<unsigned char>(v),
                                       static_cast<unsigned char>(v >> 8)};
  bytes(b.data(), b.size());
}

void BinaryWriter::u32(std::uint32_t v) {
  std::array<unsigned char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  bytes(b.data(), b.size());
}

void BinaryWriter::u64(std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  bytes(b.data(), b.size());
}

void BinaryWriter::f32s(std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    bytes(values.data(), values.size_bytes());
  } else {
    for (float v : values) f32(v);
  }
}

void BinaryWriter::str16(std::string_view s) {
  if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw FormatError(FormatError::Kind::kIo, path_, 0,
                      "string longer than 65535 bytes: " +
                          std::string(s.substr(0, 32)) + "...");
  }
  u16(static_cast<std::uint16_t>(s.size()));
  bytes(s.data(), s.size());
}

void BinaryWriter::finish() {
  out_.flush();
  if (!out_) throw FormatError(FormatError::Kind::kIo, path_, 0, "flush failed");
}

void BinaryReader::bytes(void* data, std::size_t n, const char* what) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw FormatError(FormatError::Kind::kTruncated, path_, 0,
                      std::string("unexpected end of file reading ") + what);
  }
}

void BinaryReader::expect_magic(std::string_view four) {
  char got[4] = {0, 0, 0, 0};
  in_.read(got, 4);
  if (in_.gcount() != 4 || std::string_view(got, 4) != four) {
    if (in_.gcount() == 0) {
      throw FormatError(FormatError::Kind::kEmptyFile, path_, 0, "no data");
    }
    throw FormatError(FormatError::Kind::kBadMagic, path_, 0,
                      "expected magic \"" + std::string(four) + "\"");
  }
}

std::uint8_t BinaryReader::u8(const char* what) {
  std::uint8_t v = 0;
  bytes(&v, 1, what);
  return v;
}

std::uint16_t BinaryReader::u16(const char* what) {
  std::array<unsigned char, 2> b{};
  bytes(b.data(), 2, what);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t BinaryReader::u32(const char* what) {
  std::array<unsigned char, 4> b{};
  bytes(b.data(), 4, what);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t BinaryReader::u64(const char* what) {
  std::array<unsigned char, 8> b{};
  bytes(b.data(), 8, what);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void BinaryReader::f32s(std::span<float> out, const char* what) {
  if constexpr (std::endian::native == std::endian::little) {
    bytes(out.data(), out.size_bytes(), what);
  } else {
    for (float& v : out) v = f32(what);
  }
}

std::string BinaryReader::str16(const char* what) {
  const std::uint16_t n = u16(what);
  std::string s(n, '\0');
  if (n) bytes(s.data(), n, what);
  return s;
}

bool BinaryReader::at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

}  // namespace cdes::detail
