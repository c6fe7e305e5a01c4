#include "sylpipe/binary_io.h"

#include <bit>
#include <istream>
#include <ostream>

#include "sylpipe/errors.h"

namespace sylpipe {

void BinaryWriter::U8(uint8_t v) { out_.put(static_cast<char>(v)); }

void BinaryWriter::U32(uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out_.write(buf, 4);
}

void BinaryWriter::U64(uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out_.write(buf, 8);
}

void BinaryWriter::F64(double v) { U64(std::bit_cast<uint64_t>(v)); }

void BinaryWriter::Str(std::string_view s) {
  U32(static_cast<uint32_t>(s.size()));
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::Magic(std::string_view magic) {
  out_.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void BinaryReader::Read(char* buf, size_t n) {
  in_.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in_.gcount()) != n) throw ModelError("truncated model file");
}

uint8_t BinaryReader::U8() {
  char c;
  Read(&c, 1);
  return static_cast<uint8_t>(c);
}

uint32_t BinaryReader::U32() {
  unsigned char buf[4];
  Read(reinterpret_cast<char*>(buf), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf[i]) << (8 * i);
  return v;
}

uint64_t BinaryReader::U64() {
  unsigned char buf[8];
  Read(reinterpret_cast<char*>(buf), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

double BinaryReader::F64() { return std::bit_cast<double>(U64()); }

std::string BinaryReader::Str() {
  uint32_t n = U32();
  if (n > (1u << 28)) throw ModelError("corrupt string length in model file");
  std::string s(n, '\0');
  if (n > 0) Read(s.data(), n);
  return s;
}

void BinaryReader::ExpectMagic(std::string_view magic) {
  std::string buf(magic.size(), '\0');
  Read(buf.data(), buf.size());
  if (buf != magic) throw ModelError("bad model file magic, expected " + std::string(magic));
}

}  // namespace sylpipe
